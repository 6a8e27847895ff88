#include "leafvgg/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "leafvgg/error.hpp"
#include "leafvgg/prng.hpp"

namespace fs = std::filesystem;

namespace leafvgg {

bool is_image_file(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".ppm";
}

namespace {

bool hidden(const fs::path& p) {
  const auto name = p.filename().string();
  return !name.empty() && name.front() == '.';
}

}  // namespace

DatasetIndex scan_dataset(const fs::path& root) {
  std::error_code ec;
  if (!fs::exists(root, ec)) {
    throw DataError(DataErrc::missing_path, "dataset root does not exist: " + root.string());
  }
  if (!fs::is_directory(root, ec)) {
    throw DataError(DataErrc::not_a_directory, "dataset root is not a directory: " + root.string());
  }
  std::vector<fs::path> class_dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (hidden(entry.path())) continue;
    if (!entry.is_directory()) {
      throw DataError(DataErrc::not_a_directory,
                      "unexpected non-directory entry in dataset root: " + entry.path().string());
    }
    class_dirs.push_back(entry.path());
  }
  if (class_dirs.empty()) {
    throw DataError(DataErrc::empty_root, "dataset root has no class directories: " + root.string());
  }
  std::sort(class_dirs.begin(), class_dirs.end(),
            [](const fs::path& a, const fs::path& b) {
              return a.filename().string() < b.filename().string();
            });

  DatasetIndex index;
  index.root = root;
  for (std::size_t c = 0; c < class_dirs.size(); ++c) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(class_dirs[c])) {
      if (entry.is_regular_file() && !hidden(entry.path()) && is_image_file(entry.path())) {
        files.push_back(fs::relative(entry.path(), root));
      }
    }
    if (files.empty()) {
      throw DataError(DataErrc::empty_class,
                      "class directory has no images: " + class_dirs[c].string());
    }
    std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
      return a.generic_string() < b.generic_string();
    });
    index.class_names.push_back(class_dirs[c].filename().string());
    for (auto& f : files) index.samples.push_back({std::move(f), c});
  }
  return index;
}

namespace {

std::size_t train_count(double fraction, std::size_t n) {
  // Guard against 0.7 * 10 landing just below 7.
  return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9));
}

}  // namespace

SplitManifest split(const DatasetIndex& index, double train_fraction, std::uint64_t seed,
                    bool stratified) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("split fraction must lie strictly between 0 and 1, got " +
                      std::to_string(train_fraction));
  }
  const std::size_t n = index.samples.size();
  std::vector<bool> to_train(n, false);
  if (!stratified) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Prng rng(seed);
    rng.shuffle(std::span<std::size_t>(order));
    const std::size_t k = train_count(train_fraction, n);
    for (std::size_t i = 0; i < k; ++i) to_train[order[i]] = true;
  } else {
    for (std::size_t c = 0; c < index.class_names.size(); ++c) {
      std::vector<std::size_t> members;
      for (std::size_t i = 0; i < n; ++i) {
        if (index.samples[i].class_index == c) members.push_back(i);
      }
      Prng rng = Prng::derive(seed, c);
      rng.shuffle(std::span<std::size_t>(members));
      const std::size_t k = train_count(train_fraction, members.size());
      for (std::size_t i = 0; i < k; ++i) to_train[members[i]] = true;
    }
  }
  SplitManifest m;
  m.seed = seed;
  for (std::size_t i = 0; i < n; ++i) {
    (to_train[i] ? m.train : m.validation).push_back(index.samples[i]);
  }
  return m;
}

std::vector<std::size_t> class_supports(std::span<const Sample> samples, std::size_t class_count) {
  std::vector<std::size_t> out(class_count, 0);
  for (const auto& s : samples) {
    if (s.class_index >= class_count) {
      throw ConfigError("sample class index " + std::to_string(s.class_index) + " out of range");
    }
    ++out[s.class_index];
  }
  return out;
}

void write_manifest(std::ostream& out, const SplitManifest& manifest) {
  out << "seed=" << manifest.seed << '\n';
  auto emit = [&](const char* tag, const std::vector<Sample>& samples) {
    for (const auto& s : samples) {
      const std::string p = s.path.generic_string();
      if (p.find_first_of("\t\n\r") != std::string::npos) {
        throw DataError(DataErrc::bad_manifest, "sample path contains a tab or newline: " + p);
      }
      out << tag << '\t' << s.class_index << '\t' << p << '\n';
    }
  };
  emit("train", manifest.train);
  emit("val", manifest.validation);
}

SplitManifest read_manifest(std::istream& in) {
  SplitManifest m;
  std::string line;
  if (!std::getline(in, line) || line.rfind("seed=", 0) != 0) {
    throw DataError(DataErrc::bad_manifest, "manifest must start with a seed=<u64> line");
  }
  try {
    std::size_t used = 0;
    m.seed = std::stoull(line.substr(5), &used);
    if (used != line.size() - 5) throw std::invalid_argument("seed");
  } catch (const std::exception&) {
    throw DataError(DataErrc::bad_manifest, "malformed seed line: " + line);
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) {
      throw DataError(DataErrc::bad_manifest, "manifest line " + std::to_string(line_no) +
                                                  ": expected <split>\\t<class>\\t<path>");
    }
    const std::string tag = line.substr(0, t1);
    Sample s;
    try {
      s.class_index = std::stoull(line.substr(t1 + 1, t2 - t1 - 1));
    } catch (const std::exception&) {
      throw DataError(DataErrc::bad_manifest,
                      "manifest line " + std::to_string(line_no) + ": bad class index");
    }
    s.path = fs::path(line.substr(t2 + 1));
    if (tag == "train") {
      m.train.push_back(std::move(s));
    } else if (tag == "val") {
      m.validation.push_back(std::move(s));
    } else {
      throw DataError(DataErrc::bad_manifest,
                      "manifest line " + std::to_string(line_no) + ": unknown split '" + tag + "'");
    }
  }
  return m;
}

void save_manifest(const SplitManifest& manifest, const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(DataErrc::io, "cannot write manifest " + path.string());
  write_manifest(out, manifest);
}

SplitManifest load_manifest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(DataErrc::missing_path, "cannot open manifest " + path.string());
  return read_manifest(in);
}

void save_class_list(const std::vector<std::string>& names, const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(DataErrc::io, "cannot write class list " + path.string());
  for (const auto& n : names) out << n << '\n';
}

std::vector<std::string> load_class_list(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(DataErrc::missing_path, "cannot open class list " + path.string());
  std::vector<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) names.push_back(line);
  }
  if (names.empty()) throw DataError(DataErrc::bad_manifest, "class list is empty: " + path.string());
  return names;
}

}  // namespace leafvgg
