#include "leafvgg/features.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "leafvgg/error.hpp"
#include "leafvgg/weights.hpp"

namespace fs = std::filesystem;

namespace leafvgg {

void FeatureCache::check() const {
  if (records.size() != features.size()) {
    throw ShapeError("feature cache has " + std::to_string(records.size()) + " records but " +
                     std::to_string(features.size()) + " vectors");
  }
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i].rank() != 1 || features[i].size() != features.front().size()) {
      throw ShapeError("feature vector " + std::to_string(i) + " has shape " +
                       to_string(features[i].shape()) + ", expected " +
                       std::to_string(features.front().size()));
    }
  }
}

std::size_t FeatureCache::feature_length() const {
  return features.empty() ? 0 : features.front().size();
}

fs::path feature_index_path(const fs::path& cache) {
  fs::path p = cache;
  p += ".index";
  return p;
}

void save_feature_cache(const FeatureCache& cache, const fs::path& path) {
  cache.check();
  WeightStore store;
  for (std::size_t i = 0; i < cache.features.size(); ++i) {
    store.insert("feat." + std::to_string(i), cache.features[i]);
  }
  std::ostringstream index;
  for (std::size_t i = 0; i < cache.records.size(); ++i) {
    const auto& r = cache.records[i];
    const std::string p = r.path.generic_string();
    if (p.find_first_of("\t\n\r") != std::string::npos) {
      throw DataError(DataErrc::bad_manifest, "sample path contains a tab or newline: " + p);
    }
    index << i << '\t' << (r.train ? "train" : "val") << '\t' << r.class_index << '\t' << p << '\n';
  }
  save_weights(store, path);
  const fs::path index_path = feature_index_path(path);
  std::ofstream out(index_path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(DataErrc::io, "cannot write " + index_path.string());
  out << index.str();
  if (!out) throw DataError(DataErrc::io, "failed writing " + index_path.string());
}

FeatureCache load_feature_cache(const fs::path& path) {
  WeightStore store = load_weights(path);
  const fs::path index_path = feature_index_path(path);
  std::ifstream in(index_path, std::ios::binary);
  if (!in) throw DataError(DataErrc::missing_path, "cannot open " + index_path.string());

  FeatureCache cache;
  std::string line;
  std::size_t line_no = 0;
  auto bad = [&](const std::string& why) {
    return DataError(DataErrc::bad_manifest,
                     index_path.string() + ":" + std::to_string(line_no) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (int f = 0; f < 3; ++f) {
      const auto tab = line.find('\t', start);
      if (tab == std::string::npos) throw bad("expected <index>\\t<split>\\t<class>\\t<path>");
      fields.push_back(line.substr(start, tab - start));
      start = tab + 1;
    }
    fields.push_back(line.substr(start));
    FeatureRecord r;
    try {
      if (std::stoull(fields[0]) != cache.records.size()) throw bad("indices must run 0, 1, 2, ...");
      r.class_index = std::stoull(fields[2]);
    } catch (const std::invalid_argument&) {
      throw bad("bad number");
    } catch (const std::out_of_range&) {
      throw bad("bad number");
    }
    if (fields[1] == "train") {
      r.train = true;
    } else if (fields[1] != "val") {
      throw bad("unknown split '" + fields[1] + "'");
    }
    r.path = fields[3];
    const std::string name = "feat." + fields[0];
    const Tensor* t = store.find(name);
    if (!t) throw FormatError(FormatErrc::missing_tensor, "feature cache lacks " + name, name);
    cache.records.push_back(std::move(r));
    cache.features.push_back(*t);
  }
  if (cache.records.size() != store.size()) {
    throw DataError(DataErrc::bad_manifest,
                    index_path.string() + " lists " + std::to_string(cache.records.size()) +
                        " vectors, the cache holds " + std::to_string(store.size()));
  }
  cache.check();
  return cache;
}

Tensor stack_rows(std::span<const Tensor> rows) {
  if (rows.empty()) throw ShapeError("cannot stack zero rows");
  const std::size_t f = rows.front().size();
  std::vector<float> data;
  data.reserve(rows.size() * f);
  for (const auto& r : rows) {
    if (r.size() != f) {
      throw ShapeError("row of " + std::to_string(r.size()) + " values, expected " +
                       std::to_string(f));
    }
    data.insert(data.end(), r.values().begin(), r.values().end());
  }
  return Tensor({rows.size(), f}, std::move(data));
}

Tensor FeatureSet::matrix() const { return stack_rows(vectors); }

FeatureSet select_split(const FeatureCache& cache, bool train) {
  FeatureSet set;
  for (std::size_t i = 0; i < cache.records.size(); ++i) {
    if (cache.records[i].train != train) continue;
    set.rows.push_back(i);
    set.labels.push_back(cache.records[i].class_index);
    set.vectors.push_back(cache.features[i]);
  }
  return set;
}

}  // namespace leafvgg
