#include "support.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "leafvgg/image.hpp"

namespace fs = std::filesystem;

namespace leafvgg::testing {

TempDir::TempDir() {
  std::string tmpl = (fs::temp_directory_path() / "leafvgg-test-XXXXXX").string();
  if (!::mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
  path_ = tmpl;
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

Tensor random_tensor(const Shape& shape, Prng& rng, double lo, double hi) {
  Tensor t(shape);
  for (float& v : t.data()) v = static_cast<float>(rng.uniform(lo, hi));
  return t;
}

std::vector<std::string> make_toy_dataset(const fs::path& root, const ToyDatasetSpec& spec) {
  static const float palette[][3] = {
      {200, 40, 40}, {40, 190, 50}, {40, 60, 210}, {220, 200, 40}, {150, 60, 170}, {60, 190, 190},
  };
  if (spec.classes > std::size(palette)) throw std::invalid_argument("too many toy classes");
  Prng rng(spec.seed);
  std::vector<std::string> names;
  for (std::size_t c = 0; c < spec.classes; ++c) {
    const std::string name = "class_" + std::string(1, static_cast<char>('a' + c));
    names.push_back(name);
    fs::create_directories(root / name);
    for (std::size_t i = 0; i < spec.per_class; ++i) {
      Tensor img({3, spec.side, spec.side});
      const std::size_t plane = spec.side * spec.side;
      for (std::size_t ch = 0; ch < 3; ++ch) {
        for (std::size_t p = 0; p < plane; ++p) {
          const double v = palette[c][ch] + rng.uniform(-spec.noise, spec.noise);
          img[ch * plane + p] = static_cast<float>(std::clamp(v, 0.0, 255.0));
        }
      }
      char file[32];
      std::snprintf(file, sizeof file, "img_%03zu.png", i);
      write_png(img, root / name / file);
    }
  }
  return names;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<unsigned char> read_bytes(const fs::path& path) {
  const std::string s = read_text(path);
  return {s.begin(), s.end()};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

const std::vector<PublishedRow>& published_table() {
  static const std::vector<PublishedRow> rows = {
      {"Acer", 25, "1", "1", "1"},
      {"Alnus incana", 20, "1", "1", "1"},
      {"Betula pubescens", 20, "0.952", "1", "0.975"},
      {"Fagus sylvatica", 24, "1", "1", "1"},
      {"Populus", 24, "1", "1", "1"},
      {"Populus tremula", 25, "1", "1", "1"},
      {"Quercus", 27, "1", "1", "1"},
      {"Salix alba", 21, "1", "1", "1"},
      {"Salix aurita", 17, "1", "1", "1"},
      {"Salix sinerea", 28, "1", "1", "1"},
      {"Sorbus aucuparia", 25, "1", "1", "1"},
      {"Sorbus intermedia", 20, "1", "1", "1"},
      {"Tilia", 21, "1", "1", "1"},
      {"Ulmus carpinifolia", 17, "1", "0.941", "0.969"},
      {"Ulmus glabra", 24, "1", "1", "1"},
  };
  return rows;
}

std::size_t published_index(const std::string& name) {
  const auto& rows = published_table();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (name == rows[i].name) return i;
  }
  throw std::invalid_argument("no published class " + name);
}

std::string published_predictions_csv() {
  std::ostringstream csv;
  csv << "label,prediction\n";
  bool moved = false;
  for (const auto& row : published_table()) {
    for (std::size_t i = 0; i < row.support; ++i) {
      const bool wrong = !moved && std::string(row.name) == "Ulmus carpinifolia";
      if (wrong) moved = true;
      csv << row.name << ',' << (wrong ? "Betula pubescens" : row.name) << '\n';
    }
  }
  return csv.str();
}

}  // namespace leafvgg::testing
