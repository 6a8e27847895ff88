#include "leafvgg/interchange.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "leafvgg/error.hpp"
#include "leafvgg/model.hpp"

namespace fs = std::filesystem;

namespace leafvgg {

std::string checksum_hex(std::uint32_t crc) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%08x", crc);
  return buf;
}

namespace {

using nlohmann::json;

[[noreturn]] void bad_manifest(const std::string& why) {
  throw DataError(DataErrc::bad_manifest, "export manifest: " + why);
}

std::uint32_t parse_checksum(const std::string& hex) {
  if (hex.size() != 8 || !std::all_of(hex.begin(), hex.end(), [](char c) {
        return std::isxdigit(static_cast<unsigned char>(c));
      })) {
    bad_manifest("checksum must be 8 hex digits, got '" + hex + "'");
  }
  return static_cast<std::uint32_t>(std::stoul(hex, nullptr, 16));
}

std::array<double, 3> triple(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) bad_manifest(std::string(what) + " must hold 3 numbers");
  std::array<double, 3> out{};
  for (std::size_t i = 0; i < 3; ++i) out[i] = j[i].get<double>();
  return out;
}

}  // namespace

ExportManifest parse_export_manifest(const std::string& text) {
  ExportManifest m;
  try {
    const json doc = json::parse(text);
    m.source = doc.at("source").get<std::string>();
    for (const auto& t : doc.at("tensors")) {
      ExportManifest::TensorEntry e;
      e.name = t.at("name").get<std::string>();
      e.source_name = t.value("source_name", std::string());
      e.shape = t.at("shape").get<Shape>();
      e.checksum = parse_checksum(t.at("checksum").get<std::string>());
      m.tensors.push_back(std::move(e));
    }
    if (doc.contains("normalization")) {
      const auto& n = doc.at("normalization");
      m.mean = triple(n.at("mean"), "normalization.mean");
      m.stddev = triple(n.at("std"), "normalization.std");
    }
  } catch (const json::exception& e) {
    bad_manifest(e.what());
  }
  return m;
}

ExportManifest load_export_manifest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(DataErrc::missing_path, "cannot open manifest " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_export_manifest(text.str());
}

std::string export_manifest_json(const ExportManifest& m) {
  nlohmann::ordered_json doc;
  doc["source"] = m.source;
  doc["tensors"] = nlohmann::ordered_json::array();
  for (const auto& t : m.tensors) {
    doc["tensors"].push_back({{"name", t.name},
                              {"source_name", t.source_name},
                              {"shape", t.shape},
                              {"checksum", checksum_hex(t.checksum)}});
  }
  doc["normalization"] = {{"mean", m.mean}, {"std", m.stddev}};
  return doc.dump(2) + "\n";
}

ExportManifest describe_weights(const WeightStore& store, std::string source) {
  ExportManifest m;
  m.source = std::move(source);
  for (const auto& e : store) {
    m.tensors.push_back({e.name, e.name, e.tensor.shape(), tensor_crc32(e.tensor)});
  }
  m.mean = {0.485, 0.456, 0.406};
  m.stddev = {0.229, 0.224, 0.225};
  return m;
}

std::vector<std::string> compare_with_manifest(const WeightStore& store,
                                               const ExportManifest& manifest) {
  std::vector<std::string> issues;
  std::unordered_map<std::string, const ExportManifest::TensorEntry*> listed;
  for (const auto& t : manifest.tensors) listed.emplace(t.name, &t);
  for (const auto& t : manifest.tensors) {
    const Tensor* found = store.find(t.name);
    if (!found) {
      issues.push_back(t.name + ": listed in the manifest but absent from the weights");
      continue;
    }
    if (found->shape() != t.shape) {
      issues.push_back(t.name + ": shape " + to_string(found->shape()) + ", manifest says " +
                       to_string(t.shape));
      continue;
    }
    const std::uint32_t crc = tensor_crc32(*found);
    if (crc != t.checksum) {
      issues.push_back(t.name + ": checksum mismatch, file " + checksum_hex(crc) + ", manifest " +
                       checksum_hex(t.checksum));
    }
  }
  for (const auto& e : store) {
    if (!listed.count(e.name)) issues.push_back(e.name + ": not listed in the manifest");
  }
  return issues;
}

void save_fixture(const Fixture& fixture, const fs::path& path) {
  WeightStore store;
  store.insert(kFixtureInput, fixture.input);
  store.insert(kFixtureFeatures, fixture.features);
  save_weights(store, path);
}

Fixture load_fixture(const fs::path& path) {
  const WeightStore store = load_weights(path);
  return Fixture{store.at(kFixtureInput), store.at(kFixtureFeatures)};
}

double fixture_max_abs_diff(const Architecture& arch, const WeightStore& store,
                            const Fixture& fixture) {
  const Tensor ours = extract_features(arch, store, fixture.input);
  if (ours.size() != fixture.features.size()) {
    throw ShapeError("fixture holds " + std::to_string(fixture.features.size()) +
                     " features, the model produces " + std::to_string(ours.size()));
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < ours.size(); ++i) {
    worst = std::max(worst, std::abs(static_cast<double>(ours[i]) - fixture.features[i]));
  }
  return worst;
}

}  // namespace leafvgg
