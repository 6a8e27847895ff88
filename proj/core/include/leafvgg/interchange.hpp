#pragma once

// Files produced by the external weight exporter: the export manifest that
// accompanies a LEFW1 weight file, and reference fixtures pairing an input
// tensor with the features another framework computed for it.

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "leafvgg/architecture.hpp"
#include "leafvgg/tensor.hpp"
#include "leafvgg/weights.hpp"

namespace leafvgg {

/// JSON layout:
///   {"source": "...",
///    "tensors": [{"name": "conv1_1.weight", "source_name": "...",
///                 "shape": [64, 3, 3, 3], "checksum": "1a2b3c4d"}, ...],
///    "normalization": {"mean": [r, g, b], "std": [r, g, b]}}
/// checksum is the CRC-32 of the tensor data as 8 lowercase hex digits.
struct ExportManifest {
  struct TensorEntry {
    std::string name;
    std::string source_name;
    Shape shape;
    std::uint32_t checksum = 0;
  };

  std::string source;
  std::vector<TensorEntry> tensors;
  std::array<double, 3> mean{};
  std::array<double, 3> stddev{};
};

/// Throws DataError(bad_manifest) on malformed JSON or missing fields.
ExportManifest parse_export_manifest(const std::string& json);
ExportManifest load_export_manifest(const std::filesystem::path& path);
std::string export_manifest_json(const ExportManifest& manifest);
/// Describes every tensor of `store` under its own name.
ExportManifest describe_weights(const WeightStore& store, std::string source);

std::string checksum_hex(std::uint32_t crc);

/// One line per disagreement between a weight store and its manifest:
/// absent tensors, unlisted tensors, shape and checksum mismatches.
std::vector<std::string> compare_with_manifest(const WeightStore& store,
                                               const ExportManifest& manifest);

/// LEFW1 file with "fixture.input" (C x H x W, already preprocessed) and
/// "fixture.features" (flattened pre-head features).
struct Fixture {
  Tensor input;
  Tensor features;
};

inline constexpr const char* kFixtureInput = "fixture.input";
inline constexpr const char* kFixtureFeatures = "fixture.features";

void save_fixture(const Fixture& fixture, const std::filesystem::path& path);
Fixture load_fixture(const std::filesystem::path& path);

/// Largest absolute difference between extract_features(fixture.input) and
/// fixture.features. Throws ShapeError if the lengths differ.
double fixture_max_abs_diff(const Architecture& arch, const WeightStore& store,
                            const Fixture& fixture);

}  // namespace leafvgg
