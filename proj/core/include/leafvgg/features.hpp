#pragma once

// Cache of extracted feature vectors.
//
// The vectors live in a LEFW1 file as "feat.<i>"; a sidecar text file
// "<cache>.index" holds one "<i>\t<train|val>\t<class_index>\t<path>" line
// per vector.

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "leafvgg/tensor.hpp"

namespace leafvgg {

struct FeatureRecord {
  std::size_t class_index = 0;
  bool train = false;
  std::filesystem::path path;  ///< sample path relative to the dataset root

  bool operator==(const FeatureRecord&) const = default;
};

struct FeatureCache {
  std::vector<FeatureRecord> records;
  std::vector<Tensor> features;  ///< aligned with records, all of one length

  /// Throws ShapeError when the lists disagree in length or vector size.
  void check() const;
  std::size_t feature_length() const;
};

std::filesystem::path feature_index_path(const std::filesystem::path& cache);

void save_feature_cache(const FeatureCache& cache, const std::filesystem::path& path);
/// Throws FormatError for container problems and DataError(bad_manifest)
/// for a malformed or inconsistent sidecar.
FeatureCache load_feature_cache(const std::filesystem::path& path);

/// The rows of one split stacked into an N x F matrix with their labels.
struct FeatureSet {
  std::vector<std::size_t> rows;  ///< indices into the cache
  std::vector<std::size_t> labels;
  std::vector<Tensor> vectors;

  bool empty() const noexcept { return rows.empty(); }
  /// N x F; throws ShapeError when empty.
  Tensor matrix() const;
};

FeatureSet select_split(const FeatureCache& cache, bool train);

/// Stacks equally sized vectors into a matrix, one per row.
Tensor stack_rows(std::span<const Tensor> rows);

}  // namespace leafvgg
