#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "config.hpp"

namespace leafvgg::cli {

/// Fixed file names inside RunConfig::output_dir.
namespace files {
inline constexpr const char* kClasses = "classes.txt";
inline constexpr const char* kSplit = "split.txt";
inline constexpr const char* kFeatures = "features.lefw";
inline constexpr const char* kCurves = "curves.csv";
inline constexpr const char* kPredictions = "predictions.csv";
}  // namespace files

/// Writes split.txt and classes.txt; prints the class/sample summary.
void cmd_ingest(const RunConfig& cfg, std::ostream& out);

/// Runs the feature extractor over every sample in split.txt and writes
/// features.lefw (+ .index).
void cmd_extract(const RunConfig& cfg, std::ostream& out);

/// Trains the head on the cached features, stores it in the weight file and
/// writes curves.csv.
void cmd_train(const RunConfig& cfg, std::ostream& out);

struct EvaluateOptions {
  /// CSV rows "label,prediction[,score_0,...,score_{K-1}]"; labels are class
  /// names or indices. An optional header row starting with "label" is skipped.
  std::optional<std::filesystem::path> from_predictions;
  /// Class list overriding output_dir/classes.txt.
  std::optional<std::filesystem::path> classes;
};

/// Writes report.json, report.txt, confusion.csv/.svg, jaccard.csv, roc.csv
/// (when scores exist) and, outside --from-predictions, predictions.csv.
void cmd_evaluate(const RunConfig& cfg, const EvaluateOptions& opts, std::ostream& out);

/// Prints the top_k classes as "name probability", most likely first.
/// Throws ConfigError when top_k is 0.
void cmd_predict(const RunConfig& cfg, const std::filesystem::path& image, std::size_t top_k,
                 std::ostream& out);

struct FlopsOptions {
  std::optional<std::size_t> input_side;
  bool original_head = false;  ///< 4096-4096-1000 dense stack
};

void cmd_flops(const RunConfig& cfg, const FlopsOptions& opts, std::ostream& out);

struct VerifyOptions {
  std::optional<std::filesystem::path> manifest;
  std::optional<std::filesystem::path> fixture;
};

/// Lists the tensors of the weight file and checks them against the
/// architecture and, optionally, an export manifest and a reference fixture.
/// Returns the exit code (0, 4 on diagnostics, 5 on a fixture mismatch).
int cmd_verify_weights(const RunConfig& cfg, const VerifyOptions& opts, std::ostream& out);

struct InitWeightsOptions {
  /// Defaults to the length of output_dir/classes.txt, else 15.
  std::optional<std::size_t> class_count;
  bool with_head = false;
  /// Also write an export manifest describing the new file.
  std::optional<std::filesystem::path> manifest;
};

/// Writes random He-uniform conv weights (and a random head when asked) for
/// runs without pretrained weights.
void cmd_init_weights(const RunConfig& cfg, const InitWeightsOptions& opts, std::ostream& out);

}  // namespace leafvgg::cli
