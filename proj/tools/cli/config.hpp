#pragma once

// Run configuration shared by every subcommand.
//
// Sources, later ones winning: built-in defaults, the --config file,
// --set key=value overrides in command-line order, then the dedicated flags
// (--seed, --threads, --output-dir, --deterministic, --dataset, --weights).

#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "leafvgg/architecture.hpp"
#include "leafvgg/augment.hpp"
#include "leafvgg/head.hpp"
#include "leafvgg/image.hpp"

namespace leafvgg::cli {

struct RunConfig {
  std::filesystem::path dataset_root;
  std::filesystem::path weights_path = "weights.lefw";
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 0;
  double split_fraction = 0.7;
  bool stratified = false;
  Normalization normalization = Normalization::paper_1_255;
  std::string arch = "vgg19";  ///< vgg19 | tiny
  std::size_t input_side = 256;
  AugmentConfig augment;
  TrainConfig train;
  bool augmented_training = false;  ///< re-extract augmented features every epoch
  bool deterministic = false;
  int threads = 0;  ///< 0 = runtime default

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

/// Sets one dotted key. Throws ConfigError on an unknown key or bad value.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// "key=value" form of apply_setting.
void apply_assignment(RunConfig& cfg, const std::string& assignment);

/// Reads "key = value" lines; blank lines and '#' comments are skipped.
void apply_config_stream(RunConfig& cfg, std::istream& in, const std::string& source_name);
void apply_config_file(RunConfig& cfg, const std::filesystem::path& path);

/// Every recognised key with its current value, one "key=value" per line.
std::string dump_config(const RunConfig& cfg);

/// Architecture named by cfg.arch at cfg.input_side.
Architecture make_architecture(const RunConfig& cfg, std::size_t class_count);

}  // namespace leafvgg::cli
