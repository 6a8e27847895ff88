#pragma once

// Class-per-directory image datasets and their train/validation split.
//
// Layout: root/<class_name>/<image files>. Class indices follow the
// lexicographic order of the directory names.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace leafvgg {

struct Sample {
  std::filesystem::path path;  ///< relative to the dataset root
  std::size_t class_index = 0;

  bool operator==(const Sample&) const = default;
};

struct DatasetIndex {
  std::filesystem::path root;
  std::vector<std::string> class_names;
  std::vector<Sample> samples;  ///< sorted by path
};

/// True for .png/.jpg/.jpeg/.ppm, case-insensitive.
bool is_image_file(const std::filesystem::path& path);

/// Throws DataError: missing_path, empty_root (no class directories),
/// not_a_directory (a plain file beside the class folders), empty_class.
/// Dot-files are ignored.
DatasetIndex scan_dataset(const std::filesystem::path& root);

struct SplitManifest {
  std::uint64_t seed = 0;
  std::vector<Sample> train;
  std::vector<Sample> validation;

  bool operator==(const SplitManifest&) const = default;
};

/// Global split: shuffle all samples with Prng(seed) and send the first
/// floor(fraction * N) to training. With `stratified`, the same rule is
/// applied inside each class with Prng::derive(seed, class_index).
/// Both lists keep dataset order. Throws ConfigError unless 0 < fraction < 1.
SplitManifest split(const DatasetIndex& index, double train_fraction, std::uint64_t seed,
                    bool stratified = false);

/// Samples per class.
std::vector<std::size_t> class_supports(std::span<const Sample> samples, std::size_t class_count);

/// Text form: "seed=<u64>" then "<train|val>\t<class_index>\t<relative path>" per sample.
void write_manifest(std::ostream& out, const SplitManifest& manifest);
SplitManifest read_manifest(std::istream& in);
void save_manifest(const SplitManifest& manifest, const std::filesystem::path& path);
SplitManifest load_manifest(const std::filesystem::path& path);

/// One class name per line.
void save_class_list(const std::vector<std::string>& names, const std::filesystem::path& path);
std::vector<std::string> load_class_list(const std::filesystem::path& path);

}  // namespace leafvgg
