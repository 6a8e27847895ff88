#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "leafvgg/prng.hpp"
#include "leafvgg/tensor.hpp"

namespace leafvgg::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Tensor of the given shape with entries uniform in [lo, hi).
Tensor random_tensor(const Shape& shape, Prng& rng, double lo = -1.0, double hi = 1.0);

/// Solid-colour classes with additive noise, written as PNG files under
/// root/<class>/img_<i>.png. Returns the class names in directory order.
struct ToyDatasetSpec {
  std::size_t classes = 3;
  std::size_t per_class = 20;
  std::size_t side = 32;
  double noise = 25.0;  ///< uniform noise amplitude on the 0..255 scale
  std::uint64_t seed = 7;
};

std::vector<std::string> make_toy_dataset(const std::filesystem::path& root,
                                          const ToyDatasetSpec& spec = {});

std::string read_text(const std::filesystem::path& path);
std::vector<unsigned char> read_bytes(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

/// Validation results published for the Swedish leaf experiment.
struct PublishedRow {
  const char* name;
  std::size_t support;
  const char* precision;
  const char* recall;
  const char* f1;
};

/// 15 rows in class-directory order.
const std::vector<PublishedRow>& published_table();
inline constexpr const char* kPublishedAverage = "0.997";
inline constexpr std::size_t kPublishedTotal = 338;

/// Index of a class in published_table(), which must exist.
std::size_t published_index(const std::string& name);

/// "label,prediction" rows reconstructed from the published confusion
/// pattern: every sample correct except one Ulmus carpinifolia sample
/// predicted as Betula pubescens.
std::string published_predictions_csv();

}  // namespace leafvgg::testing
