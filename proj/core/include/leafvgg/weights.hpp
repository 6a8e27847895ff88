#pragma once

// Named parameter tensors and the LEFW1 container.
//
// LEFW1 layout, all integers little-endian:
//   "LEFW"  u32 version=1  u32 tensor_count
//   per tensor: u16 name_len, name (UTF-8), u8 rank, rank x u32 dims,
//               u8 dtype=1 (float32 LE), row-major data
//
// Conv weights are [out, in, kH, kW], dense weights [out, in], biases [out].

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "leafvgg/tensor.hpp"

namespace leafvgg {

class Architecture;

inline constexpr char kWeightMagic[4] = {'L', 'E', 'F', 'W'};
inline constexpr std::uint32_t kWeightVersion = 1;
inline constexpr std::uint8_t kDtypeFloat32 = 1;

/// Insertion-ordered name -> tensor map. Order is preserved through save/load.
class WeightStore {
 public:
  struct Entry {
    std::string name;
    Tensor tensor;
  };

  /// Throws FormatError(duplicate_name) if `name` exists.
  void insert(std::string name, Tensor tensor);
  /// Replaces in place if `name` exists, else appends.
  void set(std::string name, Tensor tensor);
  bool erase(std::string_view name);

  const Tensor* find(std::string_view name) const;
  /// Throws FormatError(missing_tensor).
  const Tensor& at(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name) != nullptr; }

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  auto begin() const noexcept { return entries_.begin(); }
  auto end() const noexcept { return entries_.end(); }

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

void write_weights(std::ostream& out, const WeightStore& store);
WeightStore read_weights(std::istream& in);

void save_weights(const WeightStore& store, const std::filesystem::path& path);
WeightStore load_weights(const std::filesystem::path& path);

enum class HeadPolicy { optional, required };

/// Checks `store` against the parameter list of `arch`: every conv tensor
/// present with the right shape, head tensors present when required, and no
/// names the architecture does not know. Throws FormatError.
void validate_weights(const WeightStore& store, const Architecture& arch,
                      HeadPolicy head = HeadPolicy::optional);

WeightStore load_weights(const std::filesystem::path& path, const Architecture& arch,
                         HeadPolicy head = HeadPolicy::optional);

/// CRC-32 (zlib polynomial) of the tensor's little-endian float32 bytes.
std::uint32_t tensor_crc32(const Tensor& tensor);

}  // namespace leafvgg
