#include "leafvgg/weights.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <unordered_set>

#include "leafvgg/architecture.hpp"
#include "leafvgg/error.hpp"

namespace leafvgg {

void WeightStore::insert(std::string name, Tensor tensor) {
  if (index_.contains(name)) {
    throw FormatError(FormatErrc::duplicate_name, "duplicate tensor name '" + name + "'", name);
  }
  index_.emplace(name, entries_.size());
  entries_.push_back({std::move(name), std::move(tensor)});
}

void WeightStore::set(std::string name, Tensor tensor) {
  if (auto it = index_.find(name); it != index_.end()) {
    entries_[it->second].tensor = std::move(tensor);
    return;
  }
  insert(std::move(name), std::move(tensor));
}

bool WeightStore::erase(std::string_view name) {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return false;
  entries_.erase(entries_.begin() + static_cast<std::ptrdiff_t>(it->second));
  index_.clear();
  for (std::size_t i = 0; i < entries_.size(); ++i) index_.emplace(entries_[i].name, i);
  return true;
}

const Tensor* WeightStore::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  return it == index_.end() ? nullptr : &entries_[it->second].tensor;
}

const Tensor& WeightStore::at(std::string_view name) const {
  if (const Tensor* t = find(name)) return *t;
  throw FormatError(FormatErrc::missing_tensor, "missing tensor '" + std::string(name) + "'",
                    std::string(name));
}

namespace {

static_assert(sizeof(float) == 4 && std::numeric_limits<float>::is_iec559);

void put_le(std::string& buf, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void append_float_data(std::string& buf, std::span<const float> data) {
  const std::size_t start = buf.size();
  buf.resize(start + data.size() * 4);
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(buf.data() + start, data.data(), data.size() * 4);
  } else {
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto bits = std::bit_cast<std::uint32_t>(data[i]);
      for (int b = 0; b < 4; ++b) buf[start + i * 4 + b] = static_cast<char>((bits >> (8 * b)) & 0xFF);
    }
  }
}

class Cursor {
 public:
  explicit Cursor(std::string_view bytes) : bytes_(bytes) {}

  std::uint64_t le(int n, const char* what) {
    need(static_cast<std::size_t>(n), what);
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += static_cast<std::size_t>(n);
    return v;
  }

  std::string_view take(std::size_t n, const char* what) {
    need(n, what);
    auto out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  bool done() const { return pos_ == bytes_.size(); }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n, const char* what) const {
    if (bytes_.size() - pos_ < n) {
      throw FormatError(FormatErrc::truncated, std::string("file truncated while reading ") + what +
                                                   " at byte " + std::to_string(pos_));
    }
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

WeightStore parse(std::string_view bytes) {
  Cursor cur(bytes);
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kWeightMagic, 4) != 0) {
    throw FormatError(FormatErrc::bad_magic, "not a LEFW1 file (bad magic)");
  }
  cur.take(4, "magic");
  const auto version = cur.le(4, "version");
  if (version != kWeightVersion) {
    throw FormatError(FormatErrc::bad_version,
                      "unsupported LEFW version " + std::to_string(version) + " (expected 1)");
  }
  const auto count = cur.le(4, "tensor count");
  WeightStore store;
  for (std::uint64_t t = 0; t < count; ++t) {
    const auto name_len = static_cast<std::size_t>(cur.le(2, "name length"));
    std::string name(cur.take(name_len, "tensor name"));
    const auto rank = static_cast<std::size_t>(cur.le(1, "rank"));
    Shape shape(rank);
    for (auto& d : shape) d = static_cast<std::size_t>(cur.le(4, "dimension"));
    const auto dtype = cur.le(1, "dtype");
    if (dtype != kDtypeFloat32) {
      throw FormatError(FormatErrc::bad_dtype,
                        name + ": unsupported dtype " + std::to_string(dtype), name);
    }
    if (rank == 0 || element_count(shape) == 0) {
      throw FormatError(FormatErrc::shape_mismatch,
                        name + ": invalid shape '" + to_string(shape) + "'", name);
    }
    const std::size_t n = element_count(shape);
    if (n > cur.remaining() / 4) {
      throw FormatError(FormatErrc::truncated, name + ": data truncated", name);
    }
    auto raw = cur.take(n * 4, "tensor data");
    std::vector<float> data(n);
    if constexpr (std::endian::native == std::endian::little) {
      std::memcpy(data.data(), raw.data(), n * 4);
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        std::uint32_t bits = 0;
        for (int b = 0; b < 4; ++b) {
          bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(raw[i * 4 + b])) << (8 * b);
        }
        data[i] = std::bit_cast<float>(bits);
      }
    }
    for (float v : data) {
      if (!std::isfinite(v)) {
        throw FormatError(FormatErrc::non_finite, name + ": contains NaN or Inf", name);
      }
    }
    store.insert(std::move(name), Tensor(std::move(shape), std::move(data)));
  }
  if (!cur.done()) {
    throw FormatError(FormatErrc::trailing_data,
                      std::to_string(cur.remaining()) + " unexpected bytes after last tensor");
  }
  return store;
}

std::string serialize(const WeightStore& store) {
  std::string buf(kWeightMagic, 4);
  put_le(buf, kWeightVersion, 4);
  put_le(buf, store.size(), 4);
  for (const auto& [name, tensor] : store) {
    if (name.size() > 0xFFFF) throw ConfigError("tensor name too long: " + name);
    if (tensor.rank() > 0xFF) throw ConfigError(name + ": rank exceeds 255");
    put_le(buf, name.size(), 2);
    buf += name;
    put_le(buf, tensor.rank(), 1);
    for (auto d : tensor.shape()) {
      if (d > 0xFFFFFFFFull) throw ConfigError(name + ": dimension exceeds u32");
      put_le(buf, d, 4);
    }
    put_le(buf, kDtypeFloat32, 1);
    append_float_data(buf, tensor.data());
  }
  return buf;
}

}  // namespace

void write_weights(std::ostream& out, const WeightStore& store) {
  const std::string buf = serialize(store);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw FormatError(FormatErrc::io, "failed to write weight stream");
}

WeightStore read_weights(std::istream& in) {
  std::string bytes;
  char chunk[1 << 16];
  while (in.read(chunk, sizeof chunk) || in.gcount() > 0) {
    bytes.append(chunk, static_cast<std::size_t>(in.gcount()));
  }
  return parse(bytes);
}

void save_weights(const WeightStore& store, const std::filesystem::path& path) {
  const std::string buf = serialize(store);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError(FormatErrc::io, "cannot open " + tmp.string() + " for writing");
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw FormatError(FormatErrc::io, "failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw FormatError(FormatErrc::io, "cannot move " + tmp.string() + " to " + path.string());
}

WeightStore load_weights(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(FormatErrc::io, "cannot open weight file " + path.string());
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::size_t>(in.tellg());
  in.seekg(0);
  std::string bytes(size, '\0');
  in.read(bytes.data(), static_cast<std::streamsize>(size));
  if (!in) throw FormatError(FormatErrc::io, "failed reading " + path.string());
  return parse(bytes);
}

void validate_weights(const WeightStore& store, const Architecture& arch, HeadPolicy head) {
  std::unordered_set<std::string> known;
  for (const auto& p : arch.parameters()) {
    known.insert(p.name);
    const Tensor* t = store.find(p.name);
    if (!t) {
      if (p.is_head && head == HeadPolicy::optional) continue;
      throw FormatError(FormatErrc::missing_tensor, "missing tensor " + p.name, p.name);
    }
    if (t->shape() != p.shape) {
      throw FormatError(FormatErrc::shape_mismatch,
                        p.name + ": expected shape " + to_string(p.shape) + ", got " +
                            to_string(t->shape()),
                        p.name);
    }
  }
  // A head is all-or-nothing.
  for (const auto& p : arch.parameters()) {
    if (!p.is_head || store.contains(p.name)) continue;
    for (const auto& q : arch.parameters()) {
      if (q.is_head && store.contains(q.name)) {
        throw FormatError(FormatErrc::missing_tensor,
                          "missing tensor " + p.name + " (found " + q.name + ")", p.name);
      }
    }
  }
  for (const auto& entry : store) {
    if (!known.contains(entry.name)) {
      throw FormatError(FormatErrc::unknown_name,
                        "tensor '" + entry.name + "' is not part of the architecture", entry.name);
    }
  }
}

WeightStore load_weights(const std::filesystem::path& path, const Architecture& arch,
                         HeadPolicy head) {
  WeightStore store = load_weights(path);
  validate_weights(store, arch, head);
  return store;
}

std::uint32_t tensor_crc32(const Tensor& tensor) {
  std::string bytes;
  append_float_data(bytes, tensor.data());
  uLong crc = crc32(0L, Z_NULL, 0);
  std::size_t off = 0;
  while (off < bytes.size()) {
    const auto n = static_cast<uInt>(std::min<std::size_t>(bytes.size() - off, 1u << 30));
    crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data() + off), n);
    off += n;
  }
  return static_cast<std::uint32_t>(crc);
}

}  // namespace leafvgg
