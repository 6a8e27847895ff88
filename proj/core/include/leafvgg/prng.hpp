#pragma once

#include <cstdint>
#include <limits>
#include <span>

namespace leafvgg {

/// One step of splitmix64 applied to `x`.
std::uint64_t splitmix64(std::uint64_t x);

/// xoshiro256** seeded from a 64-bit value through splitmix64.
///
/// Satisfies UniformRandomBitGenerator, but the helpers below are what the
/// pipeline uses: standard-library distributions are implementation-defined
/// and would break cross-platform reproducibility.
class Prng {
 public:
  using result_type = std::uint64_t;

  explicit Prng(std::uint64_t seed);

  /// Independent stream for item `index` of a run seeded with `seed`:
  /// Prng(splitmix64(seed ^ index)).
  static Prng derive(std::uint64_t seed, std::uint64_t index);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return next(); }
  std::uint64_t next();

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01();
  /// Uniform double in the open interval (0, 1).
  double uniform_open01();
  /// lo + (hi - lo) * uniform01(); exactly lo when lo == hi.
  double uniform(double lo, double hi);
  /// Uniform integer in [0, bound), bound > 0, without modulo bias.
  std::uint64_t below(std::uint64_t bound);

  /// Fisher-Yates, last element first.
  template <class T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  bool operator==(const Prng&) const = default;

 private:
  std::uint64_t s_[4];
};

}  // namespace leafvgg
