#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace leafvgg {

using Shape = std::vector<std::size_t>;

/// "64x3x3x3"
std::string to_string(const Shape& shape);

std::size_t element_count(const Shape& shape);

/// Dense row-major float32 tensor, outermost extent first.
///
/// Every extent is at least 1 and rank is at least 1. Values handed in from
/// outside (the data constructor) must be finite; tensors produced by the
/// kernels are trusted.
class Tensor {
 public:
  /// Zero-filled tensor.
  explicit Tensor(Shape shape);
  Tensor(std::initializer_list<std::size_t> shape) : Tensor(Shape(shape)) {}
  /// Takes ownership of `data`; throws ShapeError on a size mismatch and
  /// NumericError on NaN/Inf.
  Tensor(Shape shape, std::vector<float> data);

  static Tensor filled(Shape shape, float value);

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const noexcept { return data_.size(); }

  std::span<float> data() noexcept { return data_; }
  std::span<const float> data() const noexcept { return data_; }
  const std::vector<float>& values() const noexcept { return data_; }

  float& operator[](std::size_t i) noexcept { return data_[i]; }
  float operator[](std::size_t i) const noexcept { return data_[i]; }

  /// Same data, new shape of equal element count.
  Tensor reshaped(Shape shape) const&;
  Tensor reshaped(Shape shape) &&;

  /// Row `i` of the outermost axis as a flat span.
  std::span<const float> row(std::size_t i) const;
  std::span<float> row(std::size_t i);

  friend bool operator==(const Tensor& a, const Tensor& b) = default;

 private:
  Shape shape_;
  std::vector<float> data_;
};

/// Throws ShapeError with `what` prefixed unless `t` has exactly `expected` shape.
void expect_shape(const Tensor& t, const Shape& expected, const std::string& what);

}  // namespace leafvgg
