#include "leafvgg/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "leafvgg/error.hpp"

namespace leafvgg {

std::string_view to_string(DataErrc code) {
  switch (code) {
    case DataErrc::missing_path: return "missing_path";
    case DataErrc::empty_root: return "empty_root";
    case DataErrc::not_a_directory: return "not_a_directory";
    case DataErrc::empty_class: return "empty_class";
    case DataErrc::unsupported_format: return "unsupported_format";
    case DataErrc::corrupt_image: return "corrupt_image";
    case DataErrc::bad_manifest: return "bad_manifest";
    case DataErrc::io: return "io";
  }
  return "unknown";
}

std::string_view to_string(FormatErrc code) {
  switch (code) {
    case FormatErrc::io: return "io";
    case FormatErrc::bad_magic: return "bad_magic";
    case FormatErrc::bad_version: return "bad_version";
    case FormatErrc::truncated: return "truncated";
    case FormatErrc::trailing_data: return "trailing_data";
    case FormatErrc::bad_dtype: return "bad_dtype";
    case FormatErrc::non_finite: return "non_finite";
    case FormatErrc::duplicate_name: return "duplicate_name";
    case FormatErrc::unknown_name: return "unknown_name";
    case FormatErrc::missing_tensor: return "missing_tensor";
    case FormatErrc::shape_mismatch: return "shape_mismatch";
  }
  return "unknown";
}

std::string to_string(const Shape& shape) {
  std::string out;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out += 'x';
    out += std::to_string(shape[i]);
  }
  return out;
}

std::size_t element_count(const Shape& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

namespace {

void check_extents(const Shape& shape) {
  if (shape.empty()) throw ShapeError("tensor rank must be at least 1");
  if (std::any_of(shape.begin(), shape.end(), [](std::size_t d) { return d == 0; })) {
    throw ShapeError("tensor extents must be positive, got " + to_string(shape));
  }
}

}  // namespace

Tensor::Tensor(Shape shape) : shape_(std::move(shape)) {
  check_extents(shape_);
  data_.assign(element_count(shape_), 0.0f);
}

Tensor::Tensor(Shape shape, std::vector<float> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  check_extents(shape_);
  if (element_count(shape_) != data_.size()) {
    throw ShapeError("shape " + to_string(shape_) + " holds " +
                     std::to_string(element_count(shape_)) + " values, got " +
                     std::to_string(data_.size()));
  }
  if (!std::all_of(data_.begin(), data_.end(), [](float v) { return std::isfinite(v); })) {
    throw NumericError("tensor data contains NaN or Inf");
  }
}

Tensor Tensor::filled(Shape shape, float value) {
  Tensor t(std::move(shape));
  std::fill(t.data_.begin(), t.data_.end(), value);
  return t;
}

Tensor Tensor::reshaped(Shape shape) const& {
  Tensor copy = *this;
  return std::move(copy).reshaped(std::move(shape));
}

Tensor Tensor::reshaped(Shape shape) && {
  check_extents(shape);
  if (element_count(shape) != data_.size()) {
    throw ShapeError("cannot reshape " + to_string(shape_) + " to " + to_string(shape));
  }
  shape_ = std::move(shape);
  return std::move(*this);
}

std::span<const float> Tensor::row(std::size_t i) const {
  if (i >= shape_[0]) {
    throw ShapeError("row " + std::to_string(i) + " of a tensor shaped " + to_string(shape_));
  }
  const std::size_t stride = data_.size() / shape_[0];
  return std::span<const float>(data_).subspan(i * stride, stride);
}

std::span<float> Tensor::row(std::size_t i) {
  const auto view = std::as_const(*this).row(i);
  return {const_cast<float*>(view.data()), view.size()};
}

void expect_shape(const Tensor& t, const Shape& expected, const std::string& what) {
  if (t.shape() != expected) {
    throw ShapeError(what + ": expected " + to_string(expected) + ", got " +
                     to_string(t.shape()));
  }
}

}  // namespace leafvgg
