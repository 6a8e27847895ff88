#include <algorithm>
#include <cmath>

#include "leafvgg/error.hpp"
#include "leafvgg/image.hpp"

namespace leafvgg {

namespace {

void require_chw(const Tensor& image, const char* op) {
  if (image.rank() != 3) {
    throw ShapeError(std::string(op) + ": expected C x H x W, got " + to_string(image.shape()));
  }
}

struct Taps {
  std::size_t lo, hi;
  double frac;
};

std::vector<Taps> taps(std::size_t in, std::size_t out) {
  std::vector<Taps> t(out);
  const double scale = static_cast<double>(in) / static_cast<double>(out);
  for (std::size_t i = 0; i < out; ++i) {
    double src = (static_cast<double>(i) + 0.5) * scale - 0.5;
    src = std::clamp(src, 0.0, static_cast<double>(in - 1));
    const auto lo = static_cast<std::size_t>(std::floor(src));
    t[i] = {lo, std::min(lo + 1, in - 1), src - static_cast<double>(lo)};
  }
  return t;
}

}  // namespace

Tensor resize_bilinear(const Tensor& image, std::size_t out_height, std::size_t out_width) {
  require_chw(image, "resize_bilinear");
  const std::size_t c_count = image.dim(0), h = image.dim(1), w = image.dim(2);
  if (out_height == 0 || out_width == 0) throw ShapeError("resize_bilinear: empty output");
  if (h == out_height && w == out_width) return image;
  const auto ty = taps(h, out_height);
  const auto tx = taps(w, out_width);
  Tensor out({c_count, out_height, out_width});
  for (std::size_t c = 0; c < c_count; ++c) {
    const float* plane = image.data().data() + c * h * w;
    float* dst = out.data().data() + c * out_height * out_width;
    for (std::size_t y = 0; y < out_height; ++y) {
      const auto& ry = ty[y];
      for (std::size_t x = 0; x < out_width; ++x) {
        const auto& rx = tx[x];
        const double top = plane[ry.lo * w + rx.lo] * (1.0 - rx.frac) + plane[ry.lo * w + rx.hi] * rx.frac;
        const double bottom = plane[ry.hi * w + rx.lo] * (1.0 - rx.frac) + plane[ry.hi * w + rx.hi] * rx.frac;
        dst[y * out_width + x] = static_cast<float>(top * (1.0 - ry.frac) + bottom * ry.frac);
      }
    }
  }
  return out;
}

Tensor rescale(Tensor image) {
  for (float& v : image.data()) v /= 255.0f;
  return image;
}

Tensor normalize_imagenet(Tensor image) {
  require_chw(image, "normalize_imagenet");
  if (image.dim(0) != 3) throw ShapeError("normalize_imagenet: expected 3 channels");
  constexpr float mean[3] = {0.485f, 0.456f, 0.406f};
  constexpr float stdev[3] = {0.229f, 0.224f, 0.225f};
  const std::size_t plane = image.dim(1) * image.dim(2);
  for (std::size_t c = 0; c < 3; ++c) {
    for (float& v : image.data().subspan(c * plane, plane)) v = (v - mean[c]) / stdev[c];
  }
  return image;
}

Tensor preprocess(const Tensor& image, std::size_t side, Normalization mode) {
  Tensor x = rescale(resize_bilinear(image, side));
  return mode == Normalization::imagenet ? normalize_imagenet(std::move(x)) : x;
}

}  // namespace leafvgg
