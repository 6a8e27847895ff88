#include "leafvgg/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "leafvgg/error.hpp"

namespace leafvgg {

void AugmentConfig::validate() const {
  if (!(rotation_degrees >= 0.0) || !(shear_degrees >= 0.0) || !(shift_fraction >= 0.0)) {
    throw ConfigError("augmentation magnitudes must be non-negative");
  }
  if (!(zoom_low > 0.0) || !(zoom_low <= zoom_high)) {
    throw ConfigError("augmentation zoom range must satisfy 0 < zoom_low <= zoom_high");
  }
  if (shear_degrees >= 90.0) throw ConfigError("shear must be below 90 degrees");
}

AugmentConfig AugmentConfig::identity() {
  return {0.0, 1.0, 1.0, false, false, 0.0, 0.0};
}

AffineParams sample_affine(const AugmentConfig& cfg, std::size_t height, std::size_t width,
                           Prng& rng) {
  cfg.validate();
  AffineParams p;
  p.rotation_degrees = rng.uniform(-cfg.rotation_degrees, cfg.rotation_degrees);
  p.zoom = rng.uniform(cfg.zoom_low, cfg.zoom_high);
  const double flip_h = rng.uniform01();
  const double flip_v = rng.uniform01();
  p.h_flip = cfg.h_flip && flip_h < 0.5;
  p.v_flip = cfg.v_flip && flip_v < 0.5;
  p.shear_degrees = rng.uniform(-cfg.shear_degrees, cfg.shear_degrees);
  p.shift_x = rng.uniform(-cfg.shift_fraction, cfg.shift_fraction) * static_cast<double>(width);
  p.shift_y = rng.uniform(-cfg.shift_fraction, cfg.shift_fraction) * static_cast<double>(height);
  return p;
}

namespace {

struct Mat2 {
  double a, b, c, d;  // [[a, b], [c, d]]
};

Mat2 operator*(const Mat2& l, const Mat2& r) {
  return {l.a * r.a + l.b * r.c, l.a * r.b + l.b * r.d, l.c * r.a + l.d * r.c,
          l.c * r.b + l.d * r.d};
}

// Inverse of rotate * shear * zoom * flip, assembled factor by factor so
// the identity parameters give an exact identity matrix.
Mat2 inverse_map(const AffineParams& p) {
  constexpr double deg = std::numbers::pi / 180.0;
  const double cs = std::cos(p.rotation_degrees * deg);
  const double sn = std::sin(p.rotation_degrees * deg);
  // Forward rotation with y pointing down: [[cos, sin], [-sin, cos]].
  const Mat2 rot_inv{cs, -sn, sn, cs};
  const Mat2 shear_inv{1.0, -std::tan(p.shear_degrees * deg), 0.0, 1.0};
  const Mat2 zoom_inv{1.0 / p.zoom, 0.0, 0.0, 1.0 / p.zoom};
  const Mat2 flip{p.h_flip ? -1.0 : 1.0, 0.0, 0.0, p.v_flip ? -1.0 : 1.0};
  return flip * (zoom_inv * (shear_inv * rot_inv));
}

}  // namespace

Tensor apply_affine(const Tensor& image, const AffineParams& params) {
  if (image.rank() != 3) {
    throw ShapeError("apply_affine: expected C x H x W, got " + to_string(image.shape()));
  }
  if (!(params.zoom > 0.0)) throw ConfigError("apply_affine: zoom must be positive");
  const std::size_t c_count = image.dim(0), h = image.dim(1), w = image.dim(2);
  const Mat2 inv = inverse_map(params);
  const double cx = (static_cast<double>(w) - 1.0) / 2.0;
  const double cy = (static_cast<double>(h) - 1.0) / 2.0;
  const double max_x = static_cast<double>(w - 1);
  const double max_y = static_cast<double>(h - 1);

  Tensor out(image.shape());
  const std::size_t plane = h * w;
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const double dx = static_cast<double>(x) - cx - params.shift_x;
      const double dy = static_cast<double>(y) - cy - params.shift_y;
      const double sx = std::clamp(cx + inv.a * dx + inv.b * dy, 0.0, max_x);
      const double sy = std::clamp(cy + inv.c * dx + inv.d * dy, 0.0, max_y);
      const auto x0 = static_cast<std::size_t>(std::floor(sx));
      const auto y0 = static_cast<std::size_t>(std::floor(sy));
      const std::size_t x1 = std::min(x0 + 1, w - 1);
      const std::size_t y1 = std::min(y0 + 1, h - 1);
      const double fx = sx - static_cast<double>(x0);
      const double fy = sy - static_cast<double>(y0);
      for (std::size_t c = 0; c < c_count; ++c) {
        const float* p = image.data().data() + c * plane;
        const double top = p[y0 * w + x0] * (1.0 - fx) + p[y0 * w + x1] * fx;
        const double bottom = p[y1 * w + x0] * (1.0 - fx) + p[y1 * w + x1] * fx;
        out[c * plane + y * w + x] = static_cast<float>(top * (1.0 - fy) + bottom * fy);
      }
    }
  }
  return out;
}

Tensor augment(const Tensor& image, const AugmentConfig& cfg, Prng& rng) {
  if (image.rank() != 3) {
    throw ShapeError("augment: expected C x H x W, got " + to_string(image.shape()));
  }
  return apply_affine(image, sample_affine(cfg, image.dim(1), image.dim(2), rng));
}

}  // namespace leafvgg
