#pragma once

#include "leafvgg/prng.hpp"
#include "leafvgg/tensor.hpp"

namespace leafvgg {

/// Ranges for random augmentation. Rotation and zoom defaults follow the
/// training recipe (+/-30 degrees, scale 0.9..1.1); the rest are off.
struct AugmentConfig {
  double rotation_degrees = 30.0;
  double zoom_low = 0.9;
  double zoom_high = 1.1;
  bool h_flip = false;
  bool v_flip = false;
  double shear_degrees = 0.0;
  double shift_fraction = 0.0;

  /// Throws ConfigError on negative magnitudes, non-positive zoom, or zoom_low > zoom_high.
  void validate() const;
  /// All ranges zero, zoom fixed at 1, flips off.
  static AugmentConfig identity();
};

/// One concrete transform. Angles in degrees, positive rotation is
/// counter-clockwise on screen; shifts in pixels.
struct AffineParams {
  double rotation_degrees = 0.0;
  double zoom = 1.0;
  bool h_flip = false;
  bool v_flip = false;
  double shear_degrees = 0.0;
  double shift_x = 0.0;
  double shift_y = 0.0;
};

/// Draws exactly kAugmentDraws values from `rng` whatever the config.
AffineParams sample_affine(const AugmentConfig& cfg, std::size_t height, std::size_t width,
                           Prng& rng);
inline constexpr int kAugmentDraws = 7;

/// Warps about the image centre: out(p) = in(c + A^-1 (p - c - t)) with
/// A = rotate * shear * zoom * flip. Bilinear sampling, border replication.
Tensor apply_affine(const Tensor& image, const AffineParams& params);

Tensor augment(const Tensor& image, const AugmentConfig& cfg, Prng& rng);

}  // namespace leafvgg
