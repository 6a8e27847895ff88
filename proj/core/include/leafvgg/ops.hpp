#pragma once

// Neural-network primitives over channels-first (C x H x W) tensors.
//
// Every dot product accumulates in double and rounds to float once on store.
// Each output element is reduced in a fixed order (row-major over its window
// or over the feature axis), so results are bit-identical however the work is
// split across threads.

#include <cstddef>

#include "leafvgg/tensor.hpp"

namespace leafvgg {

struct Conv2dParams {
  int stride = 1;
  int padding = 0;
};

/// Output extent of a sliding window; throws ShapeError when it would be < 1.
std::size_t window_output_extent(std::size_t in, std::size_t kernel, int stride, int padding);

/// Cross-correlation of `input` (C_in x H x W) with `weights`
/// (C_out x C_in x kH x kW) plus `bias` (C_out), zero padding.
/// Implicit im2col feeding a blocked GEMM.
Tensor conv2d(const Tensor& input, const Tensor& weights, const Tensor& bias,
              Conv2dParams params = {});

/// Straight nested-loop convolution with the same accumulation order as conv2d.
Tensor conv2d_reference(const Tensor& input, const Tensor& weights, const Tensor& bias,
                        Conv2dParams params = {});

/// Max over window x window patches; trailing rows/columns that do not fill a
/// window are dropped.
Tensor maxpool2d(const Tensor& input, int window, int stride);

Tensor relu(Tensor t);

struct Activation {
  enum class Kind { sigmoid, tanh, leaky_relu };
  Kind kind = Kind::sigmoid;
  float alpha = 0.0f;  ///< negative slope, leaky_relu only

  static Activation sigmoid() { return {Kind::sigmoid, 0.0f}; }
  static Activation tanh() { return {Kind::tanh, 0.0f}; }
  static Activation leaky_relu(float alpha) { return {Kind::leaky_relu, alpha}; }
};

/// Elementwise activation; throws ConfigError on a negative leaky slope.
Tensor apply_activation(Tensor t, Activation activation);

/// out[k] = sum_f w[k, f] * x[f] + b[k]. `x` may have any shape with F elements.
Tensor dense(const Tensor& x, const Tensor& weights, const Tensor& bias);

/// Batched dense layer: rows of `x` (B x F) -> B x K.
Tensor dense_batch(const Tensor& x, const Tensor& weights, const Tensor& bias);

Tensor flatten(Tensor t);

/// Max-subtracted softmax over a rank-1 tensor. Outputs are clamped away
/// from zero so every probability stays in (0, 1].
Tensor softmax(const Tensor& logits);

inline constexpr double kProbabilityFloor = 1e-12;

/// -ln(max(probs[label], 1e-12)).
double cross_entropy(const Tensor& probs, std::size_t label);

/// Index of the largest element; ties go to the lowest index.
std::size_t argmax(std::span<const float> values);

}  // namespace leafvgg
