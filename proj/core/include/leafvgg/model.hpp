#pragma once

#include <cstdint>

#include "leafvgg/architecture.hpp"
#include "leafvgg/tensor.hpp"
#include "leafvgg/weights.hpp"

namespace leafvgg {

/// Runs every layer up to the flatten and returns the flattened feature
/// vector (512 * (side/32)^2 values for VGG-19). Head tensors are never read.
/// Throws ShapeError on an input of the wrong shape and FormatError when a
/// conv tensor is missing or mis-shaped.
Tensor extract_features(const Architecture& arch, const WeightStore& store, const Tensor& image);

/// Runs the dense layers and softmax on a feature vector.
Tensor classify_features(const Architecture& arch, const WeightStore& store,
                         const Tensor& features);

/// Full inference: class probabilities for one C x H x W image.
Tensor forward(const Architecture& arch, const WeightStore& store, const Tensor& image);

/// He-uniform conv (and, with `with_head`, dense) weights, U(-a, a) with
/// a = sqrt(6 / fan_in); biases zero. For smoke runs without pretrained weights.
WeightStore random_weights(const Architecture& arch, std::uint64_t seed, bool with_head = false);

}  // namespace leafvgg
