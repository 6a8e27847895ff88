#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "leafvgg/tensor.hpp"

namespace leafvgg {

/// Square convolution, followed by ReLU when `relu` is set.
struct ConvSpec {
  std::size_t out_channels = 0;
  int kernel = 3;
  int stride = 1;
  int padding = 1;
  bool relu = true;
};

struct PoolSpec {
  int window = 2;
  int stride = 2;
};

struct FlattenSpec {};

struct DenseSpec {
  std::size_t out_features = 0;
  bool relu = false;
};

struct SoftmaxSpec {};

enum class LayerType { conv, maxpool, flatten, dense, softmax };

const char* to_string(LayerType type);

/// One named layer. Parameter tensors are "<name>.weight" and "<name>.bias".
struct LayerSpec {
  std::string name;
  std::variant<ConvSpec, PoolSpec, FlattenSpec, DenseSpec, SoftmaxSpec> kind;

  LayerType type() const { return static_cast<LayerType>(kind.index()); }
};

/// Name and expected shape of a parameter tensor.
struct ParameterSpec {
  std::string name;
  Shape shape;
  bool is_head = false;  ///< belongs to a dense layer after the flatten
};

/// Ordered layer list over a square RGB input.
///
/// The list must read: conv/maxpool layers, exactly one flatten, one or more
/// dense layers, and a final softmax. Construction propagates shapes and
/// throws ShapeError if any layer would produce an empty extent.
class Architecture {
 public:
  Architecture(std::size_t input_channels, std::size_t input_side, std::vector<LayerSpec> layers);

  const Shape& input_shape() const noexcept { return input_shape_; }
  std::size_t input_side() const noexcept { return input_shape_[1]; }
  const std::vector<LayerSpec>& layers() const noexcept { return layers_; }

  /// Output shape after layers()[i].
  const std::vector<Shape>& layer_shapes() const noexcept { return shapes_; }

  /// Index of the flatten layer; layers before it form the feature extractor.
  std::size_t flatten_index() const noexcept { return flatten_index_; }
  /// Shape entering the flatten layer, e.g. 512x8x8.
  const Shape& feature_map_shape() const;
  std::size_t feature_length() const;
  /// Width of the final softmax.
  std::size_t class_count() const;

  /// Conv parameters first, then dense parameters, in layer order.
  std::vector<ParameterSpec> parameters() const;

  /// Same layers over a different input side.
  Architecture with_input_side(std::size_t input_side) const;

 private:
  Shape input_shape_;
  std::vector<LayerSpec> layers_;
  std::vector<Shape> shapes_;
  std::size_t flatten_index_ = 0;
};

struct LayerCensus {
  std::size_t conv = 0;
  std::size_t maxpool = 0;
  std::size_t flatten = 0;
  std::size_t dense = 0;
  std::size_t softmax = 0;
};

LayerCensus census(const Architecture& arch);

/// VGG-19 feature stack (conv blocks 2-2-4-4-4, widths 64..512, 2x2 pooling
/// after each block) with a single dense head of `class_count` outputs.
/// Throws ConfigError unless input_side is a positive multiple of 32.
Architecture build_vgg19(std::size_t class_count = 15, std::size_t input_side = 256);

/// VGG-19 with its original 4096-4096-`class_count` dense stack. Used for
/// cost accounting only.
Architecture build_vgg19_classic(std::size_t input_side = 224, std::size_t class_count = 1000);

/// Two conv blocks (one conv + pool each) and a dense head. Small enough to
/// train end to end in tests. input_side must be a positive multiple of 4.
Architecture build_tiny(std::size_t class_count, std::size_t input_side,
                        std::size_t first_channels = 8, std::size_t second_channels = 16);

struct LayerFlops {
  std::string name;
  LayerType type;
  Shape output_shape;
  std::uint64_t macs = 0;
};

/// Multiply-accumulate counts per layer (one MAC = one FLOP). Pooling,
/// activation, flatten and softmax rows carry zero.
struct FlopReport {
  std::vector<LayerFlops> layers;
  std::uint64_t total = 0;
};

FlopReport count_flops(const Architecture& arch, std::size_t input_side);

}  // namespace leafvgg
