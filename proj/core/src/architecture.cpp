#include "leafvgg/architecture.hpp"

#include <string>

#include "leafvgg/error.hpp"
#include "leafvgg/ops.hpp"

namespace leafvgg {

const char* to_string(LayerType type) {
  switch (type) {
    case LayerType::conv: return "conv";
    case LayerType::maxpool: return "maxpool";
    case LayerType::flatten: return "flatten";
    case LayerType::dense: return "dense";
    case LayerType::softmax: return "softmax";
  }
  return "unknown";
}

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Shape propagate(const Shape& in, const LayerSpec& layer) {
  const auto fail = [&](const std::string& why) -> ShapeError {
    return ShapeError("layer " + layer.name + " (" + to_string(layer.type()) + "): " + why);
  };
  return std::visit(
      Overloaded{
          [&](const ConvSpec& c) -> Shape {
            if (in.size() != 3) throw fail("expects a C x H x W input, got " + to_string(in));
            if (c.out_channels == 0 || c.kernel < 1) throw fail("empty convolution");
            const auto k = static_cast<std::size_t>(c.kernel);
            return {c.out_channels, window_output_extent(in[1], k, c.stride, c.padding),
                    window_output_extent(in[2], k, c.stride, c.padding)};
          },
          [&](const PoolSpec& p) -> Shape {
            if (in.size() != 3) throw fail("expects a C x H x W input, got " + to_string(in));
            if (p.window < 1) throw fail("window must be positive");
            const auto w = static_cast<std::size_t>(p.window);
            return {in[0], window_output_extent(in[1], w, p.stride, 0),
                    window_output_extent(in[2], w, p.stride, 0)};
          },
          [&](const FlattenSpec&) -> Shape { return {element_count(in)}; },
          [&](const DenseSpec& d) -> Shape {
            if (in.size() != 1) throw fail("expects a flat input, got " + to_string(in));
            if (d.out_features == 0) throw fail("out_features must be positive");
            return {d.out_features};
          },
          [&](const SoftmaxSpec&) -> Shape {
            if (in.size() != 1) throw fail("expects a flat input, got " + to_string(in));
            return in;
          },
      },
      layer.kind);
}

}  // namespace

Architecture::Architecture(std::size_t input_channels, std::size_t input_side,
                           std::vector<LayerSpec> layers)
    : input_shape_{input_channels, input_side, input_side}, layers_(std::move(layers)) {
  if (input_channels == 0 || input_side == 0) {
    throw ShapeError("architecture input extents must be positive");
  }
  bool seen_flatten = false;
  bool seen_dense = false;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const LayerType t = layers_[i].type();
    const bool last = i + 1 == layers_.size();
    switch (t) {
      case LayerType::conv:
      case LayerType::maxpool:
        if (seen_flatten) {
          throw ConfigError("layer " + layers_[i].name + ": spatial layer after flatten");
        }
        break;
      case LayerType::flatten:
        if (seen_flatten) throw ConfigError("architecture has more than one flatten layer");
        seen_flatten = true;
        flatten_index_ = i;
        break;
      case LayerType::dense:
        if (!seen_flatten) throw ConfigError("layer " + layers_[i].name + ": dense before flatten");
        seen_dense = true;
        break;
      case LayerType::softmax:
        if (!last) throw ConfigError("softmax must be the final layer");
        break;
    }
  }
  if (!seen_flatten || !seen_dense || layers_.empty() ||
      layers_.back().type() != LayerType::softmax) {
    throw ConfigError("architecture must end with flatten, dense and softmax layers");
  }
  Shape current = input_shape_;
  shapes_.reserve(layers_.size());
  for (const auto& layer : layers_) {
    current = propagate(current, layer);
    shapes_.push_back(current);
  }
}

const Shape& Architecture::feature_map_shape() const {
  return flatten_index_ == 0 ? input_shape_ : shapes_[flatten_index_ - 1];
}

std::size_t Architecture::feature_length() const { return shapes_[flatten_index_][0]; }

std::size_t Architecture::class_count() const { return shapes_.back()[0]; }

std::vector<ParameterSpec> Architecture::parameters() const {
  std::vector<ParameterSpec> out;
  Shape in = input_shape_;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& layer = layers_[i];
    if (const auto* c = std::get_if<ConvSpec>(&layer.kind)) {
      const auto k = static_cast<std::size_t>(c->kernel);
      out.push_back({layer.name + ".weight", {c->out_channels, in[0], k, k}, false});
      out.push_back({layer.name + ".bias", {c->out_channels}, false});
    } else if (const auto* d = std::get_if<DenseSpec>(&layer.kind)) {
      out.push_back({layer.name + ".weight", {d->out_features, in[0]}, true});
      out.push_back({layer.name + ".bias", {d->out_features}, true});
    }
    in = shapes_[i];
  }
  return out;
}

Architecture Architecture::with_input_side(std::size_t input_side) const {
  return Architecture(input_shape_[0], input_side, layers_);
}

LayerCensus census(const Architecture& arch) {
  LayerCensus c;
  for (const auto& layer : arch.layers()) {
    switch (layer.type()) {
      case LayerType::conv: ++c.conv; break;
      case LayerType::maxpool: ++c.maxpool; break;
      case LayerType::flatten: ++c.flatten; break;
      case LayerType::dense: ++c.dense; break;
      case LayerType::softmax: ++c.softmax; break;
    }
  }
  return c;
}

namespace {

std::vector<LayerSpec> vgg19_features() {
  constexpr std::size_t widths[5] = {64, 128, 256, 512, 512};
  constexpr int depths[5] = {2, 2, 4, 4, 4};
  std::vector<LayerSpec> layers;
  for (int block = 0; block < 5; ++block) {
    for (int l = 0; l < depths[block]; ++l) {
      layers.push_back({"conv" + std::to_string(block + 1) + "_" + std::to_string(l + 1),
                        ConvSpec{widths[block], 3, 1, 1, true}});
    }
    layers.push_back({"pool" + std::to_string(block + 1), PoolSpec{2, 2}});
  }
  layers.push_back({"flatten", FlattenSpec{}});
  return layers;
}

void require_multiple(std::size_t side, std::size_t factor, const char* what) {
  if (side == 0 || side % factor != 0) {
    throw ConfigError(std::string(what) + ": input side " + std::to_string(side) +
                      " must be a positive multiple of " + std::to_string(factor));
  }
}

}  // namespace

Architecture build_vgg19(std::size_t class_count, std::size_t input_side) {
  require_multiple(input_side, 32, "vgg19");
  if (class_count == 0) throw ConfigError("vgg19: class_count must be positive");
  auto layers = vgg19_features();
  layers.push_back({"head", DenseSpec{class_count, false}});
  layers.push_back({"softmax", SoftmaxSpec{}});
  return Architecture(3, input_side, std::move(layers));
}

Architecture build_vgg19_classic(std::size_t input_side, std::size_t class_count) {
  require_multiple(input_side, 32, "vgg19");
  auto layers = vgg19_features();
  layers.push_back({"fc6", DenseSpec{4096, true}});
  layers.push_back({"fc7", DenseSpec{4096, true}});
  layers.push_back({"fc8", DenseSpec{class_count, false}});
  layers.push_back({"softmax", SoftmaxSpec{}});
  return Architecture(3, input_side, std::move(layers));
}

Architecture build_tiny(std::size_t class_count, std::size_t input_side,
                        std::size_t first_channels, std::size_t second_channels) {
  require_multiple(input_side, 4, "tiny");
  if (class_count == 0) throw ConfigError("tiny: class_count must be positive");
  std::vector<LayerSpec> layers{
      {"conv1_1", ConvSpec{first_channels, 3, 1, 1, true}},
      {"pool1", PoolSpec{2, 2}},
      {"conv2_1", ConvSpec{second_channels, 3, 1, 1, true}},
      {"pool2", PoolSpec{2, 2}},
      {"flatten", FlattenSpec{}},
      {"head", DenseSpec{class_count, false}},
      {"softmax", SoftmaxSpec{}},
  };
  return Architecture(3, input_side, std::move(layers));
}

FlopReport count_flops(const Architecture& arch, std::size_t input_side) {
  const Architecture sized =
      input_side == arch.input_side() ? arch : arch.with_input_side(input_side);
  FlopReport report;
  Shape in = sized.input_shape();
  for (std::size_t i = 0; i < sized.layers().size(); ++i) {
    const auto& layer = sized.layers()[i];
    const Shape& out = sized.layer_shapes()[i];
    std::uint64_t macs = 0;
    if (const auto* c = std::get_if<ConvSpec>(&layer.kind)) {
      const auto k = static_cast<std::uint64_t>(c->kernel);
      macs = static_cast<std::uint64_t>(out[0]) * in[0] * k * k * out[1] * out[2];
    } else if (std::holds_alternative<DenseSpec>(layer.kind)) {
      macs = static_cast<std::uint64_t>(out[0]) * in[0];
    }
    report.layers.push_back({layer.name, layer.type(), out, macs});
    report.total += macs;
    in = out;
  }
  return report;
}

}  // namespace leafvgg
