#include "leafvgg/model.hpp"

#include <cmath>

#include "leafvgg/error.hpp"
#include "leafvgg/ops.hpp"
#include "leafvgg/prng.hpp"

namespace leafvgg {

namespace {

const Tensor& parameter(const WeightStore& store, const std::string& name, const Shape& shape) {
  const Tensor* t = store.find(name);
  if (!t) throw FormatError(FormatErrc::missing_tensor, "missing tensor " + name, name);
  if (t->shape() != shape) {
    throw FormatError(FormatErrc::shape_mismatch,
                      name + ": expected shape " + to_string(shape) + ", got " +
                          to_string(t->shape()),
                      name);
  }
  return *t;
}

Tensor run_layer(const LayerSpec& layer, const WeightStore& store, Tensor x) {
  const std::string weight = layer.name + ".weight";
  const std::string bias = layer.name + ".bias";
  if (const auto* c = std::get_if<ConvSpec>(&layer.kind)) {
    const auto k = static_cast<std::size_t>(c->kernel);
    const Tensor& w = parameter(store, weight, {c->out_channels, x.dim(0), k, k});
    const Tensor& b = parameter(store, bias, {c->out_channels});
    Tensor y = conv2d(x, w, b, {c->stride, c->padding});
    return c->relu ? relu(std::move(y)) : y;
  }
  if (const auto* p = std::get_if<PoolSpec>(&layer.kind)) {
    return maxpool2d(x, p->window, p->stride);
  }
  if (std::holds_alternative<FlattenSpec>(layer.kind)) return flatten(std::move(x));
  if (const auto* d = std::get_if<DenseSpec>(&layer.kind)) {
    const Tensor& w = parameter(store, weight, {d->out_features, x.size()});
    const Tensor& b = parameter(store, bias, {d->out_features});
    Tensor y = dense(x, w, b);
    return d->relu ? relu(std::move(y)) : y;
  }
  return softmax(x);
}

}  // namespace

Tensor extract_features(const Architecture& arch, const WeightStore& store, const Tensor& image) {
  expect_shape(image, arch.input_shape(), "input image");
  Tensor x = image;
  for (std::size_t i = 0; i <= arch.flatten_index(); ++i) {
    x = run_layer(arch.layers()[i], store, std::move(x));
  }
  return x;
}

Tensor classify_features(const Architecture& arch, const WeightStore& store,
                         const Tensor& features) {
  expect_shape(features, {arch.feature_length()}, "feature vector");
  Tensor x = features;
  for (std::size_t i = arch.flatten_index() + 1; i < arch.layers().size(); ++i) {
    x = run_layer(arch.layers()[i], store, std::move(x));
  }
  return x;
}

Tensor forward(const Architecture& arch, const WeightStore& store, const Tensor& image) {
  expect_shape(image, arch.input_shape(), "input image");
  for (std::size_t i = arch.flatten_index() + 1; i < arch.layers().size(); ++i) {
    const auto& layer = arch.layers()[i];
    if (layer.type() == LayerType::dense && !store.contains(layer.name + ".weight")) {
      throw FormatError(FormatErrc::missing_tensor,
                        "no trained " + layer.name + " weights in the store", layer.name + ".weight");
    }
  }
  return classify_features(arch, store, extract_features(arch, store, image));
}

WeightStore random_weights(const Architecture& arch, std::uint64_t seed, bool with_head) {
  WeightStore store;
  std::uint64_t stream = 0;
  for (const auto& p : arch.parameters()) {
    if (p.is_head && !with_head) continue;
    Tensor t(p.shape);
    if (p.shape.size() > 1) {
      const double fan_in = static_cast<double>(t.size() / p.shape[0]);
      const double a = std::sqrt(6.0 / fan_in);
      Prng rng = Prng::derive(seed, stream);
      for (float& v : t.data()) v = static_cast<float>(rng.uniform(-a, a));
    }
    ++stream;
    store.insert(p.name, std::move(t));
  }
  return store;
}

}  // namespace leafvgg
