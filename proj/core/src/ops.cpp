#include "leafvgg/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gemm.hpp"
#include "leafvgg/error.hpp"

namespace leafvgg {

namespace {

struct ConvGeometry {
  std::size_t in_c, in_h, in_w;
  std::size_t out_c, k_h, k_w;
  std::size_t out_h, out_w;
  std::size_t stride, padding;
};

ConvGeometry conv_geometry(const Tensor& input, const Tensor& weights, const Tensor& bias,
                           Conv2dParams params) {
  if (input.rank() != 3) {
    throw ShapeError("conv2d: input must be C x H x W, got " + to_string(input.shape()));
  }
  if (weights.rank() != 4) {
    throw ShapeError("conv2d: weights must be C_out x C_in x kH x kW, got " +
                     to_string(weights.shape()));
  }
  if (weights.dim(1) != input.dim(0)) {
    throw ShapeError("conv2d: input has " + std::to_string(input.dim(0)) +
                     " channels but weights expect C_in=" + std::to_string(weights.dim(1)) +
                     " (weights " + to_string(weights.shape()) + ")");
  }
  if (bias.rank() != 1 || bias.dim(0) != weights.dim(0)) {
    throw ShapeError("conv2d: bias must have length C_out=" + std::to_string(weights.dim(0)) +
                     ", got " + to_string(bias.shape()));
  }
  if (params.stride < 1) throw ConfigError("conv2d: stride must be positive");
  if (params.padding < 0) throw ConfigError("conv2d: padding must be non-negative");

  ConvGeometry g{};
  g.in_c = input.dim(0);
  g.in_h = input.dim(1);
  g.in_w = input.dim(2);
  g.out_c = weights.dim(0);
  g.k_h = weights.dim(2);
  g.k_w = weights.dim(3);
  g.stride = static_cast<std::size_t>(params.stride);
  g.padding = static_cast<std::size_t>(params.padding);
  g.out_h = window_output_extent(g.in_h, g.k_h, params.stride, params.padding);
  g.out_w = window_output_extent(g.in_w, g.k_w, params.stride, params.padding);
  return g;
}

void require_rank1(const Tensor& t, const char* op) {
  if (t.rank() != 1) {
    throw ShapeError(std::string(op) + ": expected a rank-1 tensor, got " + to_string(t.shape()));
  }
}

}  // namespace

std::size_t window_output_extent(std::size_t in, std::size_t kernel, int stride, int padding) {
  if (stride < 1) throw ConfigError("window stride must be positive");
  const std::size_t padded = in + 2 * static_cast<std::size_t>(std::max(padding, 0));
  if (kernel == 0 || padded < kernel) {
    throw ShapeError("window of " + std::to_string(kernel) + " does not fit padded extent " +
                     std::to_string(padded) + " (input " + std::to_string(in) + ", padding " +
                     std::to_string(padding) + ")");
  }
  return (padded - kernel) / static_cast<std::size_t>(stride) + 1;
}

Tensor conv2d(const Tensor& input, const Tensor& weights, const Tensor& bias,
              Conv2dParams params) {
  const ConvGeometry g = conv_geometry(input, weights, bias, params);
  const std::size_t depth = g.in_c * g.k_h * g.k_w;
  const std::size_t pixels = g.out_h * g.out_w;
  Tensor out({g.out_c, g.out_h, g.out_w});

  const float* src = input.data().data();
  auto pack = [&](std::size_t n0, std::size_t width, float* panel) {
    using detail::kPanelWidth;
    std::ptrdiff_t base_y[kPanelWidth];
    std::ptrdiff_t base_x[kPanelWidth];
    for (std::size_t j = 0; j < width; ++j) {
      const std::size_t n = n0 + j;
      base_y[j] = static_cast<std::ptrdiff_t>((n / g.out_w) * g.stride) -
                  static_cast<std::ptrdiff_t>(g.padding);
      base_x[j] = static_cast<std::ptrdiff_t>((n % g.out_w) * g.stride) -
                  static_cast<std::ptrdiff_t>(g.padding);
    }
    const auto h = static_cast<std::ptrdiff_t>(g.in_h);
    const auto w = static_cast<std::ptrdiff_t>(g.in_w);
    std::size_t k = 0;
    for (std::size_t c = 0; c < g.in_c; ++c) {
      const float* plane = src + c * g.in_h * g.in_w;
      for (std::size_t ky = 0; ky < g.k_h; ++ky) {
        for (std::size_t kx = 0; kx < g.k_w; ++kx, ++k) {
          float* row = panel + k * kPanelWidth;
          for (std::size_t j = 0; j < width; ++j) {
            const std::ptrdiff_t iy = base_y[j] + static_cast<std::ptrdiff_t>(ky);
            const std::ptrdiff_t ix = base_x[j] + static_cast<std::ptrdiff_t>(kx);
            row[j] = (iy >= 0 && iy < h && ix >= 0 && ix < w) ? plane[iy * w + ix] : 0.0f;
          }
          for (std::size_t j = width; j < kPanelWidth; ++j) row[j] = 0.0f;
        }
      }
    }
  };
  detail::gemm_packed(g.out_c, pixels, depth, weights.data().data(), bias.data().data(),
                      out.data().data(), pixels, pack);
  return out;
}

Tensor conv2d_reference(const Tensor& input, const Tensor& weights, const Tensor& bias,
                        Conv2dParams params) {
  const ConvGeometry g = conv_geometry(input, weights, bias, params);
  Tensor out({g.out_c, g.out_h, g.out_w});
  const auto h = static_cast<std::ptrdiff_t>(g.in_h);
  const auto w = static_cast<std::ptrdiff_t>(g.in_w);
  for (std::size_t oc = 0; oc < g.out_c; ++oc) {
    for (std::size_t oy = 0; oy < g.out_h; ++oy) {
      for (std::size_t ox = 0; ox < g.out_w; ++ox) {
        double acc = 0.0;
        for (std::size_t c = 0; c < g.in_c; ++c) {
          for (std::size_t ky = 0; ky < g.k_h; ++ky) {
            for (std::size_t kx = 0; kx < g.k_w; ++kx) {
              const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy * g.stride + ky) -
                                        static_cast<std::ptrdiff_t>(g.padding);
              const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox * g.stride + kx) -
                                        static_cast<std::ptrdiff_t>(g.padding);
              const float v = (iy >= 0 && iy < h && ix >= 0 && ix < w)
                                  ? input[(c * g.in_h + static_cast<std::size_t>(iy)) * g.in_w +
                                          static_cast<std::size_t>(ix)]
                                  : 0.0f;
              const float wv = weights[((oc * g.in_c + c) * g.k_h + ky) * g.k_w + kx];
              acc += static_cast<double>(wv) * static_cast<double>(v);
            }
          }
        }
        out[(oc * g.out_h + oy) * g.out_w + ox] =
            static_cast<float>(acc + static_cast<double>(bias[oc]));
      }
    }
  }
  return out;
}

Tensor maxpool2d(const Tensor& input, int window, int stride) {
  if (window < 1 || stride < 1) {
    throw ConfigError("maxpool2d: window and stride must be positive (window=" +
                      std::to_string(window) + ", stride=" + std::to_string(stride) + ")");
  }
  if (input.rank() != 3) {
    throw ShapeError("maxpool2d: input must be C x H x W, got " + to_string(input.shape()));
  }
  const std::size_t c_count = input.dim(0), h = input.dim(1), w = input.dim(2);
  const auto win = static_cast<std::size_t>(window);
  const auto step = static_cast<std::size_t>(stride);
  const std::size_t oh = window_output_extent(h, win, stride, 0);
  const std::size_t ow = window_output_extent(w, win, stride, 0);
  Tensor out({c_count, oh, ow});
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t cc = 0; cc < static_cast<std::ptrdiff_t>(c_count); ++cc) {
    const auto c = static_cast<std::size_t>(cc);
    const float* plane = input.data().data() + c * h * w;
    for (std::size_t oy = 0; oy < oh; ++oy) {
      for (std::size_t ox = 0; ox < ow; ++ox) {
        float best = plane[oy * step * w + ox * step];
        for (std::size_t ky = 0; ky < win; ++ky) {
          for (std::size_t kx = 0; kx < win; ++kx) {
            best = std::max(best, plane[(oy * step + ky) * w + ox * step + kx]);
          }
        }
        out[(c * oh + oy) * ow + ox] = best;
      }
    }
  }
  return out;
}

Tensor relu(Tensor t) {
  for (float& v : t.data()) v = v > 0.0f ? v : 0.0f;
  return t;
}

Tensor apply_activation(Tensor t, Activation activation) {
  switch (activation.kind) {
    case Activation::Kind::sigmoid:
      for (float& v : t.data()) v = static_cast<float>(1.0 / (1.0 + std::exp(-static_cast<double>(v))));
      break;
    case Activation::Kind::tanh:
      for (float& v : t.data()) v = std::tanh(v);
      break;
    case Activation::Kind::leaky_relu:
      if (!(activation.alpha >= 0.0f)) {
        throw ConfigError("leaky_relu: alpha must be non-negative");
      }
      for (float& v : t.data()) v = v > 0.0f ? v : activation.alpha * v;
      break;
  }
  return t;
}

Tensor dense(const Tensor& x, const Tensor& weights, const Tensor& bias) {
  if (weights.rank() != 2) {
    throw ShapeError("dense: weights must be K x F, got " + to_string(weights.shape()));
  }
  const std::size_t k_count = weights.dim(0), f_count = weights.dim(1);
  if (x.size() != f_count) {
    throw ShapeError("dense: input has " + std::to_string(x.size()) +
                     " features but weights are " + to_string(weights.shape()));
  }
  if (bias.rank() != 1 || bias.dim(0) != k_count) {
    throw ShapeError("dense: bias must have length " + std::to_string(k_count) + ", got " +
                     to_string(bias.shape()));
  }
  Tensor out({k_count});
  const float* xv = x.data().data();
  for (std::size_t k = 0; k < k_count; ++k) {
    const float* wr = weights.data().data() + k * f_count;
    double acc = 0.0;
    for (std::size_t f = 0; f < f_count; ++f) {
      acc += static_cast<double>(wr[f]) * static_cast<double>(xv[f]);
    }
    out[k] = static_cast<float>(acc + static_cast<double>(bias[k]));
  }
  return out;
}

Tensor dense_batch(const Tensor& x, const Tensor& weights, const Tensor& bias) {
  if (x.rank() != 2 || weights.rank() != 2 || x.dim(1) != weights.dim(1)) {
    throw ShapeError("dense_batch: cannot apply weights " + to_string(weights.shape()) +
                     " to batch " + to_string(x.shape()));
  }
  const std::size_t batch = x.dim(0), k_count = weights.dim(0), f_count = weights.dim(1);
  if (bias.rank() != 1 || bias.dim(0) != k_count) {
    throw ShapeError("dense_batch: bias must have length " + std::to_string(k_count) +
                     ", got " + to_string(bias.shape()));
  }
  Tensor transposed({k_count, batch});
  const float* xv = x.data().data();
  auto pack = [&](std::size_t n0, std::size_t width, float* panel) {
    using detail::kPanelWidth;
    for (std::size_t f = 0; f < f_count; ++f) {
      float* row = panel + f * kPanelWidth;
      for (std::size_t j = 0; j < width; ++j) row[j] = xv[(n0 + j) * f_count + f];
      for (std::size_t j = width; j < kPanelWidth; ++j) row[j] = 0.0f;
    }
  };
  detail::gemm_packed(k_count, batch, f_count, weights.data().data(), bias.data().data(),
                      transposed.data().data(), batch, pack);
  Tensor out({batch, k_count});
  for (std::size_t k = 0; k < k_count; ++k) {
    for (std::size_t b = 0; b < batch; ++b) out[b * k_count + k] = transposed[k * batch + b];
  }
  return out;
}

Tensor flatten(Tensor t) {
  const std::size_t n = t.size();
  return std::move(t).reshaped({n});
}

Tensor softmax(const Tensor& logits) {
  require_rank1(logits, "softmax");
  const auto values = logits.data();
  if (!std::all_of(values.begin(), values.end(), [](float v) { return std::isfinite(v); })) {
    throw NumericError("softmax: logits must be finite");
  }
  const double peak = *std::max_element(values.begin(), values.end());
  std::vector<double> e(values.size());
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    e[i] = std::exp(static_cast<double>(values[i]) - peak);
    total += e[i];
  }
  Tensor out(logits.shape());
  constexpr float floor = std::numeric_limits<float>::denorm_min();
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = std::max(static_cast<float>(e[i] / total), floor);
  }
  return out;
}

double cross_entropy(const Tensor& probs, std::size_t label) {
  require_rank1(probs, "cross_entropy");
  if (label >= probs.size()) {
    throw ConfigError("cross_entropy: label " + std::to_string(label) + " outside [0, " +
                      std::to_string(probs.size()) + ")");
  }
  return -std::log(std::max(static_cast<double>(probs[label]), kProbabilityFloor));
}

std::size_t argmax(std::span<const float> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

}  // namespace leafvgg
