#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "leafvgg/error.hpp"
#include "leafvgg/ops.hpp"
#include "leafvgg/parallel.hpp"
#include "support.hpp"

using namespace leafvgg;
using leafvgg::testing::random_tensor;

namespace {

// Independent brute-force oracles: double throughout, loops arranged
// differently from the library.
std::vector<double> conv_oracle(const Tensor& x, const Tensor& w, const Tensor& b, int stride,
                                int pad) {
  const long cin = static_cast<long>(x.dim(0)), h = static_cast<long>(x.dim(1)),
             wd = static_cast<long>(x.dim(2));
  const long cout = static_cast<long>(w.dim(0)), kh = static_cast<long>(w.dim(2)),
             kw = static_cast<long>(w.dim(3));
  const long oh = (h + 2 * pad - kh) / stride + 1, ow = (wd + 2 * pad - kw) / stride + 1;
  std::vector<double> out(static_cast<std::size_t>(cout * oh * ow));
  for (long o = 0; o < cout; ++o) {
    for (long y = 0; y < oh; ++y) {
      for (long xo = 0; xo < ow; ++xo) {
        double s = b[static_cast<std::size_t>(o)];
        for (long dy = 0; dy < kh; ++dy) {
          for (long dx = 0; dx < kw; ++dx) {
            for (long c = 0; c < cin; ++c) {
              const long iy = y * stride + dy - pad, ix = xo * stride + dx - pad;
              if (iy < 0 || ix < 0 || iy >= h || ix >= wd) continue;
              s += static_cast<double>(x[static_cast<std::size_t>((c * h + iy) * wd + ix)]) *
                   w[static_cast<std::size_t>(((o * cin + c) * kh + dy) * kw + dx)];
            }
          }
        }
        out[static_cast<std::size_t>((o * oh + y) * ow + xo)] = s;
      }
    }
  }
  return out;
}

double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

}  // namespace

TEST(Conv2d, HandComputedWindowSums) {
  Tensor x({1, 3, 3}, {1, 2, 3, 4, 5, 6, 7, 8, 9});
  Tensor w = Tensor::filled({1, 1, 2, 2}, 1.0f);
  Tensor b({1}, {0.5f});
  const Tensor y = conv2d(x, w, b);
  EXPECT_EQ(y.shape(), (Shape{1, 2, 2}));
  EXPECT_EQ(y.values(), (std::vector<float>{12.5f, 16.5f, 24.5f, 28.5f}));
}

TEST(Conv2d, ZeroPaddingKeepsSide) {
  Tensor x = Tensor::filled({2, 5, 5}, 1.0f);
  Tensor w = Tensor::filled({3, 2, 3, 3}, 1.0f);
  const Tensor y = conv2d(x, w, Tensor({3}), {1, 1});
  EXPECT_EQ(y.shape(), (Shape{3, 5, 5}));
  EXPECT_FLOAT_EQ(y[0], 8.0f);       // corner sees 2x2 of each channel
  EXPECT_FLOAT_EQ(y[2 * 5 + 2], 18.0f);  // interior sees 3x3
}

TEST(Conv2d, RandomInstancesMatchOracle) {
  Prng rng(101);
  int checked = 0;
  double worst = 0.0;
  while (checked < 150) {
    const std::size_t cin = 1 + rng.below(5), cout = 1 + rng.below(6);
    const std::size_t h = 1 + rng.below(10), w = 1 + rng.below(10);
    const std::size_t k = 1 + rng.below(4);
    const int stride = 1 + static_cast<int>(rng.below(3));
    const int pad = static_cast<int>(rng.below(3));
    if (h + 2 * pad < k || w + 2 * pad < k) continue;
    const Tensor x = random_tensor({cin, h, w}, rng);
    const Tensor wt = random_tensor({cout, cin, k, k}, rng);
    const Tensor b = random_tensor({cout}, rng);
    const Tensor fast = conv2d(x, wt, b, {stride, pad});
    const Tensor ref = conv2d_reference(x, wt, b, {stride, pad});
    const auto oracle = conv_oracle(x, wt, b, stride, pad);
    ASSERT_EQ(fast.size(), oracle.size());
    for (std::size_t i = 0; i < oracle.size(); ++i) {
      worst = std::max(worst, rel_err(fast[i], oracle[i]));
      ASSERT_LE(rel_err(fast[i], oracle[i]), 1e-5) << "instance " << checked << " element " << i;
      ASSERT_LE(rel_err(ref[i], oracle[i]), 1e-5);
    }
    EXPECT_EQ(fast, ref) << "fast and reference paths diverge on instance " << checked;
    ++checked;
  }
  RecordProperty("worst_rel_err", std::to_string(worst));
}

TEST(Conv2d, WideLayerFastMatchesReferenceExactly) {
  // Enough output channels and pixels to exercise full GEMM blocks and tails.
  Prng rng(5);
  const Tensor x = random_tensor({19, 13, 11}, rng);
  const Tensor w = random_tensor({37, 19, 3, 3}, rng);
  const Tensor b = random_tensor({37}, rng);
  EXPECT_EQ(conv2d(x, w, b, {1, 1}), conv2d_reference(x, w, b, {1, 1}));
}

TEST(Conv2d, ResultDoesNotDependOnThreadCount) {
  Prng rng(6);
  const Tensor x = random_tensor({8, 20, 20}, rng);
  const Tensor w = random_tensor({24, 8, 3, 3}, rng);
  const Tensor b = random_tensor({24}, rng);
  set_thread_count(1);
  const Tensor one = conv2d(x, w, b, {1, 1});
  set_thread_count(4);
  const Tensor four = conv2d(x, w, b, {1, 1});
  set_thread_count(0);
  EXPECT_EQ(one, four);
}

TEST(Conv2d, RejectsBadArguments) {
  const Tensor x({2, 4, 4});
  EXPECT_THROW(conv2d(x, Tensor({3, 1, 3, 3}), Tensor({3})), ShapeError);  // channel mismatch
  EXPECT_THROW(conv2d(x, Tensor({3, 2, 3, 3}), Tensor({2})), ShapeError);  // bias length
  EXPECT_THROW(conv2d(x, Tensor({3, 2, 5, 5}), Tensor({3})), ShapeError);  // kernel too large
  EXPECT_THROW(conv2d(x, Tensor({3, 2, 3, 3}), Tensor({3}), {0, 0}), ConfigError);
  EXPECT_THROW(conv2d(x, Tensor({3, 2, 3, 3}), Tensor({3}), {1, -1}), ConfigError);
  EXPECT_THROW(conv2d(Tensor({4, 4}), Tensor({3, 2, 3, 3}), Tensor({3})), ShapeError);
}

TEST(MaxPool, HandComputed) {
  Tensor x({1, 4, 4}, {1, 5, 2, 0, 3, 4, 8, 1, 0, 0, -1, -2, 9, 0, -3, -4});
  const Tensor y = maxpool2d(x, 2, 2);
  EXPECT_EQ(y.shape(), (Shape{1, 2, 2}));
  EXPECT_EQ(y.values(), (std::vector<float>{5, 8, 9, -1}));
}

TEST(MaxPool, OddSideDropsTrailingRow) {
  EXPECT_EQ(maxpool2d(Tensor({2, 5, 7}), 2, 2).shape(), (Shape{2, 2, 3}));
}

TEST(MaxPool, RandomInstancesMatchOracle) {
  Prng rng(202);
  for (int n = 0; n < 120; ++n) {
    const std::size_t c = 1 + rng.below(4), h = 2 + rng.below(9), w = 2 + rng.below(9);
    const int win = 1 + static_cast<int>(rng.below(3)), stride = 1 + static_cast<int>(rng.below(3));
    if (h < static_cast<std::size_t>(win) || w < static_cast<std::size_t>(win)) continue;
    const Tensor x = random_tensor({c, h, w}, rng, -5, 5);
    const Tensor y = maxpool2d(x, win, stride);
    const std::size_t oh = (h - win) / stride + 1, ow = (w - win) / stride + 1;
    ASSERT_EQ(y.shape(), (Shape{c, oh, ow}));
    for (std::size_t ch = 0; ch < c; ++ch) {
      for (std::size_t i = 0; i < oh; ++i) {
        for (std::size_t j = 0; j < ow; ++j) {
          float m = -std::numeric_limits<float>::infinity();
          for (int a = 0; a < win; ++a) {
            for (int b = 0; b < win; ++b) {
              m = std::max(m, x[(ch * h + i * stride + a) * w + j * stride + b]);
            }
          }
          ASSERT_EQ(y[(ch * oh + i) * ow + j], m);
        }
      }
    }
  }
}

TEST(MaxPool, RejectsBadWindow) {
  EXPECT_THROW(maxpool2d(Tensor({1, 4, 4}), 0, 2), ConfigError);
  EXPECT_THROW(maxpool2d(Tensor({1, 4, 4}), 2, 0), ConfigError);
  EXPECT_THROW(maxpool2d(Tensor({1, 1, 4}), 2, 2), ShapeError);
}

TEST(Dense, RandomInstancesMatchOracle) {
  Prng rng(303);
  for (int n = 0; n < 120; ++n) {
    const std::size_t f = 1 + rng.below(70), k = 1 + rng.below(20);
    const Tensor x = random_tensor({f}, rng);
    const Tensor w = random_tensor({k, f}, rng);
    const Tensor b = random_tensor({k}, rng);
    const Tensor y = dense(x, w, b);
    ASSERT_EQ(y.shape(), (Shape{k}));
    for (std::size_t r = 0; r < k; ++r) {
      double s = b[r];
      for (std::size_t i = 0; i < f; ++i) s += static_cast<double>(w[r * f + i]) * x[i];
      ASSERT_LE(rel_err(y[r], s), 1e-5);
    }
  }
}

TEST(Dense, BatchRowsEqualSingleRows) {
  Prng rng(304);
  const Tensor x = random_tensor({9, 33}, rng);
  const Tensor w = random_tensor({17, 33}, rng);
  const Tensor b = random_tensor({17}, rng);
  const Tensor y = dense_batch(x, w, b);
  ASSERT_EQ(y.shape(), (Shape{9, 17}));
  for (std::size_t r = 0; r < 9; ++r) {
    const Tensor row({33}, std::vector<float>(x.row(r).begin(), x.row(r).end()));
    const Tensor single = dense(row, w, b);
    for (std::size_t k = 0; k < 17; ++k) EXPECT_EQ(y[r * 17 + k], single[k]);
  }
}

TEST(Dense, AcceptsAnyInputShapeWithMatchingCount) {
  const Tensor x = Tensor::filled({2, 2, 3}, 1.0f);
  const Tensor w = Tensor::filled({2, 12}, 0.5f);
  EXPECT_EQ(dense(x, w, Tensor({2})).values(), (std::vector<float>{6.0f, 6.0f}));
  EXPECT_THROW(dense(x, Tensor({2, 11}), Tensor({2})), ShapeError);
}

TEST(Activations, PointValues) {
  const Tensor x({4}, {-2.0f, 0.0f, 1.0f, 3.0f});
  EXPECT_EQ(relu(x).values(), (std::vector<float>{0, 0, 1, 3}));
  const Tensor s = apply_activation(x, Activation::sigmoid());
  EXPECT_FLOAT_EQ(s[1], 0.5f);
  EXPECT_NEAR(s[3], 1.0 / (1.0 + std::exp(-3.0)), 1e-7);
  const Tensor t = apply_activation(x, Activation::tanh());
  EXPECT_NEAR(t[0], std::tanh(-2.0), 1e-7);
  const Tensor l = apply_activation(x, Activation::leaky_relu(0.1f));
  EXPECT_FLOAT_EQ(l[0], -0.2f);
  EXPECT_FLOAT_EQ(l[3], 3.0f);
  EXPECT_THROW(apply_activation(x, Activation::leaky_relu(-0.1f)), ConfigError);
}

TEST(Softmax, SumsToOneAndIsShiftInvariant) {
  Prng rng(404);
  for (int n = 0; n < 100; ++n) {
    const Tensor z = random_tensor({1 + rng.below(20)}, rng, -30, 30);
    const Tensor p = softmax(z);
    double sum = 0.0;
    for (float v : p.data()) {
      ASSERT_GT(v, 0.0f);
      ASSERT_LE(v, 1.0f);
      sum += v;
    }
    ASSERT_NEAR(sum, 1.0, 1e-5);
    Tensor shifted = z;
    for (float& v : shifted.data()) v += 7.25f;
    ASSERT_EQ(argmax(softmax(shifted).data()), argmax(p.data()));
  }
}

TEST(Softmax, HugeLogitsDoNotOverflow) {
  const Tensor p = softmax(Tensor({3}, {1000.0f, 999.0f, -1000.0f}));
  EXPECT_NEAR(p[0], 1.0 / (1.0 + std::exp(-1.0)), 1e-6);
  EXPECT_GT(p[2], 0.0f);
}

TEST(Softmax, UniformOnEqualLogits) {
  const Tensor p = softmax(Tensor::filled({15}, 3.0f));
  for (float v : p.data()) EXPECT_NEAR(v, 1.0 / 15.0, 1e-7);
}

TEST(CrossEntropy, FloorsZeroProbability) {
  const Tensor p({3}, {1.0f, 0.0f, 0.0f});
  EXPECT_NEAR(cross_entropy(p, 1), -std::log(1e-12), 1e-9);
  EXPECT_DOUBLE_EQ(cross_entropy(p, 0), 0.0);
  EXPECT_THROW(cross_entropy(p, 3), ConfigError);
}

TEST(Argmax, TiesGoToLowestIndex) {
  const std::vector<float> v = {0.1f, 0.4f, 0.4f, 0.1f};
  EXPECT_EQ(argmax(v), 1u);
}

TEST(Flatten, KeepsOrder) {
  Tensor t({2, 1, 2}, {1, 2, 3, 4});
  const Tensor f = flatten(t);
  EXPECT_EQ(f.shape(), (Shape{4}));
  EXPECT_EQ(f.values(), t.values());
}
