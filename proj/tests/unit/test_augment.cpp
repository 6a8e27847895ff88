#include <gtest/gtest.h>

#include "leafvgg/augment.hpp"
#include "leafvgg/error.hpp"
#include "support.hpp"

using namespace leafvgg;
using leafvgg::testing::random_tensor;

namespace {

float at(const Tensor& t, std::size_t c, std::size_t y, std::size_t x) {
  return t[(c * t.dim(1) + y) * t.dim(2) + x];
}

}  // namespace

TEST(Affine, IdentityParametersAreExact) {
  Prng rng(1);
  const Tensor img = random_tensor({3, 9, 7}, rng, 0, 255);
  EXPECT_EQ(apply_affine(img, AffineParams{}), img);
}

TEST(Affine, QuarterTurnMatchesRot90) {
  // +90 degrees is counter-clockwise on screen: out[i][j] = in[j][n-1-i].
  Prng rng(2);
  const std::size_t n = 8;
  const Tensor img = random_tensor({2, n, n}, rng, 0, 255);
  AffineParams p;
  p.rotation_degrees = 90.0;
  const Tensor out = apply_affine(img, p);
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        ASSERT_NEAR(at(out, c, i, j), at(img, c, j, n - 1 - i), 1e-3);
      }
    }
  }
}

TEST(Affine, FlipsMirrorAxes) {
  Prng rng(3);
  const Tensor img = random_tensor({1, 5, 6}, rng, 0, 255);
  AffineParams h;
  h.h_flip = true;
  AffineParams v;
  v.v_flip = true;
  const Tensor oh = apply_affine(img, h), ov = apply_affine(img, v);
  for (std::size_t y = 0; y < 5; ++y) {
    for (std::size_t x = 0; x < 6; ++x) {
      EXPECT_FLOAT_EQ(at(oh, 0, y, x), at(img, 0, y, 5 - x));
      EXPECT_FLOAT_EQ(at(ov, 0, y, x), at(img, 0, 4 - y, x));
    }
  }
}

TEST(Affine, IntegerShiftWithBorderReplication) {
  Prng rng(4);
  const Tensor img = random_tensor({1, 4, 5}, rng, 0, 255);
  AffineParams p;
  p.shift_x = 2.0;
  const Tensor out = apply_affine(img, p);
  for (std::size_t y = 0; y < 4; ++y) {
    for (std::size_t x = 0; x < 5; ++x) {
      EXPECT_FLOAT_EQ(at(out, 0, y, x), at(img, 0, y, x >= 2 ? x - 2 : 0));
    }
  }
}

TEST(Affine, ZoomKeepsCentreAndConstants) {
  Prng rng(5);
  const Tensor img = random_tensor({1, 7, 7}, rng, 0, 255);
  AffineParams p;
  p.zoom = 1.1;
  EXPECT_FLOAT_EQ(at(apply_affine(img, p), 0, 3, 3), at(img, 0, 3, 3));
  const Tensor flat = Tensor::filled({3, 6, 6}, 42.0f);
  p.rotation_degrees = 17.0;
  p.shear_degrees = 5.0;
  const Tensor out = apply_affine(flat, p);
  for (float v : out.data()) EXPECT_NEAR(v, 42.0f, 1e-4);
}

TEST(Affine, FullTurnIsNearIdentity) {
  Prng rng(6);
  const Tensor img = random_tensor({1, 6, 6}, rng, 0, 255);
  AffineParams p;
  p.rotation_degrees = 360.0;
  const Tensor out = apply_affine(img, p);
  for (std::size_t i = 0; i < img.size(); ++i) EXPECT_NEAR(out[i], img[i], 1e-3);
}

TEST(Sampling, AlwaysSevenDraws) {
  for (const AugmentConfig& cfg : {AugmentConfig{}, AugmentConfig::identity(),
                                   AugmentConfig{10, 0.5, 2.0, true, true, 10, 0.1}}) {
    Prng a(9), b(9);
    sample_affine(cfg, 16, 16, a);
    for (int i = 0; i < kAugmentDraws; ++i) b.next();
    EXPECT_EQ(a, b);
  }
}

TEST(Sampling, WithinConfiguredRanges) {
  Prng rng(10);
  const AugmentConfig cfg;  // rotation 30, zoom 0.9..1.1
  for (int i = 0; i < 2000; ++i) {
    const AffineParams p = sample_affine(cfg, 256, 256, rng);
    ASSERT_LE(std::abs(p.rotation_degrees), 30.0);
    ASSERT_GE(p.zoom, 0.9);
    ASSERT_LE(p.zoom, 1.1);
    ASSERT_FALSE(p.h_flip || p.v_flip);
    ASSERT_EQ(p.shear_degrees, 0.0);
    ASSERT_EQ(p.shift_x, 0.0);
  }
  const AffineParams id = sample_affine(AugmentConfig::identity(), 8, 8, rng);
  EXPECT_EQ(id.zoom, 1.0);
  EXPECT_EQ(id.rotation_degrees, 0.0);
}

TEST(Sampling, SameSeedSameOutput) {
  Prng rng(11);
  const Tensor img = random_tensor({3, 12, 12}, rng, 0, 255);
  Prng a(12), b(12);
  EXPECT_EQ(augment(img, AugmentConfig{}, a), augment(img, AugmentConfig{}, b));
}

TEST(Sampling, ValidateRejectsBadRanges) {
  EXPECT_THROW((AugmentConfig{-1, 0.9, 1.1}.validate()), ConfigError);
  EXPECT_THROW((AugmentConfig{30, 0.0, 1.1}.validate()), ConfigError);
  EXPECT_THROW((AugmentConfig{30, 1.2, 1.1}.validate()), ConfigError);
  EXPECT_NO_THROW(AugmentConfig{}.validate());
}

TEST(Affine, EmbeddedPatternQuarterTurn) {
  // asymmetric 2x2 block in the middle of a 6x6 field
  Tensor img({1, 6, 6});
  const float pattern[2][2] = {{1, 2}, {3, 4}};
  for (std::size_t y = 0; y < 2; ++y) {
    for (std::size_t x = 0; x < 2; ++x) img[(2 + y) * 6 + 2 + x] = pattern[y][x];
  }
  AffineParams p;
  p.rotation_degrees = 90.0;
  const Tensor out = apply_affine(img, p);
  // counter-clockwise: top row becomes {2, 4}, bottom row {1, 3}
  const float expected[2][2] = {{2, 4}, {1, 3}};
  for (std::size_t y = 0; y < 6; ++y) {
    for (std::size_t x = 0; x < 6; ++x) {
      const bool inside = y >= 2 && y < 4 && x >= 2 && x < 4;
      EXPECT_NEAR(at(out, 0, y, x), inside ? expected[y - 2][x - 2] : 0.0f, 1e-5) << y << "," << x;
    }
  }
}
