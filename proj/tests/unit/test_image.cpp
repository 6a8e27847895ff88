#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>

#include <jpeglib.h>

#include "leafvgg/error.hpp"
#include "leafvgg/image.hpp"
#include "support.hpp"

using namespace leafvgg;
namespace fs = std::filesystem;
using leafvgg::testing::TempDir;

namespace {

Tensor gradient_image(std::size_t h, std::size_t w) {
  Tensor t({3, h, w});
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        t[(c * h + y) * w + x] = static_cast<float>((c * 60 + y * 7 + x * 3) % 256);
      }
    }
  }
  return t;
}

void write_jpeg(const fs::path& path, const std::vector<unsigned char>& pixels, int w, int h,
                int components) {
  FILE* f = std::fopen(path.c_str(), "wb");
  ASSERT_NE(f, nullptr);
  jpeg_compress_struct cinfo;
  jpeg_error_mgr jerr;
  cinfo.err = jpeg_std_error(&jerr);
  jpeg_create_compress(&cinfo);
  jpeg_stdio_dest(&cinfo, f);
  cinfo.image_width = static_cast<JDIMENSION>(w);
  cinfo.image_height = static_cast<JDIMENSION>(h);
  cinfo.input_components = components;
  cinfo.in_color_space = components == 1 ? JCS_GRAYSCALE : JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, 100, TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  while (cinfo.next_scanline < cinfo.image_height) {
    JSAMPROW row = const_cast<unsigned char*>(pixels.data()) +
                   static_cast<std::size_t>(cinfo.next_scanline) * w * components;
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);
  std::fclose(f);
}

DataErrc decode_error(const fs::path& p) {
  try {
    decode_image(p);
  } catch (const DataError& e) {
    return e.code();
  }
  ADD_FAILURE() << "decoded " << p;
  return DataErrc::io;
}

// Half-pixel bilinear written independently: sample at continuous source
// coordinates with clamping.
double bilinear_oracle(const Tensor& img, std::size_t c, double sy, double sx) {
  const auto h = static_cast<double>(img.dim(1)), w = static_cast<double>(img.dim(2));
  sy = std::min(std::max(sy, 0.0), h - 1);
  sx = std::min(std::max(sx, 0.0), w - 1);
  const auto y0 = static_cast<std::size_t>(sy), x0 = static_cast<std::size_t>(sx);
  const std::size_t y1 = std::min<std::size_t>(y0 + 1, img.dim(1) - 1);
  const std::size_t x1 = std::min<std::size_t>(x0 + 1, img.dim(2) - 1);
  const double fy = sy - y0, fx = sx - x0;
  auto at = [&](std::size_t y, std::size_t x) {
    return static_cast<double>(img[(c * img.dim(1) + y) * img.dim(2) + x]);
  };
  return (1 - fy) * ((1 - fx) * at(y0, x0) + fx * at(y0, x1)) +
         fy * ((1 - fx) * at(y1, x0) + fx * at(y1, x1));
}

}  // namespace

TEST(Decode, PngRoundTripIsExact) {
  TempDir dir;
  const Tensor img = gradient_image(9, 13);
  write_png(img, dir / "a.png");
  EXPECT_EQ(decode_image(dir / "a.png"), img);
}

TEST(Decode, PpmRoundTripAndHeaderComments) {
  TempDir dir;
  const Tensor img = gradient_image(5, 4);
  write_ppm(img, dir / "a.ppm");
  EXPECT_EQ(decode_image(dir / "a.ppm"), img);

  leafvgg::testing::write_text(dir / "b.ppm", std::string("P6\n# comment\n2 1\n15\n") +
                                                  std::string("\x0f\x00\x05\x00\x0f\x0f", 6));
  const Tensor b = decode_image(dir / "b.ppm");
  EXPECT_EQ(b.shape(), (Shape{3, 1, 2}));
  EXPECT_FLOAT_EQ(b[0], 255.0f);  // red of pixel 0
  EXPECT_FLOAT_EQ(b[2], 0.0f);    // green of pixel 0
  EXPECT_FLOAT_EQ(b[4], 85.0f);   // blue of pixel 0: 5 * 255 / 15
}

TEST(Decode, JpegCloseToSource) {
  TempDir dir;
  const std::size_t h = 16, w = 16;
  const Tensor img = gradient_image(h, w);
  std::vector<unsigned char> rgb(h * w * 3);
  for (std::size_t i = 0; i < h * w; ++i) {
    for (std::size_t c = 0; c < 3; ++c) rgb[i * 3 + c] = static_cast<unsigned char>(img[c * h * w + i]);
  }
  write_jpeg(dir / "a.jpg", rgb, static_cast<int>(w), static_cast<int>(h), 3);
  const Tensor back = decode_image(dir / "a.jpg");
  ASSERT_EQ(back.shape(), img.shape());
  double mean_err = 0.0;
  for (std::size_t i = 0; i < img.size(); ++i) mean_err += std::abs(back[i] - img[i]);
  EXPECT_LT(mean_err / static_cast<double>(img.size()), 6.0);
}

TEST(Decode, GrayscaleJpegIsReplicated) {
  TempDir dir;
  std::vector<unsigned char> gray(8 * 8, 128);
  write_jpeg(dir / "g.jpg", gray, 8, 8, 1);
  const Tensor back = decode_image(dir / "g.jpg");
  ASSERT_EQ(back.shape(), (Shape{3, 8, 8}));
  for (std::size_t i = 0; i < 64; ++i) {
    EXPECT_EQ(back[i], back[64 + i]);
    EXPECT_EQ(back[i], back[128 + i]);
  }
}

TEST(Decode, ErrorKinds) {
  TempDir dir;
  EXPECT_EQ(decode_error(dir / "missing.png"), DataErrc::missing_path);
  leafvgg::testing::write_text(dir / "x.png", "hello world, not an image");
  EXPECT_EQ(decode_error(dir / "x.png"), DataErrc::unsupported_format);

  write_png(gradient_image(20, 20), dir / "t.png");
  auto bytes = leafvgg::testing::read_text(dir / "t.png");
  leafvgg::testing::write_text(dir / "t.png", bytes.substr(0, bytes.size() / 2));
  EXPECT_EQ(decode_error(dir / "t.png"), DataErrc::corrupt_image);

  std::vector<unsigned char> rgb(32 * 32 * 3, 90);
  write_jpeg(dir / "t.jpg", rgb, 32, 32, 3);
  bytes = leafvgg::testing::read_text(dir / "t.jpg");
  leafvgg::testing::write_text(dir / "t.jpg", bytes.substr(0, bytes.size() / 2));
  EXPECT_EQ(decode_error(dir / "t.jpg"), DataErrc::corrupt_image);

  leafvgg::testing::write_text(dir / "p.ppm", "P6\n4 4\n255\n\x01\x02");
  EXPECT_EQ(decode_error(dir / "p.ppm"), DataErrc::corrupt_image);
  leafvgg::testing::write_text(dir / "q.ppm", "P6\n1 1\n65535\n\x01\x02\x03\x04\x05\x06");
  EXPECT_EQ(decode_error(dir / "q.ppm"), DataErrc::unsupported_format);
}

TEST(Resize, IdentityIsExact) {
  const Tensor img = gradient_image(7, 7);
  EXPECT_EQ(resize_bilinear(img, 7), img);
}

TEST(Resize, HalvingAveragesBlocks) {
  const Tensor img = gradient_image(8, 8);
  const Tensor half = resize_bilinear(img, 4);
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t y = 0; y < 4; ++y) {
      for (std::size_t x = 0; x < 4; ++x) {
        auto at = [&](std::size_t yy, std::size_t xx) { return img[(c * 8 + yy) * 8 + xx]; };
        const double avg = (at(2 * y, 2 * x) + at(2 * y, 2 * x + 1) + at(2 * y + 1, 2 * x) +
                            at(2 * y + 1, 2 * x + 1)) / 4.0;
        EXPECT_NEAR(half[(c * 4 + y) * 4 + x], avg, 1e-4);
      }
    }
  }
}

TEST(Resize, MatchesContinuousOracle) {
  Prng rng(8);
  for (int n = 0; n < 40; ++n) {
    const std::size_t h = 1 + rng.below(12), w = 1 + rng.below(12);
    const std::size_t oh = 1 + rng.below(20), ow = 1 + rng.below(20);
    const Tensor img = leafvgg::testing::random_tensor({3, h, w}, rng, 0, 255);
    const Tensor out = resize_bilinear(img, oh, ow);
    ASSERT_EQ(out.shape(), (Shape{3, oh, ow}));
    for (std::size_t c = 0; c < 3; ++c) {
      for (std::size_t y = 0; y < oh; ++y) {
        for (std::size_t x = 0; x < ow; ++x) {
          const double sy = (y + 0.5) * h / static_cast<double>(oh) - 0.5;
          const double sx = (x + 0.5) * w / static_cast<double>(ow) - 0.5;
          ASSERT_NEAR(out[(c * oh + y) * ow + x], bilinear_oracle(img, c, sy, sx), 1e-3);
        }
      }
    }
  }
}

TEST(Preprocess, ScalesAndNormalises) {
  const Tensor white = Tensor::filled({3, 10, 10}, 255.0f);
  const Tensor x = preprocess(white, 4, Normalization::paper_1_255);
  EXPECT_EQ(x.shape(), (Shape{3, 4, 4}));
  for (float v : x.data()) EXPECT_FLOAT_EQ(v, 1.0f);

  Tensor mean_rgb({3, 2, 2});
  const float mean[3] = {0.485f, 0.456f, 0.406f};
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t i = 0; i < 4; ++i) mean_rgb[c * 4 + i] = mean[c] * 255.0f;
  }
  const Tensor n = preprocess(mean_rgb, 2, Normalization::imagenet);
  for (float v : n.data()) EXPECT_NEAR(v, 0.0, 1e-6);
  const Tensor one = normalize_imagenet(Tensor::filled({3, 1, 1}, 1.0f));
  EXPECT_NEAR(one[0], (1.0 - 0.485) / 0.229, 1e-5);
  EXPECT_NEAR(one[2], (1.0 - 0.406) / 0.225, 1e-5);
}
