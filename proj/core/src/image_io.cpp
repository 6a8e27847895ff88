#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

// jpeglib.h needs size_t and FILE declared first.
#include <jpeglib.h>

#include "leafvgg/error.hpp"
#include "leafvgg/image.hpp"

namespace fs = std::filesystem;

namespace leafvgg {

namespace {

std::vector<unsigned char> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(DataErrc::missing_path, "cannot open image " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  return bytes;
}

Tensor from_interleaved(const unsigned char* pixels, std::size_t h, std::size_t w,
                        std::size_t channels) {
  Tensor out({3, h, w});
  float* dst = out.data().data();
  const std::size_t plane = h * w;
  for (std::size_t i = 0; i < plane; ++i) {
    for (std::size_t c = 0; c < 3; ++c) {
      const std::size_t src_c = channels == 1 ? 0 : c;
      dst[c * plane + i] = static_cast<float>(pixels[i * channels + src_c]);
    }
  }
  return out;
}

Tensor decode_png(const std::vector<unsigned char>& bytes, const fs::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw DataError(DataErrc::corrupt_image, path.string() + ": " + image.message);
  }
  image.format = PNG_FORMAT_RGB;
  std::vector<unsigned char> pixels(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, pixels.data(), 0, nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    throw DataError(DataErrc::corrupt_image, path.string() + ": " + msg);
  }
  return from_interleaved(pixels.data(), image.height, image.width, 3);
}

struct JpegErrorManager {
  jpeg_error_mgr pub;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

extern "C" void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

extern "C" void jpeg_quiet(j_common_ptr, int) {}

struct JpegResult {
  unsigned char* pixels = nullptr;  // malloc'd
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;
  long warnings = 0;
};

// Only trivially destructible locals live between setjmp and longjmp here.
bool decode_jpeg_raw(const unsigned char* data, std::size_t size, JpegResult& result,
                     JpegErrorManager& err) {
  jpeg_decompress_struct cinfo;
  cinfo.err = jpeg_std_error(&err.pub);
  err.pub.error_exit = jpeg_error_exit;
  err.pub.emit_message = jpeg_quiet;
  err.message[0] = '\0';
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    std::free(result.pixels);
    result.pixels = nullptr;
    return false;
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, data, static_cast<unsigned long>(size));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = cinfo.num_components == 1 ? JCS_GRAYSCALE : JCS_RGB;
  jpeg_start_decompress(&cinfo);
  result.height = cinfo.output_height;
  result.width = cinfo.output_width;
  result.channels = static_cast<std::size_t>(cinfo.output_components);
  result.pixels =
      static_cast<unsigned char*>(std::malloc(result.height * result.width * result.channels));
  if (!result.pixels) {
    jpeg_destroy_decompress(&cinfo);
    return false;
  }
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = result.pixels + static_cast<std::size_t>(cinfo.output_scanline) *
                                       result.width * result.channels;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  result.warnings = err.pub.num_warnings;
  jpeg_destroy_decompress(&cinfo);
  return true;
}

Tensor decode_jpeg(const std::vector<unsigned char>& bytes, const fs::path& path) {
  JpegResult result;
  JpegErrorManager err;
  if (!decode_jpeg_raw(bytes.data(), bytes.size(), result, err)) {
    throw DataError(DataErrc::corrupt_image, path.string() + ": " + err.message);
  }
  std::unique_ptr<unsigned char, decltype(&std::free)> owned(result.pixels, &std::free);
  if (result.warnings > 0) {
    throw DataError(DataErrc::corrupt_image, path.string() + ": corrupt or truncated JPEG stream");
  }
  if (result.channels != 1 && result.channels != 3) {
    throw DataError(DataErrc::unsupported_format, path.string() + ": unsupported JPEG channel count");
  }
  return from_interleaved(owned.get(), result.height, result.width, result.channels);
}

class PpmHeader {
 public:
  PpmHeader(const std::vector<unsigned char>& bytes, const fs::path& path)
      : bytes_(bytes), path_(path) {
    pos_ = 2;  // "P6"
    width = next_number();
    height = next_number();
    maxval = next_number();
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) corrupt("malformed header");
    ++pos_;
    if (width == 0 || height == 0) corrupt("zero image extent");
    if (maxval == 0 || maxval > 255) {
      throw DataError(DataErrc::unsupported_format,
                      path_.string() + ": only 8-bit PPM (maxval <= 255) is supported");
    }
  }

  std::size_t data_offset() const { return pos_; }
  std::size_t width = 0, height = 0, maxval = 0;

 private:
  [[noreturn]] void corrupt(const std::string& why) const {
    throw DataError(DataErrc::corrupt_image, path_.string() + ": " + why);
  }

  std::size_t next_number() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) corrupt("malformed header");
    std::size_t v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + static_cast<std::size_t>(bytes_[pos_] - '0');
      if (v > (1u << 24)) corrupt("implausible header value");
      ++pos_;
    }
    return v;
  }

  const std::vector<unsigned char>& bytes_;
  const fs::path& path_;
  std::size_t pos_ = 0;
};

Tensor decode_ppm(const std::vector<unsigned char>& bytes, const fs::path& path) {
  PpmHeader header(bytes, path);
  const std::size_t need = header.width * header.height * 3;
  if (bytes.size() - header.data_offset() < need) {
    throw DataError(DataErrc::corrupt_image, path.string() + ": truncated pixel data");
  }
  Tensor out = from_interleaved(bytes.data() + header.data_offset(), header.height, header.width, 3);
  if (header.maxval != 255) {
    const float scale = 255.0f / static_cast<float>(header.maxval);
    for (float& v : out.data()) v = std::min(v, static_cast<float>(header.maxval)) * scale;
  }
  return out;
}

std::vector<unsigned char> to_interleaved(const Tensor& image, std::size_t channels) {
  if (image.rank() != 3 || image.dim(0) != channels) {
    throw ShapeError("expected a " + std::to_string(channels) + " x H x W image, got " +
                     to_string(image.shape()));
  }
  const std::size_t plane = image.dim(1) * image.dim(2);
  std::vector<unsigned char> out(plane * channels);
  for (std::size_t i = 0; i < plane; ++i) {
    for (std::size_t c = 0; c < channels; ++c) {
      const float v = std::clamp(std::round(image[c * plane + i]), 0.0f, 255.0f);
      out[i * channels + c] = static_cast<unsigned char>(v);
    }
  }
  return out;
}

}  // namespace

Tensor decode_image(const fs::path& path) {
  const auto bytes = read_file(path);
  static constexpr unsigned char png_sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
  if (bytes.size() >= 8 && std::memcmp(bytes.data(), png_sig, 8) == 0) return decode_png(bytes, path);
  if (bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF) {
    return decode_jpeg(bytes, path);
  }
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '6') return decode_ppm(bytes, path);
  throw DataError(DataErrc::unsupported_format,
                  path.string() + ": not a PNG, JPEG or binary PPM (P6) file");
}

void write_ppm(const Tensor& image, const fs::path& path) {
  const auto pixels = to_interleaved(image, 3);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(DataErrc::io, "cannot write " + path.string());
  out << "P6\n" << image.dim(2) << ' ' << image.dim(1) << "\n255\n";
  out.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
  if (!out) throw DataError(DataErrc::io, "failed writing " + path.string());
}

namespace {

void write_png_pixels(const unsigned char* pixels, std::size_t height, std::size_t width,
                      png_uint_32 format, const fs::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width);
  image.height = static_cast<png_uint_32>(height);
  image.format = format;
  if (!png_image_write_to_file(&image, path.c_str(), 0, pixels, 0, nullptr)) {
    throw DataError(DataErrc::io, "cannot write " + path.string() + ": " + image.message);
  }
}

}  // namespace

void write_png(const Tensor& image, const fs::path& path) {
  const auto pixels = to_interleaved(image, 3);
  write_png_pixels(pixels.data(), image.dim(1), image.dim(2), PNG_FORMAT_RGB, path);
}

void write_gray_png(std::span<const std::uint8_t> pixels, std::size_t height, std::size_t width,
                    const fs::path& path) {
  if (pixels.size() != height * width) throw ShapeError("write_gray_png: pixel count mismatch");
  write_png_pixels(pixels.data(), height, width, PNG_FORMAT_GRAY, path);
}

}  // namespace leafvgg
