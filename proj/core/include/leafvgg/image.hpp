#pragma once

// Image decoding and the fixed preprocessing steps. Images are float
// tensors of shape 3 x H x W (RGB, channels first).

#include <cstdint>
#include <filesystem>
#include <span>

#include "leafvgg/tensor.hpp"

namespace leafvgg {

/// PNG, baseline JPEG or binary PPM (P6), detected from the leading bytes.
/// Values are 0..255 widened to float; grayscale is replicated to three
/// channels and alpha is dropped. Throws DataError: missing_path,
/// unsupported_format, corrupt_image.
Tensor decode_image(const std::filesystem::path& path);

/// Writes 8-bit RGB (values rounded and clamped to 0..255).
void write_ppm(const Tensor& image, const std::filesystem::path& path);
void write_png(const Tensor& image, const std::filesystem::path& path);
/// Single-channel PNG from H*W bytes.
void write_gray_png(std::span<const std::uint8_t> pixels, std::size_t height, std::size_t width,
                    const std::filesystem::path& path);

/// Bilinear resize with half-pixel centres (align_corners = false); source
/// coordinates are clamped to the border.
Tensor resize_bilinear(const Tensor& image, std::size_t out_height, std::size_t out_width);
inline Tensor resize_bilinear(const Tensor& image, std::size_t out_side) {
  return resize_bilinear(image, out_side, out_side);
}

/// x / 255.
Tensor rescale(Tensor image);

/// Per-channel (x - mean) / std after rescale, ImageNet statistics.
Tensor normalize_imagenet(Tensor image);

enum class Normalization { paper_1_255, imagenet };

/// resize -> rescale [-> imagenet normalisation].
Tensor preprocess(const Tensor& image, std::size_t side, Normalization mode);

}  // namespace leafvgg
