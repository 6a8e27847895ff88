#pragma once

// Blocked float32 GEMM with float64 accumulation.
//
// C(m, n) = float(bias[m] + sum_k A(m, k) * B(k, n)) where the sum runs over
// k in ascending order for every output element. B is never materialised: a
// packer fills one K x kPanelWidth panel at a time, which lets convolution
// build its im2col columns on the fly.

#include <algorithm>
#include <cstddef>
#include <vector>

namespace leafvgg::detail {

inline constexpr std::size_t kPanelWidth = 16;
inline constexpr std::size_t kRowBlock = 4;

/// acc[r * kPanelWidth + j] = sum_k a[r * lda + k] * panel[k * kPanelWidth + j]
/// for r < rows (rows <= kRowBlock).
void accumulate_block(std::size_t rows, std::size_t depth, const float* a, std::size_t lda,
                      const float* panel, double* acc);

/// `pack(n0, width, panel)` must write panel[k * kPanelWidth + j] = B(k, n0 + j)
/// for j < width and 0 for width <= j < kPanelWidth.
template <class Packer>
void gemm_packed(std::size_t m_count, std::size_t n_count, std::size_t depth, const float* a,
                 const float* bias, float* c, std::size_t ldc, Packer&& pack) {
  const std::size_t strips = (n_count + kPanelWidth - 1) / kPanelWidth;
#pragma omp parallel
  {
    std::vector<float> panel(depth * kPanelWidth);
    double acc[kRowBlock * kPanelWidth];
#pragma omp for schedule(static)
    for (std::ptrdiff_t s = 0; s < static_cast<std::ptrdiff_t>(strips); ++s) {
      const std::size_t n0 = static_cast<std::size_t>(s) * kPanelWidth;
      const std::size_t width = std::min(kPanelWidth, n_count - n0);
      pack(n0, width, panel.data());
      for (std::size_t m0 = 0; m0 < m_count; m0 += kRowBlock) {
        const std::size_t rows = std::min(kRowBlock, m_count - m0);
        accumulate_block(rows, depth, a + m0 * depth, depth, panel.data(), acc);
        for (std::size_t r = 0; r < rows; ++r) {
          const double b = bias ? static_cast<double>(bias[m0 + r]) : 0.0;
          float* out = c + (m0 + r) * ldc + n0;
          for (std::size_t j = 0; j < width; ++j) {
            out[j] = static_cast<float>(acc[r * kPanelWidth + j] + b);
          }
        }
      }
    }
  }
}

}  // namespace leafvgg::detail
