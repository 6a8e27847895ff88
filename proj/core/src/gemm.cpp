#include "gemm.hpp"

namespace leafvgg::detail {

namespace {

template <std::size_t Rows>
void accumulate_fixed(std::size_t depth, const float* a, std::size_t lda, const float* panel,
                      double* acc) {
  double c[Rows][kPanelWidth] = {};
  for (std::size_t k = 0; k < depth; ++k) {
    const float* p = panel + k * kPanelWidth;
    double av[Rows];
    for (std::size_t r = 0; r < Rows; ++r) av[r] = static_cast<double>(a[r * lda + k]);
    for (std::size_t j = 0; j < kPanelWidth; ++j) {
      const double bv = static_cast<double>(p[j]);
      for (std::size_t r = 0; r < Rows; ++r) c[r][j] += av[r] * bv;
    }
  }
  for (std::size_t r = 0; r < Rows; ++r) {
    for (std::size_t j = 0; j < kPanelWidth; ++j) acc[r * kPanelWidth + j] = c[r][j];
  }
}

}  // namespace

void accumulate_block(std::size_t rows, std::size_t depth, const float* a, std::size_t lda,
                      const float* panel, double* acc) {
  switch (rows) {
    case 4: accumulate_fixed<4>(depth, a, lda, panel, acc); break;
    case 3: accumulate_fixed<3>(depth, a, lda, panel, acc); break;
    case 2: accumulate_fixed<2>(depth, a, lda, panel, acc); break;
    default: accumulate_fixed<1>(depth, a, lda, panel, acc); break;
  }
}

}  // namespace leafvgg::detail
