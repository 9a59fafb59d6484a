#include <cmath>

#include "nnrw/activations.hpp"
#include "nnrw/kernels.hpp"

namespace nnrw::kernels::detail {

void micro_kernel_scalar(std::size_t kc, const double* a, const double* b, double* tile) {
  double acc[kTileRows][kTileCols];
  for (std::size_t r = 0; r < kTileRows; ++r)
    for (std::size_t c = 0; c < kTileCols; ++c) acc[r][c] = tile[r * kTileCols + c];

  for (std::size_t p = 0; p < kc; ++p) {
    const double* ap = a + p * kTileRows;
    const double* bp = b + p * kTileCols;
    for (std::size_t r = 0; r < kTileRows; ++r)
      for (std::size_t c = 0; c < kTileCols; ++c) acc[r][c] = std::fma(ap[r], bp[c], acc[r][c]);
  }

  for (std::size_t r = 0; r < kTileRows; ++r)
    for (std::size_t c = 0; c < kTileCols; ++c) tile[r * kTileCols + c] = acc[r][c];
}

void leaky_relu_scalar(const double* in, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = in[i] > 0.0 ? in[i] : kLeakyReluSlope * in[i];
}

}  // namespace nnrw::kernels::detail
