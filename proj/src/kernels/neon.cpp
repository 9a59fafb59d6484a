#include <arm_neon.h>

#include "nnrw/activations.hpp"
#include "nnrw/kernels.hpp"

namespace nnrw::kernels::detail {

static_assert(kTileRows == 6 && kTileCols == 8, "NEON kernel is written for a 6x8 tile");

void micro_kernel_neon(std::size_t kc, const double* a, const double* b, double* tile) {
  // 6 rows x 4 lane pairs = 24 accumulators out of 32 vector registers.
  float64x2_t acc[kTileRows][4];
  for (std::size_t r = 0; r < kTileRows; ++r)
    for (std::size_t q = 0; q < 4; ++q) acc[r][q] = vld1q_f64(tile + r * kTileCols + 2 * q);

  for (std::size_t p = 0; p < kc; ++p) {
    const float64x2_t b0 = vld1q_f64(b);
    const float64x2_t b1 = vld1q_f64(b + 2);
    const float64x2_t b2 = vld1q_f64(b + 4);
    const float64x2_t b3 = vld1q_f64(b + 6);
    for (std::size_t r = 0; r < kTileRows; ++r) {
      const float64x2_t ar = vdupq_n_f64(a[r]);
      acc[r][0] = vfmaq_f64(acc[r][0], ar, b0);
      acc[r][1] = vfmaq_f64(acc[r][1], ar, b1);
      acc[r][2] = vfmaq_f64(acc[r][2], ar, b2);
      acc[r][3] = vfmaq_f64(acc[r][3], ar, b3);
    }
    a += kTileRows;
    b += kTileCols;
  }

  for (std::size_t r = 0; r < kTileRows; ++r)
    for (std::size_t q = 0; q < 4; ++q) vst1q_f64(tile + r * kTileCols + 2 * q, acc[r][q]);
}

void leaky_relu_neon(const double* in, double* out, std::size_t n) {
  const float64x2_t slope = vdupq_n_f64(kLeakyReluSlope);
  const float64x2_t zero = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t y = vld1q_f64(in + i);
    const uint64x2_t positive = vcgtq_f64(y, zero);
    vst1q_f64(out + i, vbslq_f64(positive, y, vmulq_f64(slope, y)));
  }
  leaky_relu_scalar(in + i, out + i, n - i);
}

}  // namespace nnrw::kernels::detail
