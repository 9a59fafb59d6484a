// Compiled with -mavx2 -mfma; only reached after a CPUID check.

#include <immintrin.h>

#include "nnrw/activations.hpp"
#include "nnrw/kernels.hpp"

namespace nnrw::kernels::detail {

static_assert(kTileRows == 6 && kTileCols == 8, "AVX2 kernel is written for a 6x8 tile");

void micro_kernel_avx2(std::size_t kc, const double* a, const double* b, double* tile) {
  __m256d c00 = _mm256_loadu_pd(tile + 0), c01 = _mm256_loadu_pd(tile + 4);
  __m256d c10 = _mm256_loadu_pd(tile + 8), c11 = _mm256_loadu_pd(tile + 12);
  __m256d c20 = _mm256_loadu_pd(tile + 16), c21 = _mm256_loadu_pd(tile + 20);
  __m256d c30 = _mm256_loadu_pd(tile + 24), c31 = _mm256_loadu_pd(tile + 28);
  __m256d c40 = _mm256_loadu_pd(tile + 32), c41 = _mm256_loadu_pd(tile + 36);
  __m256d c50 = _mm256_loadu_pd(tile + 40), c51 = _mm256_loadu_pd(tile + 44);

  for (std::size_t p = 0; p < kc; ++p) {
    const __m256d b0 = _mm256_loadu_pd(b);
    const __m256d b1 = _mm256_loadu_pd(b + 4);
    __m256d ar;

    ar = _mm256_broadcast_sd(a + 0);
    c00 = _mm256_fmadd_pd(ar, b0, c00);
    c01 = _mm256_fmadd_pd(ar, b1, c01);
    ar = _mm256_broadcast_sd(a + 1);
    c10 = _mm256_fmadd_pd(ar, b0, c10);
    c11 = _mm256_fmadd_pd(ar, b1, c11);
    ar = _mm256_broadcast_sd(a + 2);
    c20 = _mm256_fmadd_pd(ar, b0, c20);
    c21 = _mm256_fmadd_pd(ar, b1, c21);
    ar = _mm256_broadcast_sd(a + 3);
    c30 = _mm256_fmadd_pd(ar, b0, c30);
    c31 = _mm256_fmadd_pd(ar, b1, c31);
    ar = _mm256_broadcast_sd(a + 4);
    c40 = _mm256_fmadd_pd(ar, b0, c40);
    c41 = _mm256_fmadd_pd(ar, b1, c41);
    ar = _mm256_broadcast_sd(a + 5);
    c50 = _mm256_fmadd_pd(ar, b0, c50);
    c51 = _mm256_fmadd_pd(ar, b1, c51);

    a += kTileRows;
    b += kTileCols;
  }

  _mm256_storeu_pd(tile + 0, c00);
  _mm256_storeu_pd(tile + 4, c01);
  _mm256_storeu_pd(tile + 8, c10);
  _mm256_storeu_pd(tile + 12, c11);
  _mm256_storeu_pd(tile + 16, c20);
  _mm256_storeu_pd(tile + 20, c21);
  _mm256_storeu_pd(tile + 24, c30);
  _mm256_storeu_pd(tile + 28, c31);
  _mm256_storeu_pd(tile + 32, c40);
  _mm256_storeu_pd(tile + 36, c41);
  _mm256_storeu_pd(tile + 40, c50);
  _mm256_storeu_pd(tile + 44, c51);
}

void leaky_relu_avx2(const double* in, double* out, std::size_t n) {
  const __m256d slope = _mm256_set1_pd(kLeakyReluSlope);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d y = _mm256_loadu_pd(in + i);
    const __m256d positive = _mm256_cmp_pd(y, zero, _CMP_GT_OQ);
    _mm256_storeu_pd(out + i, _mm256_blendv_pd(_mm256_mul_pd(slope, y), y, positive));
  }
  leaky_relu_scalar(in + i, out + i, n - i);
}

}  // namespace nnrw::kernels::detail
