#include <algorithm>
#include <string>
#include <vector>

#include "nnrw/errors.hpp"
#include "nnrw/kernels.hpp"

namespace nnrw::kernels {

namespace {

using detail::kTileCols;
using detail::kTileRows;

// Cache blocking: a packed kKc x kMc block of `a` stays in L2, a packed
// kKc x kNc panel of `b` in L3.
constexpr std::size_t kKc = 256;
constexpr std::size_t kMc = 16 * kTileRows;
constexpr std::size_t kNc = 128 * kTileCols;

std::size_t round_up(std::size_t n, std::size_t m) { return (n + m - 1) / m * m; }

void pack_a(ConstMatrixView a, std::size_t i0, std::size_t mc, std::size_t p0, std::size_t kc,
            double* out) {
  for (std::size_t ir = 0; ir < mc; ir += kTileRows) {
    const std::size_t rows = std::min(kTileRows, mc - ir);
    for (std::size_t p = 0; p < kc; ++p) {
      std::size_t r = 0;
      for (; r < rows; ++r) *out++ = a(i0 + ir + r, p0 + p);
      for (; r < kTileRows; ++r) *out++ = 0.0;
    }
  }
}

void pack_b(ConstMatrixView b, std::size_t p0, std::size_t kc, std::size_t j0, std::size_t nc,
            double* out) {
  for (std::size_t jr = 0; jr < nc; jr += kTileCols) {
    const std::size_t cols = std::min(kTileCols, nc - jr);
    for (std::size_t p = 0; p < kc; ++p) {
      std::size_t c = 0;
      for (; c < cols; ++c) *out++ = b(p0 + p, j0 + jr + c);
      for (; c < kTileCols; ++c) *out++ = 0.0;
    }
  }
}

bool writes(Triangle tri, std::size_t i, std::size_t j) { return tri == Triangle::Full || j >= i; }

void zero_fill(MatrixView c, Triangle tri) {
  for (std::size_t i = 0; i < c.rows; ++i)
    for (std::size_t j = tri == Triangle::Upper ? i : 0; j < c.cols; ++j) c(i, j) = 0.0;
}

}  // namespace

void gemm(ConstMatrixView a, ConstMatrixView b, MatrixView c, GemmMode mode, Triangle tri, Isa isa) {
  if (a.cols != b.rows || c.rows != a.rows || c.cols != b.cols) {
    throw ContractError("gemm: shape mismatch (" + std::to_string(a.rows) + "x" + std::to_string(a.cols) +
                        ") * (" + std::to_string(b.rows) + "x" + std::to_string(b.cols) + ") -> (" +
                        std::to_string(c.rows) + "x" + std::to_string(c.cols) + ")");
  }
  if (tri == Triangle::Upper && c.rows != c.cols) throw ContractError("gemm: upper-triangle output must be square");

  const auto kernel = detail::micro_kernel(isa);
  const std::size_t m = c.rows, n = c.cols, k = a.cols;
  if (m == 0 || n == 0) return;
  if (k == 0) {
    if (mode == GemmMode::Assign) zero_fill(c, tri);
    return;
  }

  thread_local std::vector<double> packed_a;
  thread_local std::vector<double> packed_b;
  packed_a.resize(round_up(std::min(m, kMc), kTileRows) * std::min(k, kKc));
  packed_b.resize(round_up(std::min(n, kNc), kTileCols) * std::min(k, kKc));
  alignas(64) double tile[kTileRows * kTileCols];

  for (std::size_t jc = 0; jc < n; jc += kNc) {
    const std::size_t nc = std::min(kNc, n - jc);
    for (std::size_t pc = 0; pc < k; pc += kKc) {
      const std::size_t kc = std::min(kKc, k - pc);
      const bool seed_zero = pc == 0 && mode == GemmMode::Assign;
      pack_b(b, pc, kc, jc, nc, packed_b.data());

      for (std::size_t ic = 0; ic < m; ic += kMc) {
        const std::size_t mc = std::min(kMc, m - ic);
        if (tri == Triangle::Upper && jc + nc <= ic) continue;
        pack_a(a, ic, mc, pc, kc, packed_a.data());

        for (std::size_t jr = 0; jr < nc; jr += kTileCols) {
          const std::size_t j0 = jc + jr;
          const std::size_t cols = std::min(kTileCols, nc - jr);
          const double* b_panel = packed_b.data() + (jr / kTileCols) * kc * kTileCols;

          for (std::size_t ir = 0; ir < mc; ir += kTileRows) {
            const std::size_t i0 = ic + ir;
            if (tri == Triangle::Upper && j0 + kTileCols <= i0) continue;
            const std::size_t rows = std::min(kTileRows, mc - ir);
            const double* a_panel = packed_a.data() + (ir / kTileRows) * kc * kTileRows;

            std::fill(std::begin(tile), std::end(tile), 0.0);
            if (!seed_zero) {
              for (std::size_t r = 0; r < rows; ++r)
                for (std::size_t q = 0; q < cols; ++q) tile[r * kTileCols + q] = c(i0 + r, j0 + q);
            }
            kernel(kc, a_panel, b_panel, tile);
            for (std::size_t r = 0; r < rows; ++r)
              for (std::size_t q = 0; q < cols; ++q)
                if (writes(tri, i0 + r, j0 + q)) c(i0 + r, j0 + q) = tile[r * kTileCols + q];
          }
        }
      }
    }
  }
}

}  // namespace nnrw::kernels
