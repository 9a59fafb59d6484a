#pragma once

// Data-parallel inner loops with a scalar reference implementation and SIMD
// variants chosen at runtime.
//
// All variants produce bitwise-identical results: every output element of
// gemm is a single fused-multiply-add chain over k in ascending order, and
// SIMD lanes only ever span independent output elements.

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

#include <Eigen/Core>

namespace nnrw::kernels {

enum class Isa { Scalar, Avx2, Neon };

std::string_view to_string(Isa isa) noexcept;
std::optional<Isa> parse_isa(std::string_view name) noexcept;

/// True if this binary carries the variant and the CPU can run it.
bool supported(Isa isa) noexcept;

/// Best supported variant, or the one named by NNRW_KERNEL if set and supported.
Isa active_isa() noexcept;

/// Strided read-only view; element (i, j) lives at data[i*row_stride + j*col_stride].
struct ConstMatrixView {
  const double* data = nullptr;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::ptrdiff_t row_stride = 0;
  std::ptrdiff_t col_stride = 1;

  double operator()(std::size_t i, std::size_t j) const noexcept {
    return data[static_cast<std::ptrdiff_t>(i) * row_stride +
                static_cast<std::ptrdiff_t>(j) * col_stride];
  }
  ConstMatrixView transposed() const noexcept {
    return {data, cols, rows, col_stride, row_stride};
  }
};

struct MatrixView {
  double* data = nullptr;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::ptrdiff_t row_stride = 0;
  std::ptrdiff_t col_stride = 1;

  double& operator()(std::size_t i, std::size_t j) const noexcept {
    return data[static_cast<std::ptrdiff_t>(i) * row_stride +
                static_cast<std::ptrdiff_t>(j) * col_stride];
  }
  operator ConstMatrixView() const noexcept {
    return {data, rows, cols, row_stride, col_stride};
  }
};

template <class Derived>
ConstMatrixView view(const Eigen::DenseBase<Derived>& m) {
  const auto& d = m.derived();
  const std::ptrdiff_t outer = d.outerStride();
  const std::ptrdiff_t inner = d.innerStride();
  if constexpr (Derived::IsRowMajor) {
    return {d.data(), static_cast<std::size_t>(d.rows()), static_cast<std::size_t>(d.cols()), outer, inner};
  } else {
    return {d.data(), static_cast<std::size_t>(d.rows()), static_cast<std::size_t>(d.cols()), inner, outer};
  }
}

template <class Derived>
MatrixView mutable_view(Eigen::DenseBase<Derived>& m) {
  auto& d = m.derived();
  const std::ptrdiff_t outer = d.outerStride();
  const std::ptrdiff_t inner = d.innerStride();
  if constexpr (Derived::IsRowMajor) {
    return {d.data(), static_cast<std::size_t>(d.rows()), static_cast<std::size_t>(d.cols()), outer, inner};
  } else {
    return {d.data(), static_cast<std::size_t>(d.rows()), static_cast<std::size_t>(d.cols()), inner, outer};
  }
}

enum class GemmMode {
  Assign,      ///< c = a*b
  Accumulate,  ///< c = c + a*b, continuing each element's fma chain
};

enum class Triangle {
  Full,
  Upper,  ///< only elements with j >= i are written; c must be square
};

/// c(i,j) = fma-chain over k = 0..K-1 of a(i,k)*b(k,j), seeded with 0 or
/// with c(i,j) itself under GemmMode::Accumulate. Splitting k across calls in
/// Accumulate mode gives the same bits as one call.
void gemm(ConstMatrixView a, ConstMatrixView b, MatrixView c,
          GemmMode mode = GemmMode::Assign, Triangle tri = Triangle::Full,
          Isa isa = active_isa());

/// out[i] = in[i] > 0 ? in[i] : 0.2*in[i]
void leaky_relu(std::span<const double> in, std::span<double> out, Isa isa = active_isa());

namespace detail {

inline constexpr std::size_t kTileRows = 6;
inline constexpr std::size_t kTileCols = 8;

/// Updates a row-major kTileRows x kTileCols tile in place from packed panels:
/// a holds kc groups of kTileRows values, b holds kc groups of kTileCols values.
using MicroKernel = void (*)(std::size_t kc, const double* a, const double* b, double* tile);
using LeakyReluKernel = void (*)(const double* in, double* out, std::size_t n);

void micro_kernel_scalar(std::size_t kc, const double* a, const double* b, double* tile);
void leaky_relu_scalar(const double* in, double* out, std::size_t n);

#if defined(NNRW_HAVE_AVX2_KERNELS)
void micro_kernel_avx2(std::size_t kc, const double* a, const double* b, double* tile);
void leaky_relu_avx2(const double* in, double* out, std::size_t n);
#endif
#if defined(NNRW_HAVE_NEON_KERNELS)
void micro_kernel_neon(std::size_t kc, const double* a, const double* b, double* tile);
void leaky_relu_neon(const double* in, double* out, std::size_t n);
#endif

MicroKernel micro_kernel(Isa isa);
LeakyReluKernel leaky_relu_kernel(Isa isa);

}  // namespace detail

}  // namespace nnrw::kernels
