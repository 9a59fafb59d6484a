#include <cstdlib>

#include "nnrw/errors.hpp"
#include "nnrw/kernels.hpp"

namespace nnrw::kernels {

std::string_view to_string(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

std::optional<Isa> parse_isa(std::string_view name) noexcept {
  for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon})
    if (to_string(isa) == name) return isa;
  return std::nullopt;
}

bool supported(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(NNRW_HAVE_AVX2_KERNELS)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(NNRW_HAVE_NEON_KERNELS)
      return true;  // Advanced SIMD is mandatory on AArch64.
#else
      return false;
#endif
  }
  return false;
}

namespace {

Isa detect() noexcept {
  if (const char* forced = std::getenv("NNRW_KERNEL")) {
    if (auto isa = parse_isa(forced); isa && supported(*isa)) return *isa;
  }
  if (supported(Isa::Avx2)) return Isa::Avx2;
  if (supported(Isa::Neon)) return Isa::Neon;
  return Isa::Scalar;
}

}  // namespace

Isa active_isa() noexcept {
  static const Isa isa = detect();
  return isa;
}

namespace detail {

MicroKernel micro_kernel(Isa isa) {
  if (!supported(isa)) throw ConfigError("kernel variant '" + std::string(to_string(isa)) + "' is not available");
  switch (isa) {
#if defined(NNRW_HAVE_AVX2_KERNELS)
    case Isa::Avx2: return micro_kernel_avx2;
#endif
#if defined(NNRW_HAVE_NEON_KERNELS)
    case Isa::Neon: return micro_kernel_neon;
#endif
    default: return micro_kernel_scalar;
  }
}

LeakyReluKernel leaky_relu_kernel(Isa isa) {
  if (!supported(isa)) throw ConfigError("kernel variant '" + std::string(to_string(isa)) + "' is not available");
  switch (isa) {
#if defined(NNRW_HAVE_AVX2_KERNELS)
    case Isa::Avx2: return leaky_relu_avx2;
#endif
#if defined(NNRW_HAVE_NEON_KERNELS)
    case Isa::Neon: return leaky_relu_neon;
#endif
    default: return leaky_relu_scalar;
  }
}

}  // namespace detail

void leaky_relu(std::span<const double> in, std::span<double> out, Isa isa) {
  if (in.size() != out.size()) throw ContractError("leaky_relu: input and output lengths differ");
  detail::leaky_relu_kernel(isa)(in.data(), out.data(), in.size());
}

}  // namespace nnrw::kernels
