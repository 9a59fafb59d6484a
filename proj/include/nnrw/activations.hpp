#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nnrw {

/// Transfer functions available to a hidden unit. The numeric value is the
/// id written to model files.
enum class ActivationKind : std::uint8_t {
  Sigmoid = 0,
  Gaussian = 1,
  LeakyRelu = 2,
};

inline constexpr double kLeakyReluSlope = 0.2;

inline constexpr ActivationKind kAllActivationKinds[] = {
    ActivationKind::Sigmoid, ActivationKind::Gaussian, ActivationKind::LeakyRelu};

/// Canonical lowercase name: `sigmoid`, `gaussian`, `leaky_relu`.
std::string_view to_string(ActivationKind kind) noexcept;

/// Inverse of to_string. Throws ConfigError for unknown names.
ActivationKind parse_activation(std::string_view name);

std::optional<ActivationKind> activation_from_id(std::uint8_t id) noexcept;

namespace detail {

// Unchecked evaluation shared by every code path so all of them agree bitwise.
inline double apply(ActivationKind kind, double y) noexcept {
  switch (kind) {
    case ActivationKind::Sigmoid:
      return 1.0 / (1.0 + std::exp(-y));
    case ActivationKind::Gaussian:
      return std::exp(-(y * y));
    case ActivationKind::LeakyRelu:
      return y > 0.0 ? y : kLeakyReluSlope * y;
  }
  return y;
}

}  // namespace detail

/// Evaluates `kind` at `y`. Throws DomainError if `y` is not finite.
double eval(ActivationKind kind, double y);

/// Elementwise eval; `out` must have the same length as `ys`.
void eval_batch(ActivationKind kind, std::span<const double> ys, std::span<double> out);
std::vector<double> eval_batch(ActivationKind kind, std::span<const double> ys);

/// Ordered activations attached to every hidden unit. The order fixes the
/// feature layout: unit i contributes features [i*size(), (i+1)*size()).
class ActivationSet {
 public:
  ActivationSet() = default;
  explicit ActivationSet(std::vector<ActivationKind> kinds);
  ActivationSet(std::initializer_list<ActivationKind> kinds)
      : ActivationSet(std::vector<ActivationKind>(kinds)) {}

  /// Parses `sigmoid+gaussian` (also accepts `,` as the separator).
  static ActivationSet parse(std::string_view text);

  std::size_t size() const noexcept { return kinds_.size(); }
  bool empty() const noexcept { return kinds_.empty(); }
  ActivationKind operator[](std::size_t i) const { return kinds_[i]; }
  const std::vector<ActivationKind>& kinds() const noexcept { return kinds_; }

  /// Duplicates are legal but only add linearly dependent columns.
  bool has_duplicates() const noexcept;

  /// `sigmoid+gaussian`
  std::string name() const;

  friend bool operator==(const ActivationSet&, const ActivationSet&) = default;

 private:
  std::vector<ActivationKind> kinds_;
};

/// Parses a list of sets: `+` joins kinds within a set, `,` separates sets.
std::vector<ActivationSet> parse_activation_sets(std::string_view text);

}  // namespace nnrw
