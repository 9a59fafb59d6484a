#include "nnrw/activations.hpp"

#include <algorithm>
#include <string>

#include "nnrw/errors.hpp"
#include "nnrw/kernels.hpp"

namespace nnrw {

std::string_view to_string(ActivationKind kind) noexcept {
  switch (kind) {
    case ActivationKind::Sigmoid: return "sigmoid";
    case ActivationKind::Gaussian: return "gaussian";
    case ActivationKind::LeakyRelu: return "leaky_relu";
  }
  return "unknown";
}

ActivationKind parse_activation(std::string_view name) {
  for (ActivationKind kind : kAllActivationKinds)
    if (to_string(kind) == name) return kind;
  throw ConfigError("unknown activation '" + std::string(name) + "' (expected sigmoid, gaussian or leaky_relu)");
}

std::optional<ActivationKind> activation_from_id(std::uint8_t id) noexcept {
  for (ActivationKind kind : kAllActivationKinds)
    if (static_cast<std::uint8_t>(kind) == id) return kind;
  return std::nullopt;
}

namespace {

void require_finite(double y) {
  if (!std::isfinite(y)) throw DomainError("activation input is not finite");
}

}  // namespace

double eval(ActivationKind kind, double y) {
  require_finite(y);
  return detail::apply(kind, y);
}

void eval_batch(ActivationKind kind, std::span<const double> ys, std::span<double> out) {
  if (ys.size() != out.size()) throw ContractError("eval_batch: output length differs from input length");
  std::for_each(ys.begin(), ys.end(), require_finite);
  if (kind == ActivationKind::LeakyRelu) {
    kernels::leaky_relu(ys, out);
    return;
  }
  std::transform(ys.begin(), ys.end(), out.begin(), [kind](double y) { return detail::apply(kind, y); });
}

std::vector<double> eval_batch(ActivationKind kind, std::span<const double> ys) {
  std::vector<double> out(ys.size());
  eval_batch(kind, ys, out);
  return out;
}

ActivationSet::ActivationSet(std::vector<ActivationKind> kinds) : kinds_(std::move(kinds)) {
  if (kinds_.empty()) throw ConfigError("an activation set needs at least one activation");
}

ActivationSet ActivationSet::parse(std::string_view text) {
  std::vector<ActivationKind> kinds;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find_first_of("+,", start);
    if (end == std::string_view::npos) end = text.size();
    kinds.push_back(parse_activation(text.substr(start, end - start)));
    start = end + 1;
  }
  return ActivationSet(std::move(kinds));
}

bool ActivationSet::has_duplicates() const noexcept {
  for (std::size_t i = 0; i < kinds_.size(); ++i)
    for (std::size_t j = i + 1; j < kinds_.size(); ++j)
      if (kinds_[i] == kinds_[j]) return true;
  return false;
}

std::string ActivationSet::name() const {
  std::string out;
  for (std::size_t i = 0; i < kinds_.size(); ++i) {
    if (i) out += '+';
    out += to_string(kinds_[i]);
  }
  return out;
}

std::vector<ActivationSet> parse_activation_sets(std::string_view text) {
  std::vector<ActivationSet> sets;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    sets.push_back(ActivationSet::parse(text.substr(start, end - start)));
    start = end + 1;
  }
  return sets;
}

}  // namespace nnrw
