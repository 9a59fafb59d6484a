#include "nnrw/network.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "nnrw/errors.hpp"
#include "nnrw/rng.hpp"

namespace nnrw {

namespace {

constexpr std::size_t kMinPatchSide = 3;
constexpr std::size_t kBatchRows = 1024;

template <class Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m) {
  return m.derived().allFinite();
}

std::string dims(std::size_t r, std::size_t c) { return std::to_string(r) + "x" + std::to_string(c); }

}  // namespace

std::string_view to_string(InitScheme scheme) noexcept {
  return scheme == InitScheme::Shaped ? "shaped" : "uniform";
}

InitScheme parse_init_scheme(std::string_view name) {
  if (name == "uniform") return InitScheme::Uniform;
  if (name == "shaped") return InitScheme::Shaped;
  throw ConfigError("unknown init scheme '" + std::string(name) + "' (expected uniform or shaped)");
}

std::vector<std::string> validate(const NetworkConfig& config) {
  if (config.n_inputs == 0) throw ConfigError("network needs at least one input");
  if (config.n_hidden == 0) throw ConfigError("network needs at least one hidden unit");
  if (config.activations.empty()) throw ConfigError("network needs at least one activation");
  if (!std::isfinite(config.lambda) || config.lambda < 0.0)
    throw ConfigError("lambda must be a finite non-negative number");
  if (config.init == InitScheme::Shaped) {
    if (config.image_height * config.image_width != config.n_inputs)
      throw ConfigError("shaped init: image " + dims(config.image_height, config.image_width) +
                        " does not factor the " + std::to_string(config.n_inputs) + " inputs");
    if (std::min(config.image_height, config.image_width) < kMinPatchSide)
      throw ConfigError("shaped init: image sides must be at least 3");
  }
  std::vector<std::string> warnings;
  if (config.activations.has_duplicates())
    warnings.push_back("activation set '" + config.activations.name() +
                       "' repeats an activation; its features are linearly dependent");
  return warnings;
}

HiddenLayerParams::HiddenLayerParams(Matrix weights, Vector bias)
    : weights_(std::move(weights)), bias_(std::move(bias)) {
  if (weights_.rows() != bias_.size())
    throw ContractError("hidden layer: " + std::to_string(weights_.rows()) + " weight rows but " +
                        std::to_string(bias_.size()) + " biases");
  if (!all_finite(weights_) || !all_finite(bias_)) throw DomainError("hidden layer parameters must be finite");
}

OutputWeights::OutputWeights(Matrix beta) : beta_(std::move(beta)) {
  if (!all_finite(beta_)) throw DomainError("output weights must be finite");
}

Network::Network(NetworkConfig config, HiddenLayerParams hidden, OutputWeights output)
    : config_(std::move(config)), hidden_(std::move(hidden)), output_(std::move(output)) {
  if (hidden_.n_inputs() != config_.n_inputs || hidden_.n_hidden() != config_.n_hidden)
    throw ContractError("network: hidden layer is " + dims(hidden_.n_hidden(), hidden_.n_inputs()) +
                        ", config expects " + dims(config_.n_hidden, config_.n_inputs));
  if (output_.n_features() != config_.n_features())
    throw ContractError("network: output weights have " + std::to_string(output_.n_features()) +
                        " rows, expected " + std::to_string(config_.n_features()));
  if (output_.n_classes() == 0) throw ContractError("network: no classes");
}

HiddenLayerParams init_uniform(const NetworkConfig& config) {
  validate(config);
  Rng rng(config.seed);
  Matrix weights(config.n_hidden, config.n_inputs);
  Vector bias(config.n_hidden);
  for (Eigen::Index i = 0; i < weights.rows(); ++i)
    for (Eigen::Index j = 0; j < weights.cols(); ++j) weights(i, j) = rng.uniform_pm1();
  for (Eigen::Index i = 0; i < bias.size(); ++i) bias(i) = rng.uniform_pm1();
  return {std::move(weights), std::move(bias)};
}

HiddenLayerParams init_shaped(const NetworkConfig& config) {
  if (config.init != InitScheme::Shaped) throw ConfigError("init_shaped called without a shaped config");
  validate(config);
  const std::size_t height = config.image_height, width = config.image_width;
  Rng rng(config.seed);
  Matrix weights = Matrix::Zero(config.n_hidden, config.n_inputs);
  std::vector<double> patch;

  for (std::size_t unit = 0; unit < config.n_hidden; ++unit) {
    const auto side = static_cast<std::size_t>(rng.uniform_int(kMinPatchSide, std::min(height, width)));
    const auto top = static_cast<std::size_t>(rng.uniform_int(0, height - side));
    const auto left = static_cast<std::size_t>(rng.uniform_int(0, width - side));

    double norm = 0.0;
    while (norm == 0.0) {
      patch.resize(side * side);
      for (double& w : patch) w = rng.uniform_pm1();
      double mean = 0.0;
      for (double w : patch) mean += w;
      mean /= static_cast<double>(patch.size());
      double sq = 0.0;
      for (double& w : patch) {
        w -= mean;
        sq += w * w;
      }
      norm = std::sqrt(sq);
    }

    for (std::size_t r = 0; r < side; ++r)
      for (std::size_t c = 0; c < side; ++c)
        weights(unit, (top + r) * width + left + c) = patch[r * side + c] / norm;
  }
  return {std::move(weights), Vector::Zero(config.n_hidden)};
}

HiddenLayerParams init_hidden(const NetworkConfig& config) {
  return config.init == InitScheme::Shaped ? init_shaped(config) : init_uniform(config);
}

void hidden_features_batch(const HiddenLayerParams& hidden, const ActivationSet& acts,
                           kernels::ConstMatrixView inputs, Matrix& out) {
  if (inputs.cols != hidden.n_inputs())
    throw ContractError("hidden features: sample has " + std::to_string(inputs.cols) + " inputs, layer expects " +
                        std::to_string(hidden.n_inputs()));
  for (std::size_t r = 0; r < inputs.rows; ++r)
    for (std::size_t c = 0; c < inputs.cols; ++c)
      if (!std::isfinite(inputs(r, c))) throw DomainError("input sample contains a non-finite value");

  const std::size_t units = hidden.n_hidden();
  const std::size_t n_acts = acts.size();
  Matrix pre(inputs.rows, units);
  kernels::gemm(inputs, kernels::view(hidden.weights()).transposed(), kernels::mutable_view(pre));

  const Vector& bias = hidden.bias();
  out.resize(static_cast<Eigen::Index>(inputs.rows), static_cast<Eigen::Index>(units * n_acts));
  for (std::size_t r = 0; r < inputs.rows; ++r) {
    double* z = pre.data() + r * units;
    double* h = out.data() + r * units * n_acts;
    for (std::size_t i = 0; i < units; ++i) z[i] += bias[static_cast<Eigen::Index>(i)];
    if (n_acts == 1 && acts[0] == ActivationKind::LeakyRelu) {
      kernels::leaky_relu({z, units}, {h, units});
      continue;
    }
    for (std::size_t i = 0; i < units; ++i)
      for (std::size_t n = 0; n < n_acts; ++n) h[i * n_acts + n] = detail::apply(acts[n], z[i]);
  }
}

std::vector<double> hidden_features(const HiddenLayerParams& hidden, const ActivationSet& acts,
                                    std::span<const double> x) {
  if (x.size() != hidden.n_inputs())
    throw ContractError("hidden features: sample has " + std::to_string(x.size()) + " inputs, layer expects " +
                        std::to_string(hidden.n_inputs()));
  Matrix h;
  hidden_features_batch(hidden, acts, {x.data(), 1, x.size(), static_cast<std::ptrdiff_t>(x.size()), 1}, h);
  return {h.data(), h.data() + h.size()};
}

std::vector<double> forward(const Network& net, std::span<const double> x) {
  const std::vector<double> h = hidden_features(net.hidden(), net.config().activations, x);
  std::vector<double> scores(net.n_classes());
  kernels::gemm({h.data(), 1, h.size(), static_cast<std::ptrdiff_t>(h.size()), 1}, kernels::view(net.output().beta()),
                {scores.data(), 1, scores.size(), static_cast<std::ptrdiff_t>(scores.size()), 1});
  return scores;
}

std::size_t argmax(std::span<const double> scores) {
  if (scores.empty()) throw ContractError("argmax of an empty score vector");
  std::size_t best = 0;
  for (std::size_t p = 1; p < scores.size(); ++p)
    if (scores[p] > scores[best]) best = p;
  return best;
}

std::size_t predict(const Network& net, std::span<const double> x) { return argmax(forward(net, x)); }

std::vector<int> predict_batch(const Network& net, const Matrix& inputs) {
  if (static_cast<std::size_t>(inputs.cols()) != net.config().n_inputs)
    throw ContractError("predict: samples have " + std::to_string(inputs.cols()) + " features, network expects " +
                        std::to_string(net.config().n_inputs));
  std::vector<int> labels(static_cast<std::size_t>(inputs.rows()));
  Matrix h, scores;
  for (Eigen::Index r0 = 0; r0 < inputs.rows(); r0 += kBatchRows) {
    const Eigen::Index rows = std::min<Eigen::Index>(kBatchRows, inputs.rows() - r0);
    hidden_features_batch(net.hidden(), net.config().activations, kernels::view(inputs.middleRows(r0, rows)), h);
    scores.resize(rows, static_cast<Eigen::Index>(net.n_classes()));
    kernels::gemm(kernels::view(h), kernels::view(net.output().beta()), kernels::mutable_view(scores));
    for (Eigen::Index r = 0; r < rows; ++r)
      labels[static_cast<std::size_t>(r0 + r)] =
          static_cast<int>(argmax({scores.data() + r * scores.cols(), static_cast<std::size_t>(scores.cols())}));
  }
  return labels;
}

std::uint64_t mac_count(std::uint64_t n_inputs, std::uint64_t n_hidden, std::uint64_t n_activations,
                        std::uint64_t n_classes) {
  if (n_inputs == 0 || n_hidden == 0 || n_activations == 0 || n_classes == 0)
    throw ContractError("MAC count needs positive N, M, N_A and P");
  std::uint64_t projection = 0, readout_units = 0, readout = 0, total = 0;
  if (__builtin_mul_overflow(n_inputs, n_hidden, &projection) ||
      __builtin_mul_overflow(n_hidden, n_activations, &readout_units) ||
      __builtin_mul_overflow(readout_units, n_classes, &readout) ||
      __builtin_add_overflow(projection, readout, &total))
    throw std::overflow_error("MAC count does not fit in 64 bits");
  return total;
}

}  // namespace nnrw
