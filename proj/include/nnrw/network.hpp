#pragma once

// Random hidden layer with multi-activation units, class scores and the
// inference cost model.
//
// Every hidden unit i computes one pre-activation z_i = a_i . x + b_i and
// feeds it to all N_A activations of the set. The feature vector is laid out
// unit-major, activation-minor:
//
//   h(x) = [g1(z_1), ..., gNA(z_1), g1(z_2), ..., gNA(z_M)]
//
// so feature index i*N_A + n holds activation n of unit i.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nnrw/activations.hpp"
#include "nnrw/kernels.hpp"
#include "nnrw/types.hpp"

namespace nnrw {

enum class InitScheme : std::uint8_t {
  Uniform = 0,  ///< weights and biases i.i.d. uniform on [-1, 1]
  Shaped = 1,   ///< random square receptive field per unit, zero bias
};

std::string_view to_string(InitScheme scheme) noexcept;
InitScheme parse_init_scheme(std::string_view name);

inline constexpr double kDefaultLambda = 0.01;

struct NetworkConfig {
  std::size_t n_inputs = 0;
  std::size_t n_hidden = 0;
  ActivationSet activations;
  double lambda = kDefaultLambda;
  InitScheme init = InitScheme::Uniform;
  /// Image geometry for InitScheme::Shaped; height * width must equal n_inputs.
  std::size_t image_height = 0;
  std::size_t image_width = 0;
  std::uint64_t seed = 0;

  std::size_t n_features() const noexcept { return n_hidden * activations.size(); }
};

/// Throws ConfigError on an invalid configuration; returns non-fatal warnings.
std::vector<std::string> validate(const NetworkConfig& config);

/// Frozen input-side parameters: weights is M x N (row i is a_i), bias has M entries.
class HiddenLayerParams {
 public:
  HiddenLayerParams(Matrix weights, Vector bias);

  const Matrix& weights() const noexcept { return weights_; }
  const Vector& bias() const noexcept { return bias_; }
  std::size_t n_hidden() const noexcept { return static_cast<std::size_t>(weights_.rows()); }
  std::size_t n_inputs() const noexcept { return static_cast<std::size_t>(weights_.cols()); }

 private:
  Matrix weights_;
  Vector bias_;
};

/// Trained output weights, (N_A*M) x P; column p scores class p.
class OutputWeights {
 public:
  explicit OutputWeights(Matrix beta);

  const Matrix& beta() const noexcept { return beta_; }
  std::size_t n_features() const noexcept { return static_cast<std::size_t>(beta_.rows()); }
  std::size_t n_classes() const noexcept { return static_cast<std::size_t>(beta_.cols()); }

 private:
  Matrix beta_;
};

class Network {
 public:
  Network(NetworkConfig config, HiddenLayerParams hidden, OutputWeights output);

  const NetworkConfig& config() const noexcept { return config_; }
  const HiddenLayerParams& hidden() const noexcept { return hidden_; }
  const OutputWeights& output() const noexcept { return output_; }
  std::size_t n_classes() const noexcept { return output_.n_classes(); }

 private:
  NetworkConfig config_;
  HiddenLayerParams hidden_;
  OutputWeights output_;
};

HiddenLayerParams init_uniform(const NetworkConfig& config);
HiddenLayerParams init_shaped(const NetworkConfig& config);
/// Dispatches on config.init.
HiddenLayerParams init_hidden(const NetworkConfig& config);

/// h(x) for one sample.
std::vector<double> hidden_features(const HiddenLayerParams& hidden, const ActivationSet& acts,
                                    std::span<const double> x);

/// Writes h(x) of every row of `inputs` (rows x N) into `out` (rows x N_A*M).
/// Rows agree bitwise with hidden_features on the same sample.
void hidden_features_batch(const HiddenLayerParams& hidden, const ActivationSet& acts,
                           kernels::ConstMatrixView inputs, Matrix& out);

/// Class scores f^p(x) = h(x) . beta^p.
std::vector<double> forward(const Network& net, std::span<const double> x);

/// Index of the largest score; ties go to the lowest index.
std::size_t argmax(std::span<const double> scores);

std::size_t predict(const Network& net, std::span<const double> x);

/// Predicted class of every row of `inputs`, processed in blocks of rows.
std::vector<int> predict_batch(const Network& net, const Matrix& inputs);

/// Inference multiply-accumulates, bias terms excluded: N*M + M*N_A*P.
/// Throws std::overflow_error if the count does not fit in 64 bits.
std::uint64_t mac_count(std::uint64_t n_inputs, std::uint64_t n_hidden, std::uint64_t n_activations,
                        std::uint64_t n_classes);

}  // namespace nnrw
