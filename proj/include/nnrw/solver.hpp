#pragma once

// Closed-form output weights.
//
// The ridge solution is beta = (H^T H + lambda I)^-1 H^T T with an identity of
// size (N_A*M) x (N_A*M), i.e. the minimizer of |H beta - T|^2 + lambda |beta|^2.
// It is computed from the normal equations so H never has to be held in
// memory: rows are streamed into a NormalEquations accumulator.

#include <cstddef>
#include <string_view>

#include "nnrw/kernels.hpp"
#include "nnrw/network.hpp"
#include "nnrw/types.hpp"

namespace nnrw {

enum class SolverKind { Ridge, Pinv };

std::string_view to_string(SolverKind kind) noexcept;
SolverKind parse_solver(std::string_view name);

/// Singular values below this fraction of the largest are treated as zero.
inline constexpr double kPinvCutoff = 1e-12;

/// H: one row h(x) per sample of X.
Matrix build_design_matrix(const HiddenLayerParams& hidden, const ActivationSet& acts, const Matrix& inputs);

/// Running H^T H (upper triangle) and H^T T over blocks of rows. Adding the
/// rows in several blocks gives the same bits as adding them at once.
class NormalEquations {
 public:
  NormalEquations(std::size_t n_features, std::size_t n_classes);

  void add(kernels::ConstMatrixView hidden_rows, kernels::ConstMatrixView target_rows);

  std::size_t n_samples() const noexcept { return samples_; }
  /// Full symmetric H^T H.
  Matrix gram() const;
  const Matrix& cross() const noexcept { return cross_; }

  /// Cholesky solve of (H^T H + lambda I) beta = H^T T. Throws
  /// SingularMatrixError when lambda is 0 and H^T H is numerically singular.
  OutputWeights solve(double lambda) const;

 private:
  Matrix gram_upper_;
  Matrix cross_;
  std::size_t samples_ = 0;
};

OutputWeights ridge_solve(const Matrix& design, const Matrix& targets, double lambda);

/// Minimum-norm least squares beta = H^+ T via a thin SVD.
OutputWeights pinv_solve(const Matrix& design, const Matrix& targets);

}  // namespace nnrw
