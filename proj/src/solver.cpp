#include "nnrw/solver.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include "nnrw/errors.hpp"

namespace nnrw {

std::string_view to_string(SolverKind kind) noexcept { return kind == SolverKind::Pinv ? "pinv" : "ridge"; }

SolverKind parse_solver(std::string_view name) {
  if (name == "ridge") return SolverKind::Ridge;
  if (name == "pinv") return SolverKind::Pinv;
  throw ConfigError("unknown solver '" + std::string(name) + "' (expected ridge or pinv)");
}

Matrix build_design_matrix(const HiddenLayerParams& hidden, const ActivationSet& acts, const Matrix& inputs) {
  Matrix design;
  hidden_features_batch(hidden, acts, kernels::view(inputs), design);
  return design;
}

NormalEquations::NormalEquations(std::size_t n_features, std::size_t n_classes)
    : gram_upper_(Matrix::Zero(n_features, n_features)), cross_(Matrix::Zero(n_features, n_classes)) {}

void NormalEquations::add(kernels::ConstMatrixView hidden_rows, kernels::ConstMatrixView target_rows) {
  if (hidden_rows.rows != target_rows.rows)
    throw ContractError("normal equations: " + std::to_string(hidden_rows.rows) + " feature rows but " +
                        std::to_string(target_rows.rows) + " target rows");
  if (hidden_rows.cols != static_cast<std::size_t>(gram_upper_.rows()) ||
      target_rows.cols != static_cast<std::size_t>(cross_.cols()))
    throw ContractError("normal equations: block width does not match the accumulator");
  kernels::gemm(hidden_rows.transposed(), hidden_rows, kernels::mutable_view(gram_upper_),
                kernels::GemmMode::Accumulate, kernels::Triangle::Upper);
  kernels::gemm(hidden_rows.transposed(), target_rows, kernels::mutable_view(cross_), kernels::GemmMode::Accumulate);
  samples_ += hidden_rows.rows;
}

Matrix NormalEquations::gram() const {
  Matrix full = gram_upper_;
  for (Eigen::Index i = 0; i < full.rows(); ++i)
    for (Eigen::Index j = 0; j < i; ++j) full(i, j) = full(j, i);
  return full;
}

OutputWeights NormalEquations::solve(double lambda) const {
  if (!std::isfinite(lambda) || lambda < 0.0) throw ConfigError("lambda must be a finite non-negative number");
  Eigen::MatrixXd system = gram();
  system.diagonal().array() += lambda;
  if (!system.allFinite() || !cross_.allFinite()) throw NumericalError("normal equations contain non-finite values");

  const Eigen::LLT<Eigen::MatrixXd> llt(system);
  bool singular = llt.info() != Eigen::Success;
  if (!singular && lambda == 0.0) {
    // A semidefinite Gram matrix may still factor with round-off sized pivots.
    const auto diag = llt.matrixLLT().diagonal().cwiseAbs();
    const double ratio = diag.minCoeff() / diag.maxCoeff();
    singular = !(ratio * ratio > static_cast<double>(system.rows()) * std::numeric_limits<double>::epsilon());
  }
  if (singular)
    throw SingularMatrixError("H^T H + lambda I is not positive definite; use lambda > 0 (e.g. 0.01)");

  Matrix beta = llt.solve(Eigen::MatrixXd(cross_));
  if (!beta.allFinite()) throw NumericalError("ridge solve produced non-finite output weights");
  return OutputWeights(std::move(beta));
}

OutputWeights ridge_solve(const Matrix& design, const Matrix& targets, double lambda) {
  NormalEquations normal(static_cast<std::size_t>(design.cols()), static_cast<std::size_t>(targets.cols()));
  normal.add(kernels::view(design), kernels::view(targets));
  return normal.solve(lambda);
}

OutputWeights pinv_solve(const Matrix& design, const Matrix& targets) {
  if (design.rows() != targets.rows())
    throw ContractError("pinv: " + std::to_string(design.rows()) + " design rows but " +
                        std::to_string(targets.rows()) + " target rows");
  if (!design.allFinite() || !targets.allFinite()) throw DomainError("pinv: input contains non-finite values");

  const Eigen::MatrixXd h = design;
  const Eigen::BDCSVD<Eigen::MatrixXd> svd(h, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericalError("SVD did not converge");

  const Eigen::VectorXd& sigma = svd.singularValues();
  Eigen::VectorXd inverse = Eigen::VectorXd::Zero(sigma.size());
  if (sigma.size() > 0) {
    const double cutoff = kPinvCutoff * sigma(0);
    for (Eigen::Index i = 0; i < sigma.size(); ++i)
      if (sigma(i) > cutoff) inverse(i) = 1.0 / sigma(i);
  }
  Matrix beta = svd.matrixV() * inverse.asDiagonal() * (svd.matrixU().transpose() * targets);
  if (design.cols() > 0 && !beta.allFinite()) throw NumericalError("pinv produced non-finite output weights");
  return OutputWeights(std::move(beta));
}

}  // namespace nnrw
