#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/QR>

#include "nnrw/errors.hpp"
#include "nnrw/solver.hpp"

using namespace nnrw;

namespace {

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& gen) {
  std::normal_distribution<double> dist;
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(gen);
  return m;
}

// Gauss-Jordan with partial pivoting, independent of the implementation's factorization.
Matrix gauss_jordan_inverse(Matrix a) {
  const Eigen::Index n = a.rows();
  Matrix inv = Matrix::Identity(n, n);
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index pivot = col;
    for (Eigen::Index r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    a.row(col).swap(a.row(pivot));
    inv.row(col).swap(inv.row(pivot));
    const double d = a(col, col);
    a.row(col) /= d;
    inv.row(col) /= d;
    for (Eigen::Index r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a(r, col);
      a.row(r) -= f * a.row(col);
      inv.row(r) -= f * inv.row(col);
    }
  }
  return inv;
}

Matrix ridge_oracle(const Matrix& h, const Matrix& t, double lambda) {
  Matrix g = h.transpose() * h;
  g.diagonal().array() += lambda;
  return gauss_jordan_inverse(g) * (h.transpose() * t);
}

double objective(const Matrix& h, const Matrix& t, const Matrix& beta, double lambda) {
  return (h * beta - t).squaredNorm() + lambda * beta.squaredNorm();
}

double rel(const Matrix& a, const Matrix& b) { return (a - b).norm() / std::max(b.norm(), 1e-300); }

}  // namespace

TEST_CASE("closed-form examples") {
  const Matrix i2 = Matrix::Identity(2, 2);
  CHECK(rel(ridge_solve(i2, i2, 0.0).beta(), i2) <= 1e-15);
  CHECK(rel(ridge_solve(i2, i2, 1.0).beta(), 0.5 * i2) <= 1e-15);
}

TEST_CASE("ridge matches the explicit inverse") {
  std::mt19937_64 gen(21);
  for (int rep = 0; rep < 30; ++rep) {
    const Matrix h = random_matrix(10 + rep, 4 + rep % 5, gen);
    const Matrix t = random_matrix(h.rows(), 2, gen);
    const Matrix beta = ridge_solve(h, t, 0.01).beta();
    CHECK(rel(beta, ridge_oracle(h, t, 0.01)) <= 1e-8);

    Matrix g = h.transpose() * h;
    g.diagonal().array() += 0.01;
    const Matrix rhs = h.transpose() * t;
    CHECK((g * beta - rhs).norm() / rhs.norm() <= 1e-8);
  }
}

TEST_CASE("ridge optimality under perturbation") {
  std::mt19937_64 gen(22);
  const Matrix h = random_matrix(15, 6, gen), t = random_matrix(15, 3, gen);
  const double lambda = 0.3;
  const Matrix beta = ridge_solve(h, t, lambda).beta();
  const double best = objective(h, t, beta, lambda);
  for (int i = 0; i < 150; ++i) {
    Matrix delta = random_matrix(6, 3, gen);
    delta *= 1e-3 / delta.norm();
    CHECK(objective(h, t, beta + delta, lambda) >= best);
  }
}

TEST_CASE("monotone shrinkage and target scaling") {
  std::mt19937_64 gen(23);
  const Matrix h = random_matrix(20, 8, gen), t = random_matrix(20, 3, gen);
  double previous = ridge_solve(h, t, 0.0).beta().norm();
  for (double lambda : {1e-4, 1e-2, 1.0, 10.0, 1e3, 1e6}) {
    const double norm = ridge_solve(h, t, lambda).beta().norm();
    CHECK(norm <= previous + 1e-10);
    previous = norm;
  }
  for (double c : {-2.0, 0.5, 7.0}) {
    const Matrix a = ridge_solve(h, c * t, 0.05).beta();
    const Matrix b = c * ridge_solve(h, t, 0.05).beta();
    CHECK((a - b).norm() <= 1e-10 * std::max(1.0, b.norm()));
  }
}

TEST_CASE("singular gram without regularization") {
  Matrix h(4, 3);
  h << 1, 2, 2, 3, 1, 1, 0, 4, 4, 5, 2, 2;  // columns 1 and 2 equal
  const Matrix t = Matrix::Ones(4, 2);
  CHECK_THROWS_AS(ridge_solve(h, t, 0.0), SingularMatrixError);
  CHECK_NOTHROW(ridge_solve(h, t, 0.01));
  CHECK_THROWS_AS(ridge_solve(h, t, -1.0), ConfigError);
  CHECK_THROWS_AS(ridge_solve(h, Matrix::Ones(3, 2), 0.1), ContractError);
}

TEST_CASE("streamed normal equations equal the one-shot accumulation") {
  std::mt19937_64 gen(24);
  const Matrix h = random_matrix(200, 12, gen), t = random_matrix(200, 3, gen);
  NormalEquations once(12, 3), chunked(12, 3);
  once.add(kernels::view(h), kernels::view(t));
  for (Eigen::Index r = 0; r < 200; r += 33) {
    const Eigen::Index n = std::min<Eigen::Index>(33, 200 - r);
    chunked.add(kernels::view(h.middleRows(r, n)), kernels::view(t.middleRows(r, n)));
  }
  CHECK(once.gram() == chunked.gram());
  CHECK(once.cross() == chunked.cross());
  CHECK(chunked.n_samples() == 200);
  CHECK((once.gram() - Matrix(h.transpose() * h)).norm() <= 1e-10 * once.gram().norm());
  CHECK(once.gram() == once.gram().transpose());
  CHECK(once.solve(0.1).beta() == chunked.solve(0.1).beta());
}

TEST_CASE("pinv on invertible and rank-deficient systems") {
  std::mt19937_64 gen(25);
  const Matrix sq = random_matrix(5, 5, gen), t = random_matrix(5, 2, gen);
  CHECK(rel(pinv_solve(sq, t).beta(), gauss_jordan_inverse(sq) * t) <= 1e-9);

  Matrix h = random_matrix(12, 5, gen);
  h.col(3) = h.col(1);
  const Matrix t2 = random_matrix(12, 3, gen);
  const Matrix beta = pinv_solve(h, t2).beta();
  const Eigen::MatrixXd hd = h;
  const Eigen::MatrixXd oracle = Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(hd).solve(Eigen::MatrixXd(t2));
  CHECK(rel(beta, Matrix(oracle)) <= 1e-9);
  CHECK(std::abs((h * beta - t2).norm() - (h * Matrix(oracle) - t2).norm()) <= 1e-9);

  // Moving along the null space keeps the residual but grows the norm.
  Matrix null = Matrix::Zero(5, 3);
  null(1, 0) = 1;
  null(3, 0) = -1;
  for (double s : {1e-3, 0.1, 1.0}) {
    const Matrix other = beta + s * null;
    CHECK(std::abs((h * other - t2).norm() - (h * beta - t2).norm()) <= 1e-9);
    CHECK(other.norm() > beta.norm());
  }
}

TEST_CASE("pinv is the zero-regularization limit") {
  std::mt19937_64 gen(26);
  const Matrix h = random_matrix(30, 6, gen), t = random_matrix(30, 2, gen);
  CHECK((pinv_solve(h, t).beta() - ridge_solve(h, t, 1e-10).beta()).norm() <= 1e-6);
}

TEST_CASE("design matrix rows are hidden features") {
  NetworkConfig cfg;
  cfg.n_inputs = 3;
  cfg.n_hidden = 4;
  cfg.activations = {ActivationKind::Sigmoid, ActivationKind::Gaussian};
  cfg.seed = 2;
  const auto params = init_uniform(cfg);
  std::mt19937_64 gen(27);
  Matrix x = random_matrix(5, 3, gen);
  x.row(4) = x.row(1);
  const Matrix h = build_design_matrix(params, cfg.activations, x);
  REQUIRE(h.rows() == 5);
  REQUIRE(h.cols() == 8);
  for (Eigen::Index r = 0; r < 5; ++r) {
    const auto row = hidden_features(params, cfg.activations, std::vector<double>(x.row(r).begin(), x.row(r).end()));
    for (Eigen::Index c = 0; c < 8; ++c) CHECK(std::abs(h(r, c) - row[c]) <= 1e-12);
  }
  CHECK(h.row(4) == h.row(1));
}

TEST_CASE("solver names") {
  CHECK(parse_solver("ridge") == SolverKind::Ridge);
  CHECK(parse_solver("pinv") == SolverKind::Pinv);
  CHECK_THROWS_AS(parse_solver("qr"), ConfigError);
}
