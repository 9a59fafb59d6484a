#pragma once

#include <Eigen/Core>

namespace nnrw {

/// Row-major so that one sample (or one hidden unit) is one contiguous row.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

}  // namespace nnrw
