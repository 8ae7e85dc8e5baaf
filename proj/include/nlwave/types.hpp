#pragma once

#include <Eigen/Core>

namespace nlwave {

using Real = double;
using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Row-major view used when flattened fields are reshaped to (axis0, axis1).
using RowMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using VectorRef = Eigen::Ref<const Vector>;

}  // namespace nlwave
