#pragma once

#include <Eigen/Dense>

namespace uplift {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IntVector = Eigen::VectorXi;
using Index = Eigen::Index;

using MatrixRef = Eigen::Ref<const Matrix>;
using VectorRef = Eigen::Ref<const Vector>;
using IntVectorRef = Eigen::Ref<const IntVector>;

}  // namespace uplift
