#pragma once

#include "uplift/scaler.hpp"
#include "uplift/types.hpp"

namespace uplift {

/// Least-squares model y ~ X beta + b with optional ridge penalty on beta.
/// Coefficients are stored in the raw feature space regardless of whether the
/// fit standardized internally, so predict is a plain affine map.
struct LinearModel {
    Vector coefficients;
    double intercept = 0.0;
    double alpha = 0.0;
    bool standardized = true;
    StandardScaler scaler;

    Vector predict(MatrixRef X) const;
};

/// Minimizes ||y - (X beta + b)||^2 + alpha ||beta||^2 with the intercept
/// unpenalized; with standardize the penalty applies to standardized
/// coefficients. alpha = 0 uses a rank-revealing solve, so singular designs
/// yield the minimum-norm least-squares solution.
LinearModel fit_linear(MatrixRef X, VectorRef y, double alpha = 0.0, bool standardize = true);

}  // namespace uplift
