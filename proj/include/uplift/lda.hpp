#pragma once

#include "uplift/scaler.hpp"
#include "uplift/types.hpp"

namespace uplift {

/// Two-class linear discriminant with pooled covariance. The posterior of the
/// shared-covariance Gaussian model is logistic in x, so prediction reduces to
/// a stored raw-space linear discriminant.
struct LdaModel {
    Matrix class_means;   // 2 x m, raw space; row 0 = class 0
    Vector priors;        // length 2, from class counts
    Matrix covariance;    // pooled, standardized space
    double ridge = 0.0;   // epsilon actually added to the covariance diagonal
    Vector coefficients;  // discriminant in raw space
    double intercept = 0.0;
    StandardScaler scaler;

    Vector predict_proba(MatrixRef X) const;
};

/// Requires at least two rows per class. A covariance that fails its Cholesky
/// factorization is nudged by epsilon*I with epsilon = 1e-8 * trace / m,
/// escalated until the factorization succeeds.
LdaModel fit_lda(MatrixRef X, VectorRef y, bool standardize = true);

}  // namespace uplift
