#include "uplift/linear.hpp"

#include <string>

#include "uplift/error.hpp"

namespace uplift {

Vector LinearModel::predict(MatrixRef X) const {
    if (X.cols() != coefficients.size()) {
        throw DataError("linear model expects " + std::to_string(coefficients.size()) +
                        " features, got " + std::to_string(X.cols()));
    }
    return ((X * coefficients).array() + intercept).matrix();
}

LinearModel fit_linear(MatrixRef X, VectorRef y, double alpha, bool standardize) {
    const Index n = X.rows();
    const Index m = X.cols();
    if (n < 1) throw DataError("fit_linear requires at least one row");
    if (y.size() != n) throw DataError("fit_linear target length does not match rows");
    if (alpha < 0.0) throw DataError("ridge penalty must be non-negative");
    if (!X.allFinite() || !y.allFinite()) throw DataError("fit_linear inputs must be finite");

    LinearModel model;
    model.alpha = alpha;
    model.standardized = standardize;
    model.scaler = standardize ? StandardScaler::fit(X) : StandardScaler::identity(m);

    Matrix design(n, m + 1);
    design.leftCols(m) = standardize ? model.scaler.transform(X) : Matrix(X);
    design.col(m).setOnes();

    Vector beta;
    if (alpha > 0.0) {
        // Penalized normal equations are positive definite: the penalty covers
        // the coefficients and the intercept column is nonzero.
        Matrix gram = design.transpose() * design;
        gram.topLeftCorner(m, m) += alpha * Matrix::Identity(m, m);
        beta = gram.ldlt().solve(design.transpose() * y);
    } else {
        beta = Eigen::CompleteOrthogonalDecomposition<Matrix>(design).solve(y);
    }

    model.coefficients = beta.head(m).array() / model.scaler.scale.array();
    model.intercept = beta[m] - model.coefficients.dot(model.scaler.mean);
    return model;
}

}  // namespace uplift
