#include "uplift/lda.hpp"

#include <cmath>
#include <string>

#include "uplift/error.hpp"

namespace uplift {

Vector LdaModel::predict_proba(MatrixRef X) const {
    if (X.cols() != coefficients.size()) {
        throw DataError("lda model expects " + std::to_string(coefficients.size()) +
                        " features, got " + std::to_string(X.cols()));
    }
    return (1.0 / (1.0 + (-((X * coefficients).array() + intercept)).exp())).matrix();
}

LdaModel fit_lda(MatrixRef X, VectorRef y, bool standardize) {
    const Index n = X.rows();
    const Index m = X.cols();
    if (y.size() != n) throw DataError("fit_lda target length does not match rows");
    if (!X.allFinite()) throw DataError("fit_lda inputs must be finite");

    Index counts[2] = {0, 0};
    for (Index i = 0; i < n; ++i) {
        if (y[i] != 0.0 && y[i] != 1.0) {
            throw DataError("fit_lda targets must be 0 or 1 (row " + std::to_string(i) + ")");
        }
        ++counts[y[i] == 1.0 ? 1 : 0];
    }
    for (int c = 0; c < 2; ++c) {
        if (counts[c] < 2) {
            throw FitError("fit_lda requires at least two rows per class; class " +
                           std::to_string(c) + " has " + std::to_string(counts[c]));
        }
    }

    LdaModel model;
    model.scaler = standardize ? StandardScaler::fit(X) : StandardScaler::identity(m);
    const Matrix Xs = model.scaler.transform(X);

    Matrix means = Matrix::Zero(2, m);
    for (Index i = 0; i < n; ++i) {
        means.row(y[i] == 1.0 ? 1 : 0) += Xs.row(i);
    }
    for (int c = 0; c < 2; ++c) means.row(c) /= static_cast<double>(counts[c]);

    Matrix pooled = Matrix::Zero(m, m);
    for (Index i = 0; i < n; ++i) {
        const Vector centered = Xs.row(i).transpose() - means.row(y[i] == 1.0 ? 1 : 0).transpose();
        pooled += centered * centered.transpose();
    }
    pooled /= static_cast<double>(n - 2);

    model.priors.resize(2);
    model.priors << static_cast<double>(counts[0]) / static_cast<double>(n),
        static_cast<double>(counts[1]) / static_cast<double>(n);

    const double trace = pooled.trace();
    double epsilon = 0.0;
    Eigen::LLT<Matrix> llt(pooled);
    while (llt.info() != Eigen::Success) {
        epsilon = epsilon == 0.0
                      ? (trace > 0.0 ? 1e-8 * trace / static_cast<double>(m) : 1e-8)
                      : epsilon * 100.0;
        if (epsilon > 1e6 * (1.0 + trace)) {
            throw FitError("fit_lda covariance is irreparably singular");
        }
        llt.compute(pooled + epsilon * Matrix::Identity(m, m));
    }
    model.ridge = epsilon;
    model.covariance = pooled + epsilon * Matrix::Identity(m, m);

    const Vector diff = (means.row(1) - means.row(0)).transpose();
    const Vector w = llt.solve(diff);
    const double b = -0.5 * w.dot((means.row(1) + means.row(0)).transpose()) +
                     std::log(model.priors[1] / model.priors[0]);

    model.class_means.resize(2, m);
    for (int c = 0; c < 2; ++c) {
        model.class_means.row(c) = means.row(c).cwiseProduct(model.scaler.scale.transpose()) +
                                   model.scaler.mean.transpose();
    }
    model.coefficients = w.array() / model.scaler.scale.array();
    model.intercept = b - model.coefficients.dot(model.scaler.mean);
    return model;
}

}  // namespace uplift
