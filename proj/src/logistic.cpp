#include "uplift/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace uplift {

namespace {

double log1pexp(double z) {
    return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

Vector sigmoid(const Vector& z) {
    return (1.0 / (1.0 + (-z.array()).exp())).matrix();
}

// Mean negative log-likelihood; penalty added by the caller.
double nll(const Matrix& design, const Vector& y, const Vector& w) {
    const Vector logits = design * w;
    double total = 0.0;
    for (Index i = 0; i < logits.size(); ++i) {
        total += log1pexp(logits[i]) - y[i] * logits[i];
    }
    return total / static_cast<double>(logits.size());
}

Vector nll_gradient(const Matrix& design, const Vector& y, const Vector& w) {
    const Vector p = sigmoid(design * w);
    return design.transpose() * (p - y) / static_cast<double>(design.rows());
}

ConvergenceReport newton_l2(const Matrix& design, const Vector& y, double lambda,
                            const LogisticOptions& options, Vector& w) {
    const Index m = design.cols() - 1;
    const auto n = static_cast<double>(design.rows());
    auto objective = [&](const Vector& v) {
        return nll(design, y, v) + 0.5 * lambda * v.head(m).squaredNorm();
    };
    ConvergenceReport report;
    for (int it = 0; it < options.max_iterations; ++it) {
        const Vector p = sigmoid(design * w);
        Vector g = design.transpose() * (p - y) / n;
        g.head(m) += lambda * w.head(m);
        report.iterations = it;
        report.gradient_norm = g.norm();
        if (report.gradient_norm <= options.tolerance) {
            report.converged = true;
            return report;
        }
        const Vector weights = p.array() * (1.0 - p.array());
        Matrix hessian = design.transpose() * weights.asDiagonal() * design / n;
        hessian.topLeftCorner(m, m) += lambda * Matrix::Identity(m, m);
        hessian.diagonal().array() += 1e-12;
        const Vector direction = hessian.ldlt().solve(-g);
        const double slope = g.dot(direction);
        const double f0 = objective(w);
        double step = 1.0;
        while (step > 1e-12 && objective(w + step * direction) > f0 + 1e-4 * step * slope) {
            step *= 0.5;
        }
        w += step * direction;
        ++report.iterations;
    }
    const Vector p = sigmoid(design * w);
    Vector g = design.transpose() * (p - y) / n;
    g.head(m) += lambda * w.head(m);
    report.gradient_norm = g.norm();
    report.converged = report.gradient_norm <= options.tolerance;
    return report;
}

double l1_subgradient_norm(const Vector& g, const Vector& w, double lambda, Index m) {
    Vector gs = g;
    for (Index j = 0; j < m; ++j) {
        if (w[j] != 0.0) {
            gs[j] += lambda * (w[j] > 0.0 ? 1.0 : -1.0);
        } else {
            gs[j] -= std::clamp(g[j], -lambda, lambda);
        }
    }
    return gs.norm();
}

ConvergenceReport prox_l1(const Matrix& design, const Vector& y, double lambda,
                          const LogisticOptions& options, Vector& w) {
    const Index m = design.cols() - 1;
    const auto n = static_cast<double>(design.rows());
    // Lipschitz constant of the smooth part: lambda_max(A'A) / (4n).
    const Matrix gram = design.transpose() * design;
    const double lipschitz =
        Eigen::SelfAdjointEigenSolver<Matrix>(gram).eigenvalues().maxCoeff() / (4.0 * n);
    const double step = 1.0 / lipschitz;

    auto soft = [&](Vector v) {
        for (Index j = 0; j < m; ++j) {
            const double t = lambda * step;
            v[j] = v[j] > t ? v[j] - t : (v[j] < -t ? v[j] + t : 0.0);
        }
        return v;
    };

    ConvergenceReport report;
    Vector momentum = w;
    double theta = 1.0;
    for (int it = 0; it < options.max_prox_iterations; ++it) {
        const Vector w_next = soft(momentum - step * nll_gradient(design, y, momentum));
        report.iterations = it + 1;
        const Vector g_next = nll_gradient(design, y, w_next);
        report.gradient_norm = l1_subgradient_norm(g_next, w_next, lambda, m);
        if (report.gradient_norm <= options.l1_tolerance) {
            w = w_next;
            report.converged = true;
            return report;
        }
        if ((momentum - w_next).dot(w_next - w) > 0.0) {
            // Momentum points uphill: restart acceleration.
            theta = 1.0;
            momentum = w_next;
        } else {
            const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
            momentum = w_next + ((theta - 1.0) / theta_next) * (w_next - w);
            theta = theta_next;
        }
        w = w_next;
    }
    return report;
}

}  // namespace

Vector LogisticModel::predict_proba(MatrixRef X) const {
    if (X.cols() != coefficients.size()) {
        throw DataError("logistic model expects " + std::to_string(coefficients.size()) +
                        " features, got " + std::to_string(X.cols()));
    }
    Vector p = sigmoid(((X * coefficients).array() + intercept).matrix());
    const double hi = std::nextafter(1.0, 0.0);
    for (Index i = 0; i < p.size(); ++i) p[i] = std::clamp(p[i], 1e-300, hi);
    return p;
}

LogisticModel fit_logistic(MatrixRef X, VectorRef y, double lambda, Penalty penalty,
                           bool standardize, const LogisticOptions& options) {
    const Index n = X.rows();
    const Index m = X.cols();
    if (n < 1) throw DataError("fit_logistic requires at least one row");
    if (y.size() != n) throw DataError("fit_logistic target length does not match rows");
    if (lambda < 0.0) throw DataError("logistic penalty must be non-negative");
    if (!X.allFinite()) throw DataError("fit_logistic inputs must be finite");
    for (Index i = 0; i < n; ++i) {
        if (y[i] != 0.0 && y[i] != 1.0) {
            throw DataError("fit_logistic targets must be 0 or 1 (row " + std::to_string(i) + ")");
        }
    }

    LogisticModel model;
    model.lambda = lambda;
    model.penalty = penalty;
    model.standardized = standardize;
    model.scaler = standardize ? StandardScaler::fit(X) : StandardScaler::identity(m);

    Matrix design(n, m + 1);
    design.leftCols(m) = standardize ? model.scaler.transform(X) : Matrix(X);
    design.col(m).setOnes();

    Vector w = Vector::Zero(m + 1);
    model.report = penalty == Penalty::L2 || lambda == 0.0
                       ? newton_l2(design, y, lambda, options, w)
                       : prox_l1(design, y, lambda, options, w);
    model.coefficients = w.head(m).array() / model.scaler.scale.array();
    model.intercept = w[m] - model.coefficients.dot(model.scaler.mean);
    if (!model.report.converged) {
        throw ConvergenceError(
            "logistic fit did not converge: gradient norm " +
                std::to_string(model.report.gradient_norm) + " after " +
                std::to_string(model.report.iterations) + " iterations",
            model.report);
    }
    return model;
}

}  // namespace uplift
