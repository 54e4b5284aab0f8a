#pragma once

#include "uplift/error.hpp"
#include "uplift/scaler.hpp"
#include "uplift/types.hpp"

namespace uplift {

enum class Penalty { L1, L2 };

struct ConvergenceReport {
    int iterations = 0;
    double gradient_norm = 0.0;
    bool converged = false;
};

/// Optimizer gave up before reaching tolerance; the report says where.
struct ConvergenceError : FitError {
    ConvergenceError(const std::string& message, ConvergenceReport r)
        : FitError(message), report(r) {}
    ConvergenceReport report;
};

struct LogisticOptions {
    int max_iterations = 200;       // Newton steps (L2 / unpenalized)
    int max_prox_iterations = 20000;  // proximal gradient steps (L1)
    double tolerance = 1e-8;        // L2 gradient norm target
    double l1_tolerance = 1e-6;     // L1 minimal-subgradient norm target
};

/// Penalized logistic regression. The objective is mean negative Bernoulli
/// log-likelihood plus lambda/2 ||beta||^2 (L2) or lambda ||beta||_1 (L1),
/// intercept unpenalized. Coefficients are stored in raw feature space.
struct LogisticModel {
    Vector coefficients;
    double intercept = 0.0;
    double lambda = 0.0;
    Penalty penalty = Penalty::L2;
    bool standardized = true;
    StandardScaler scaler;
    ConvergenceReport report;

    Vector predict_proba(MatrixRef X) const;
};

/// L2 (and unpenalized) fits use damped Newton; L1 uses accelerated proximal
/// gradient. Throws ConvergenceError when the iteration cap is hit before the
/// tolerance, carrying the final report.
LogisticModel fit_logistic(MatrixRef X, VectorRef y, double lambda, Penalty penalty = Penalty::L2,
                           bool standardize = true, const LogisticOptions& options = {});

}  // namespace uplift
