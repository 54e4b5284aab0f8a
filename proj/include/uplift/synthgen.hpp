#pragma once

#include <cstdint>

#include "json.hpp"
#include "uplift/dataset.hpp"
#include "uplift/types.hpp"

namespace uplift {

/// Zero-inflated campaign generator. Covariates are i.i.d. standard normal;
/// treatment assignment is Bernoulli(treatment_share); conversion follows a
/// logistic model with a treatment shift; revenue of converters is lognormal
/// with a treatment shift on the log scale. The closed-form mean of the
/// lognormal arm makes the per-record uplift available exactly.
struct GeneratorSpec {
    Index n = 10000;
    Index p = 5;
    double treatment_share = 0.5;
    double conversion_intercept = 0.0;               // a0
    Vector conversion_weights;                       // a, length p
    double conversion_treatment_intercept = 0.0;     // b0
    Vector conversion_treatment_weights;             // b
    double revenue_intercept = 0.0;                  // c0
    Vector revenue_weights;                          // c
    double revenue_treatment_intercept = 0.0;        // d0
    Vector revenue_treatment_weights;                // d
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;

    /// Zero weight vectors of the right length for unset fields.
    void normalize();
    void validate() const;
};

void to_json(nlohmann::json& j, const GeneratorSpec& spec);
void from_json(const nlohmann::json& j, GeneratorSpec& spec);

/// Draws a dataset from the spec. The oracle column is filled with
/// true_uplift evaluated at each record's covariates. Deterministic per seed.
UpliftDataset generate(const GeneratorSpec& spec);

/// Exact expected revenue difference E[Y | T=1, x] - E[Y | T=0, x].
double true_uplift(const GeneratorSpec& spec, VectorRef x);

}  // namespace uplift
