#include "uplift/synthgen.hpp"

#include <cmath>
#include <random>

namespace uplift {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void require_length(const Vector& w, Index p, const char* name) {
    if (w.size() != p) {
        throw DataError(std::string(name) + " must have length " + std::to_string(p) + ", got " +
                        std::to_string(w.size()));
    }
}

}  // namespace

void GeneratorSpec::normalize() {
    for (Vector* w : {&conversion_weights, &conversion_treatment_weights, &revenue_weights,
                      &revenue_treatment_weights}) {
        if (w->size() == 0) *w = Vector::Zero(p);
    }
}

void GeneratorSpec::validate() const {
    if (n < 1) throw DataError("generator n must be positive");
    if (p < 1) throw DataError("generator p must be positive");
    if (!(treatment_share > 0.0 && treatment_share < 1.0)) {
        throw DataError("treatment_share must lie in (0,1)");
    }
    if (noise_sigma < 0.0) throw DataError("noise_sigma must be non-negative");
    require_length(conversion_weights, p, "conversion_weights");
    require_length(conversion_treatment_weights, p, "conversion_treatment_weights");
    require_length(revenue_weights, p, "revenue_weights");
    require_length(revenue_treatment_weights, p, "revenue_treatment_weights");
}

void to_json(nlohmann::json& j, const GeneratorSpec& spec) {
    auto vec = [](const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
    j = nlohmann::json{{"n", spec.n},
                       {"p", spec.p},
                       {"treatment_share", spec.treatment_share},
                       {"conversion_intercept", spec.conversion_intercept},
                       {"conversion_weights", vec(spec.conversion_weights)},
                       {"conversion_treatment_intercept", spec.conversion_treatment_intercept},
                       {"conversion_treatment_weights", vec(spec.conversion_treatment_weights)},
                       {"revenue_intercept", spec.revenue_intercept},
                       {"revenue_weights", vec(spec.revenue_weights)},
                       {"revenue_treatment_intercept", spec.revenue_treatment_intercept},
                       {"revenue_treatment_weights", vec(spec.revenue_treatment_weights)},
                       {"noise_sigma", spec.noise_sigma},
                       {"seed", spec.seed}};
}

void from_json(const nlohmann::json& j, GeneratorSpec& spec) {
    spec = GeneratorSpec{};
    spec.n = j.at("n").get<Index>();
    spec.p = j.at("p").get<Index>();
    spec.treatment_share = j.value("treatment_share", 0.5);
    auto vec = [&](const char* key) {
        if (!j.contains(key)) return Vector();
        const auto values = j.at(key).get<std::vector<double>>();
        return Vector(Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size())));
    };
    spec.conversion_intercept = j.value("conversion_intercept", 0.0);
    spec.conversion_weights = vec("conversion_weights");
    spec.conversion_treatment_intercept = j.value("conversion_treatment_intercept", 0.0);
    spec.conversion_treatment_weights = vec("conversion_treatment_weights");
    spec.revenue_intercept = j.value("revenue_intercept", 0.0);
    spec.revenue_weights = vec("revenue_weights");
    spec.revenue_treatment_intercept = j.value("revenue_treatment_intercept", 0.0);
    spec.revenue_treatment_weights = vec("revenue_treatment_weights");
    spec.noise_sigma = j.value("noise_sigma", 0.0);
    spec.seed = j.value("seed", std::uint64_t{0});
    spec.normalize();
}

UpliftDataset generate(const GeneratorSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);

    Matrix covariates(spec.n, spec.p);
    IntVector treatment(spec.n);
    IntVector conversion(spec.n);
    Vector revenue(spec.n);
    Vector oracle(spec.n);
    Vector x(spec.p);
    // Fixed per-record draw order (p normals, two uniforms, one normal) keeps
    // the stream layout independent of the sampled outcomes.
    for (Index i = 0; i < spec.n; ++i) {
        for (Index j = 0; j < spec.p; ++j) x[j] = normal(rng);
        const int t = uniform(rng) < spec.treatment_share ? 1 : 0;
        const double logit = spec.conversion_intercept + spec.conversion_weights.dot(x) +
                             t * (spec.conversion_treatment_intercept +
                                  spec.conversion_treatment_weights.dot(x));
        const int conv = uniform(rng) < sigmoid(logit) ? 1 : 0;
        const double eps = normal(rng) * spec.noise_sigma;
        double rev = 0.0;
        if (conv == 1) {
            rev = std::exp(spec.revenue_intercept + spec.revenue_weights.dot(x) +
                           t * (spec.revenue_treatment_intercept +
                                spec.revenue_treatment_weights.dot(x)) +
                           eps);
        }
        covariates.row(i) = x.transpose();
        treatment[i] = t;
        conversion[i] = conv;
        revenue[i] = rev;
        oracle[i] = true_uplift(spec, x);
    }
    return UpliftDataset(std::move(covariates), std::move(treatment), std::move(conversion),
                         std::move(revenue), {}, std::move(oracle));
}

double true_uplift(const GeneratorSpec& spec, VectorRef x) {
    spec.validate();
    if (x.size() != spec.p) {
        throw DataError("covariate vector has length " + std::to_string(x.size()) + ", expected " +
                        std::to_string(spec.p));
    }
    const double half_var = 0.5 * spec.noise_sigma * spec.noise_sigma;
    const double base_logit = spec.conversion_intercept + spec.conversion_weights.dot(x);
    const double base_log_rev = spec.revenue_intercept + spec.revenue_weights.dot(x);
    const double treated = sigmoid(base_logit + spec.conversion_treatment_intercept +
                                   spec.conversion_treatment_weights.dot(x)) *
                           std::exp(base_log_rev + spec.revenue_treatment_intercept +
                                    spec.revenue_treatment_weights.dot(x) + half_var);
    const double control = sigmoid(base_logit) * std::exp(base_log_rev + half_var);
    return treated - control;
}

}  // namespace uplift
