#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "uplift/dataset.hpp"
#include "uplift/error.hpp"
#include "uplift/synthgen.hpp"

using namespace uplift;

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

GeneratorSpec base_spec() {
    GeneratorSpec spec;
    spec.n = 2000;
    spec.p = 3;
    spec.treatment_share = 0.5;
    spec.conversion_intercept = -1.0;
    spec.conversion_weights = Vector::Zero(3);
    spec.conversion_weights << 0.6, -0.4, 0.2;
    spec.conversion_treatment_intercept = 0.5;
    spec.conversion_treatment_weights = Vector::Zero(3);
    spec.revenue_intercept = 2.0;
    spec.revenue_weights = Vector::Zero(3);
    spec.revenue_weights << 0.3, 0.1, 0.0;
    spec.revenue_treatment_intercept = 0.2;
    spec.revenue_treatment_weights = Vector::Zero(3);
    spec.noise_sigma = 0.4;
    spec.seed = 99;
    return spec;
}

}  // namespace

TEST_CASE("spec validation") {
    GeneratorSpec spec = base_spec();
    CHECK_NOTHROW(spec.validate());
    SUBCASE("bad share") {
        spec.treatment_share = 1.0;
        CHECK_THROWS_AS(spec.validate(), DataError);
    }
    SUBCASE("negative sigma") {
        spec.noise_sigma = -0.1;
        CHECK_THROWS_AS(spec.validate(), DataError);
    }
    SUBCASE("weight length mismatch") {
        spec.conversion_weights = Vector::Zero(2);
        CHECK_THROWS_AS(spec.validate(), DataError);
    }
    SUBCASE("n and p positive") {
        spec.n = 0;
        CHECK_THROWS_AS(spec.validate(), DataError);
    }
    SUBCASE("empty weight vectors are zero-filled") {
        GeneratorSpec bare;
        bare.n = 10;
        bare.p = 4;
        bare.normalize();
        CHECK(bare.conversion_weights.size() == 4);
        CHECK(bare.conversion_weights.isZero());
        CHECK(bare.revenue_treatment_weights.size() == 4);
    }
}

TEST_CASE("generated datasets satisfy the schema") {
    const GeneratorSpec spec = base_spec();
    const UpliftDataset data = generate(spec);
    CHECK(data.size() == spec.n);
    CHECK(data.dim() == spec.p);
    REQUIRE(data.true_uplift().has_value());
    for (Index i = 0; i < data.size(); ++i) {
        if (data.conversion()[i] == 0) {
            CHECK(data.revenue()[i] == 0.0);
        } else {
            CHECK(data.revenue()[i] > 0.0);
        }
    }
    const GroupShares shares = group_shares(data);
    CHECK(std::abs(shares.treatment_share - 0.5) < 0.05);
}

TEST_CASE("identical seeds reproduce, different seeds differ") {
    const GeneratorSpec spec = base_spec();
    const UpliftDataset a = generate(spec);
    const UpliftDataset b = generate(spec);
    CHECK(a.covariates() == b.covariates());
    CHECK(a.treatment() == b.treatment());
    CHECK(a.conversion() == b.conversion());
    CHECK(a.revenue() == b.revenue());
    CHECK(*a.true_uplift() == *b.true_uplift());

    GeneratorSpec other = spec;
    other.seed = spec.seed + 1;
    const UpliftDataset c = generate(other);
    CHECK(a.covariates() != c.covariates());
}

TEST_CASE("no treatment effect makes arms converge") {
    GeneratorSpec spec = base_spec();
    spec.n = 100000;
    spec.conversion_treatment_intercept = 0.0;
    spec.conversion_treatment_weights.setZero();
    spec.revenue_treatment_intercept = 0.0;
    spec.revenue_treatment_weights.setZero();
    const UpliftDataset data = generate(spec);
    const UpliftSummary s = summarize(data);

    // pooled-variance standard error of the revenue-per-person difference
    double var_t = 0.0, var_c = 0.0;
    const double mean_t = s.treatment.revenue_per_person;
    const double mean_c = s.control.revenue_per_person;
    for (Index i = 0; i < data.size(); ++i) {
        const double d = data.revenue()[i] - (data.treatment()[i] == 1 ? mean_t : mean_c);
        (data.treatment()[i] == 1 ? var_t : var_c) += d * d;
    }
    var_t /= static_cast<double>(s.treatment.sessions - 1);
    var_c /= static_cast<double>(s.control.sessions - 1);
    const double se = std::sqrt(var_t / static_cast<double>(s.treatment.sessions) +
                                var_c / static_cast<double>(s.control.sessions));
    CHECK(std::abs(s.revenue_uplift) < 3.0 * se);
    CHECK((*data.true_uplift()).isZero());
}

TEST_CASE("saturated conversion gives exact noise-free revenue") {
    GeneratorSpec spec = base_spec();
    spec.n = 500;
    spec.conversion_intercept = 20.0;  // sigmoid(>=20) rounds to 1 at double precision odds
    spec.noise_sigma = 0.0;
    const UpliftDataset data = generate(spec);
    CHECK(data.conversion().sum() == data.size());
    for (Index i = 0; i < data.size(); ++i) {
        const Vector x = data.covariates().row(i).transpose();
        const double t = data.treatment()[i];
        const double expected =
            std::exp(spec.revenue_intercept + spec.revenue_weights.dot(x) +
                     t * (spec.revenue_treatment_intercept + spec.revenue_treatment_weights.dot(x)));
        CHECK(data.revenue()[i] == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("true_uplift closed form") {
    GeneratorSpec spec;
    spec.n = 10;
    spec.p = 2;
    spec.normalize();
    SUBCASE("identical arms give zero") {
        const Vector x = Vector::Constant(2, 0.7);
        CHECK(true_uplift(spec, x) == 0.0);
    }
    SUBCASE("sigmoid saturation at x = 0") {
        spec.conversion_treatment_intercept = 25.0;
        const Vector x = Vector::Zero(2);
        CHECK(true_uplift(spec, x) == doctest::Approx(0.5).epsilon(1e-9));
    }
    SUBCASE("dimension mismatch") {
        CHECK_THROWS_AS(true_uplift(spec, Vector::Zero(3)), DataError);
    }
    SUBCASE("lognormal mean correction enters") {
        spec.noise_sigma = 0.8;
        spec.conversion_intercept = 30.0;  // both arms convert surely
        spec.revenue_treatment_intercept = 0.5;
        const Vector x = Vector::Zero(2);
        const double expected = std::exp(0.5 + 0.32) - std::exp(0.32);
        CHECK(true_uplift(spec, x) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("conversion uplift matches a Monte Carlo oracle") {
    GeneratorSpec spec = base_spec();
    spec.n = 200000;
    spec.conversion_treatment_intercept = 0.5;
    spec.conversion_treatment_weights.setZero();
    const UpliftDataset data = generate(spec);
    const UpliftSummary s = summarize(data);

    // Monte Carlo estimate of E[sigmoid(a0+a.x+0.5) - sigmoid(a0+a.x)] over fresh draws.
    std::mt19937_64 rng(12345);
    std::normal_distribution<double> normal(0.0, 1.0);
    const int draws = 1000000;
    double mc_sum = 0.0, mc_sq = 0.0;
    Vector x(spec.p);
    for (int i = 0; i < draws; ++i) {
        for (Index j = 0; j < spec.p; ++j) x[j] = normal(rng);
        const double eta = spec.conversion_intercept + spec.conversion_weights.dot(x);
        const double diff = sigmoid(eta + 0.5) - sigmoid(eta);
        mc_sum += diff;
        mc_sq += diff * diff;
    }
    const double mc_mean = mc_sum / draws;
    const double mc_var = mc_sq / draws - mc_mean * mc_mean;

    // SE of the empirical uplift: binomial per group, plus the MC error.
    const double pt = s.treatment.conversion_rate;
    const double pc = s.control.conversion_rate;
    const double se_emp = std::sqrt(pt * (1 - pt) / static_cast<double>(s.treatment.sessions) +
                                    pc * (1 - pc) / static_cast<double>(s.control.sessions));
    const double se_mc = std::sqrt(mc_var / draws);
    const double se = std::sqrt(se_emp * se_emp + se_mc * se_mc);
    CHECK(std::abs(s.conversion_uplift - mc_mean) < 3.0 * se);
}

TEST_CASE("true_uplift matches a Monte Carlo mean of simulated outcomes at fixed x") {
    GeneratorSpec spec = base_spec();
    std::mt19937_64 rng(777);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Vector x(spec.p);
    for (Index j = 0; j < spec.p; ++j) x[j] = normal(rng);

    const int draws = 1000000;
    double sum = 0.0, sq = 0.0;
    const double eta_c = spec.conversion_intercept + spec.conversion_weights.dot(x);
    const double eta_t =
        eta_c + spec.conversion_treatment_intercept + spec.conversion_treatment_weights.dot(x);
    const double mu_c = spec.revenue_intercept + spec.revenue_weights.dot(x);
    const double mu_t =
        mu_c + spec.revenue_treatment_intercept + spec.revenue_treatment_weights.dot(x);
    for (int i = 0; i < draws; ++i) {
        const double y1 =
            (unif(rng) < sigmoid(eta_t)) ? std::exp(mu_t + spec.noise_sigma * normal(rng)) : 0.0;
        const double y0 =
            (unif(rng) < sigmoid(eta_c)) ? std::exp(mu_c + spec.noise_sigma * normal(rng)) : 0.0;
        const double d = y1 - y0;
        sum += d;
        sq += d * d;
    }
    const double mc_mean = sum / draws;
    const double mc_var = sq / draws - mc_mean * mc_mean;
    const double se = std::sqrt(mc_var / draws);
    CHECK(std::abs(true_uplift(spec, x) - mc_mean) < 3.0 * se);
}

TEST_CASE("mean oracle uplift reproduces empirical revenue uplift") {
    GeneratorSpec spec = base_spec();
    spec.n = 100000;
    const UpliftDataset data = generate(spec);
    const UpliftSummary s = summarize(data);
    const double oracle_mean = data.true_uplift()->mean();

    double var_t = 0.0, var_c = 0.0;
    const double mean_t = s.treatment.revenue_per_person;
    const double mean_c = s.control.revenue_per_person;
    for (Index i = 0; i < data.size(); ++i) {
        const double d = data.revenue()[i] - (data.treatment()[i] == 1 ? mean_t : mean_c);
        (data.treatment()[i] == 1 ? var_t : var_c) += d * d;
    }
    var_t /= static_cast<double>(s.treatment.sessions - 1);
    var_c /= static_cast<double>(s.control.sessions - 1);
    const double se = std::sqrt(var_t / static_cast<double>(s.treatment.sessions) +
                                var_c / static_cast<double>(s.control.sessions));
    CHECK(std::abs(s.revenue_uplift - oracle_mean) < 3.0 * se);
}

TEST_CASE("generator spec JSON round-trip") {
    const GeneratorSpec spec = base_spec();
    const nlohmann::json j = spec;
    const GeneratorSpec back = j.get<GeneratorSpec>();
    CHECK(back.n == spec.n);
    CHECK(back.p == spec.p);
    CHECK(back.treatment_share == spec.treatment_share);
    CHECK(back.conversion_weights == spec.conversion_weights);
    CHECK(back.revenue_treatment_intercept == spec.revenue_treatment_intercept);
    CHECK(back.noise_sigma == spec.noise_sigma);
    CHECK(back.seed == spec.seed);
    const UpliftDataset a = generate(spec);
    const UpliftDataset b = generate(back);
    CHECK(a.covariates() == b.covariates());
    CHECK(a.revenue() == b.revenue());
}
