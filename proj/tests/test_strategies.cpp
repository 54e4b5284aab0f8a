#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>
#include <variant>

#include "doctest.h"
#include "uplift/error.hpp"
#include "uplift/evaluation.hpp"
#include "uplift/strategies.hpp"
#include "uplift/synthgen.hpp"

using namespace uplift;

namespace {

GeneratorSpec demo_spec(std::uint64_t seed, Index n = 2500) {
    GeneratorSpec spec;
    spec.n = n;
    spec.p = 3;
    spec.conversion_intercept = -1.2;
    spec.conversion_weights = (Vector(3) << 0.7, -0.4, 0.2).finished();
    spec.conversion_treatment_intercept = 0.5;
    spec.conversion_treatment_weights = (Vector(3) << 0.3, 0.0, 0.0).finished();
    spec.revenue_intercept = 2.2;
    spec.revenue_weights = (Vector(3) << 0.25, 0.1, 0.0).finished();
    spec.revenue_treatment_intercept = 0.2;
    spec.revenue_treatment_weights = (Vector(3) << 0.15, 0.0, 0.0).finished();
    spec.noise_sigma = 0.3;
    spec.seed = seed;
    return spec;
}

// Treatment block with revenue driven by x, plus an identical control copy.
UpliftDataset mirrored_dataset(Index n_half) {
    std::mt19937_64 rng(55);
    std::normal_distribution<double> normal(0.0, 1.0);
    const Index n = 2 * n_half;
    Matrix x(n, 2);
    IntVector t(n);
    IntVector c(n);
    Vector r(n);
    for (Index i = 0; i < n_half; ++i) {
        x(i, 0) = normal(rng);
        x(i, 1) = normal(rng);
        const double rev = std::abs(x(i, 0)) > 0.5 ? std::exp(1.0 + 0.5 * x(i, 1)) : 0.0;
        for (Index side = 0; side < 2; ++side) {
            const Index row = i + side * n_half;
            x.row(row) = x.row(i);
            t[row] = side == 0 ? 1 : 0;
            c[row] = rev > 0.0 ? 1 : 0;
            r[row] = rev;
        }
    }
    return UpliftDataset(std::move(x), std::move(t), std::move(c), std::move(r), {});
}

}  // namespace

TEST_CASE("spec validation enforces the strategy table") {
    StrategySpec spec;
    spec.kind = StrategyKind::Crvtw;
    spec.stage = StageKind::TwoStageSmote;
    CHECK_THROWS_AS(spec.validate(), DataError);  // smote only under rdt

    spec.kind = StrategyKind::Rdt;
    CHECK_NOTHROW(spec.validate());

    spec.kind = StrategyKind::Oracle;
    spec.stage = StageKind::TwoStage;
    CHECK_THROWS_AS(spec.validate(), DataError);
    spec.stage = StageKind::OneStage;
    CHECK_NOTHROW(spec.validate());

    spec = StrategySpec{};
    spec.kind = StrategyKind::Rdt;
    spec.classifier = LearnerSpec::ols();  // not a classifier
    CHECK_THROWS_AS(spec.validate(), DataError);

    spec = StrategySpec{};
    spec.regressor = LearnerSpec::lda();  // not a regressor
    CHECK_THROWS_AS(spec.validate(), DataError);

    spec = StrategySpec{};
    spec.kind = StrategyKind::Indirect;
    spec.stage = StageKind::TwoStage;
    CHECK_NOTHROW(spec.validate());
    CHECK(spec.needs_classifier());
    CHECK(spec.needs_regressor());
    CHECK(spec.name() == "indirect_two_stage");
    spec.label = "custom";
    CHECK(spec.name() == "custom");
}

TEST_CASE("indirect uplift cancels on mirrored data") {
    const UpliftDataset data = mirrored_dataset(300);
    StrategySpec spec;
    spec.kind = StrategyKind::Indirect;
    spec.stage = StageKind::OneStage;
    spec.regressor = LearnerSpec::ols();
    const FittedStrategy model = fit_strategy(spec, data);
    const Vector scores = score(model, data);
    for (Index i = 0; i < scores.size(); ++i) {
        CHECK(std::abs(scores[i]) <= 1e-9);
    }
}

TEST_CASE("itm recovers the interaction closed form") {
    // y = 1 + 2x + 3T + 4xT, noise-free
    const Index n = 200;
    std::mt19937_64 rng(56);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix x(n, 1);
    IntVector t(n);
    IntVector c(n);
    Vector r(n);
    for (Index i = 0; i < n; ++i) {
        x(i, 0) = normal(rng) + 3.0;  // keep y positive so it is valid revenue
        t[i] = i % 2 == 0 ? 1 : 0;
        const double y = 1.0 + 2.0 * x(i, 0) + 3.0 * t[i] + 4.0 * x(i, 0) * t[i];
        REQUIRE(y > 0.0);
        r[i] = y;
        c[i] = 1;
    }
    const UpliftDataset data(x, t, c, r, {});

    StrategySpec spec;
    spec.kind = StrategyKind::Itm;
    spec.stage = StageKind::OneStage;
    spec.regressor = LearnerSpec::ols();
    const FittedStrategy model = fit_strategy(spec, data);
    const Vector scores = score(model, data);
    for (Index i = 0; i < n; ++i) {
        CHECK(scores[i] == doctest::Approx(3.0 + 4.0 * x(i, 0)).epsilon(1e-6));
    }
}

TEST_CASE("two-stage scores are the product of the stages") {
    const UpliftDataset data = generate(demo_spec(60));
    StrategySpec spec;
    spec.kind = StrategyKind::Crvtw;
    spec.stage = StageKind::TwoStage;
    spec.classifier = LearnerSpec::logistic(1e-2);
    spec.regressor = LearnerSpec::ridge(1.0);
    const FittedStrategy model = fit_strategy(spec, data);
    REQUIRE(model.classifier.has_value());
    REQUIRE(model.regressor.has_value());
    const Vector p = classify(*model.classifier, data.covariates());
    const Vector m = regress(*model.regressor, data.covariates());
    const Vector scores = score(model, data);
    CHECK(scores.isApprox((p.array() * m.array()).matrix(), 1e-12));
}

TEST_CASE("rdt one-stage scores are probabilities") {
    const UpliftDataset data = generate(demo_spec(61));
    for (const LearnerSpec& clf :
         {LearnerSpec::logistic(1e-2), LearnerSpec::lda(),
          LearnerSpec::extra_trees({.n_trees = 20, .min_samples_leaf = 25, .seed = 3})}) {
        StrategySpec spec;
        spec.kind = StrategyKind::Rdt;
        spec.stage = StageKind::OneStage;
        spec.classifier = clf;
        const Vector scores = score(fit_strategy(spec, data), data);
        CHECK(scores.minCoeff() >= 0.0);
        CHECK(scores.maxCoeff() <= 1.0);
    }
}

TEST_CASE("response scores ignore the treatment flag") {
    const UpliftDataset data = generate(demo_spec(62));
    StrategySpec spec;
    spec.kind = StrategyKind::Response;
    spec.stage = StageKind::OneStage;
    spec.regressor = LearnerSpec::ridge(1.0);
    const FittedStrategy model = fit_strategy(spec, data);
    const Vector base = score(model, data);

    IntVector flipped = data.treatment();
    for (Index i = 0; i < flipped.size(); ++i) flipped[i] = 1 - flipped[i];
    const UpliftDataset alt(data.covariates(), flipped, data.conversion(), data.revenue(),
                            data.feature_names());
    CHECK(score(model, alt) == base);
}

TEST_CASE("every strategy and stage fits and produces finite scores") {
    const UpliftDataset data = generate(demo_spec(63));
    const UpliftDataset probe = generate(demo_spec(64, 500));
    for (StrategyKind kind : {StrategyKind::Rdt, StrategyKind::Crvtw, StrategyKind::Itm,
                              StrategyKind::Indirect, StrategyKind::Response}) {
        for (StageKind stage : {StageKind::OneStage, StageKind::TwoStage}) {
            StrategySpec spec;
            spec.kind = kind;
            spec.stage = stage;
            spec.classifier = LearnerSpec::logistic(1e-2);
            spec.regressor = LearnerSpec::ridge(1.0);
            CAPTURE(to_string(kind));
            CAPTURE(to_string(stage));
            const FittedStrategy model = fit_strategy(spec, data);
            const Vector scores = score(model, probe);
            CHECK(scores.size() == probe.size());
            CHECK(scores.allFinite());
        }
    }
    StrategySpec smote_spec;
    smote_spec.kind = StrategyKind::Rdt;
    smote_spec.stage = StageKind::TwoStageSmote;
    smote_spec.smote.seed = 13;
    const Vector scores = score(fit_strategy(smote_spec, data), probe);
    CHECK(scores.allFinite());
}

TEST_CASE("fitting is deterministic") {
    const UpliftDataset data = generate(demo_spec(65));
    StrategySpec spec;
    spec.kind = StrategyKind::Rdt;
    spec.stage = StageKind::OneStage;
    spec.classifier = LearnerSpec::extra_trees({.n_trees = 15, .min_samples_leaf = 30, .seed = 8});
    const Vector a = score(fit_strategy(spec, data), data);
    const Vector b = score(fit_strategy(spec, data), data);
    CHECK(a == b);
}

TEST_CASE("scoring validates the covariate dimension") {
    const UpliftDataset data = generate(demo_spec(66));
    StrategySpec spec;
    spec.kind = StrategyKind::Crvtw;
    spec.stage = StageKind::OneStage;
    const FittedStrategy model = fit_strategy(spec, data);

    GeneratorSpec wrong = demo_spec(67);
    wrong.p = 4;
    wrong.normalize();
    CHECK_THROWS_AS(score(model, generate(wrong)), DataError);
}

TEST_CASE("two-stage fit requires purchasers") {
    // no purchaser anywhere: second stage has nothing to regress on
    Matrix x = Matrix::Random(20, 2);
    IntVector t(20);
    IntVector c = IntVector::Zero(20);
    Vector r = Vector::Zero(20);
    for (Index i = 0; i < 20; ++i) t[i] = i % 2 == 0 ? 1 : 0;
    const UpliftDataset data(x, t, c, r, {});
    StrategySpec spec;
    spec.kind = StrategyKind::Crvtw;
    spec.stage = StageKind::TwoStage;
    CHECK_THROWS_AS(fit_strategy(spec, data), FitError);
}

TEST_CASE("oracle and constant baselines") {
    const UpliftDataset data = generate(demo_spec(68));
    StrategySpec oracle;
    oracle.kind = StrategyKind::Oracle;
    const Vector oracle_scores = score(fit_strategy(oracle, data), data);
    CHECK(oracle_scores == *data.true_uplift());

    StrategySpec constant;
    constant.kind = StrategyKind::Constant;
    const Vector const_scores = score(fit_strategy(constant, data), data);
    CHECK(const_scores == Vector::Zero(data.size()));

    const UpliftDataset stripped(data.covariates(), data.treatment(), data.conversion(),
                                 data.revenue(), data.feature_names());
    const FittedStrategy fitted = fit_strategy(oracle, stripped);
    CHECK_THROWS_AS(score(fitted, stripped), DataError);
}

TEST_CASE("monotone transforms of scores preserve the qini curve") {
    const UpliftDataset data = generate(demo_spec(69));
    StrategySpec spec;
    spec.kind = StrategyKind::Crvtw;
    spec.stage = StageKind::OneStage;
    const Vector scores = score(fit_strategy(spec, data), data);
    const double q = qini_coefficient(qini_curve(decile_table(scores, data, 10)));
    const Vector warped = (scores.array().atan() * 2.0 + 5.0).matrix();
    const double qw = qini_coefficient(qini_curve(decile_table(warped, data, 10)));
    CHECK(qw == doctest::Approx(q).epsilon(1e-12));
}

TEST_CASE("selection: singleton grid refits on the union") {
    const UpliftDataset all = generate(demo_spec(70, 3000));
    const DatasetSplits splits = partition(all, SplitSpec{0.5, 0.25, 0.25, 1});
    StrategySpec spec;
    spec.kind = StrategyKind::Crvtw;
    spec.stage = StageKind::OneStage;
    spec.regressor = LearnerSpec::ridge(1.0);
    const SelectionResult result = select_model({spec}, splits.train, splits.valid);
    CHECK(result.best_index == 0);
    REQUIRE(result.candidates.size() == 1);
    CHECK(result.candidates[0].ok);

    // the returned model is the winner refit on train + valid
    const UpliftDataset merged = concat(splits.train, splits.valid);
    const Vector expected = score(fit_strategy(spec, merged), splits.test);
    CHECK(score(result.model, splits.test) == expected);
    const Vector train_only = score(fit_strategy(spec, splits.train), splits.test);
    CHECK(score(result.model, splits.test) != train_only);
}

TEST_CASE("selection: ties break by grid order and failures are recorded") {
    const UpliftDataset all = generate(demo_spec(71, 2000));
    const DatasetSplits splits = partition(all, SplitSpec{0.5, 0.25, 0.25, 2});

    SUBCASE("identical candidates tie to the first") {
        StrategySpec spec;
        spec.kind = StrategyKind::Crvtw;
        spec.stage = StageKind::OneStage;
        spec.label = "first";
        StrategySpec same = spec;
        same.label = "second";
        const SelectionResult result = select_model({spec, same}, splits.train, splits.valid);
        CHECK(result.best_index == 0);
        CHECK(result.best.label == "first");
        CHECK(result.candidates[0].valid_qini == result.candidates[1].valid_qini);
    }
    SUBCASE("oracle beats the constant baseline") {
        StrategySpec oracle;
        oracle.kind = StrategyKind::Oracle;
        StrategySpec constant;
        constant.kind = StrategyKind::Constant;
        const SelectionResult result =
            select_model({constant, oracle}, splits.train, splits.valid);
        CHECK(result.best_index == 1);
        CHECK(result.best.kind == StrategyKind::Oracle);
    }
    SUBCASE("failing candidate is skipped with its error recorded") {
        StrategySpec bad;
        bad.kind = StrategyKind::Rdt;
        bad.stage = StageKind::OneStage;
        bad.classifier = LearnerSpec::extra_trees({.min_samples_leaf = 100000});
        StrategySpec good;
        good.kind = StrategyKind::Crvtw;
        good.stage = StageKind::OneStage;
        const SelectionResult result = select_model({bad, good}, splits.train, splits.valid);
        CHECK(result.best_index == 1);
        CHECK_FALSE(result.candidates[0].ok);
        CHECK(!result.candidates[0].error.empty());
    }
    SUBCASE("all candidates failing aggregates the errors") {
        StrategySpec bad;
        bad.kind = StrategyKind::Rdt;
        bad.stage = StageKind::OneStage;
        bad.classifier = LearnerSpec::extra_trees({.min_samples_leaf = 100000});
        CHECK_THROWS_AS(select_model({bad, bad}, splits.train, splits.valid), FitError);
    }
    SUBCASE("empty grid is rejected") {
        CHECK_THROWS_AS(select_model({}, splits.train, splits.valid), DataError);
    }
}
