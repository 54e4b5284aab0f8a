#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "uplift/dataset.hpp"
#include "uplift/error.hpp"
#include "uplift/transforms.hpp"

using namespace uplift;

namespace {

UpliftDataset make_dataset(const std::vector<int>& treatment, const std::vector<double>& revenue) {
    const Index n = static_cast<Index>(treatment.size());
    Matrix x(n, 1);
    IntVector t(n);
    IntVector c(n);
    Vector r(n);
    for (Index i = 0; i < n; ++i) {
        x(i, 0) = static_cast<double>(i);
        t[i] = treatment[static_cast<std::size_t>(i)];
        r[i] = revenue[static_cast<std::size_t>(i)];
        c[i] = r[i] > 0.0 ? 1 : 0;
    }
    return UpliftDataset(std::move(x), std::move(t), std::move(c), std::move(r), {});
}

UpliftDataset random_dataset(std::mt19937_64& rng, Index n) {
    std::uniform_int_distribution<int> coin(0, 1);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<int> t(n);
    std::vector<double> r(n);
    for (Index i = 0; i < n; ++i) {
        t[i] = i < 2 ? static_cast<int>(i) : coin(rng);
        r[i] = unif(rng) < 0.4 ? std::exp(3.0 * unif(rng)) : 0.0;
    }
    return make_dataset(t, r);
}

}  // namespace

TEST_CASE("crvtw evaluates the signed weighted outcome") {
    // Shares 3:1 -> q_T = 0.75, q_C = 0.25.
    const auto data = make_dataset({1, 1, 1, 0}, {120.0, 0.0, 0.0, 50.0});
    const ContinuousTarget z = crvtw(data);
    CHECK(z.shares.treatment_share == 0.75);
    CHECK(z.values[0] == doctest::Approx(160.0).epsilon(1e-15));  // +120/0.75
    CHECK(z.values[1] == 0.0);
    CHECK(z.values[2] == 0.0);
    CHECK(z.values[3] == doctest::Approx(-200.0).epsilon(1e-15));  // -50/0.25
}

TEST_CASE("crvtw conversion mode replaces the outcome with the flag") {
    const auto data = make_dataset({1, 1, 1, 0}, {120.0, 0.0, 0.0, 50.0});
    const ContinuousTarget z = crvtw(data, TargetKind::Conversion);
    CHECK(z.values[0] == doctest::Approx(1.0 / 0.75).epsilon(1e-15));
    CHECK(z.values[1] == 0.0);
    CHECK(z.values[3] == doctest::Approx(-1.0 / 0.25).epsilon(1e-15));
}

TEST_CASE("crvtw five-record mean identity") {
    // T: 10, 0, 5; C: 4, 0 -> mean(z) = 5 - 2 = 3.
    const auto data = make_dataset({1, 1, 1, 0, 0}, {10.0, 0.0, 5.0, 4.0, 0.0});
    const ContinuousTarget z = crvtw(data);
    CHECK(z.values.mean() == doctest::Approx(3.0).epsilon(1e-15));
    const UpliftSummary s = summarize(data);
    CHECK(z.values.mean() ==
          doctest::Approx(s.treatment.revenue_per_person - s.control.revenue_per_person)
              .epsilon(1e-15));
}

TEST_CASE("crvtw mean identity holds on random datasets") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        const UpliftDataset data = random_dataset(rng, 60);
        const ContinuousTarget z = crvtw(data);
        const UpliftSummary s = summarize(data);
        const double expected = s.treatment.revenue_per_person - s.control.revenue_per_person;
        const double scale = std::max(1.0, std::abs(expected));
        CHECK(std::abs(z.values.mean() - expected) <= 1e-9 * scale);

        // sign pattern: positives only for treated purchasers, negatives only control purchasers
        for (Index i = 0; i < data.size(); ++i) {
            if (z.values[i] > 0.0) {
                CHECK(data.treatment()[i] == 1);
                CHECK(data.conversion()[i] == 1);
            } else if (z.values[i] < 0.0) {
                CHECK(data.treatment()[i] == 0);
                CHECK(data.conversion()[i] == 1);
            } else {
                CHECK(data.revenue()[i] == 0.0);
            }
        }
    }
}

TEST_CASE("crvtw conversion-mode mean identity") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const UpliftDataset data = random_dataset(rng, 40);
        const ContinuousTarget z = crvtw(data, TargetKind::Conversion);
        const UpliftSummary s = summarize(data);
        CHECK(z.values.mean() == doctest::Approx(s.conversion_uplift).epsilon(1e-12));
    }
}

TEST_CASE("discretize thresholds with a closed upper boundary") {
    Vector v(3);
    v << -3.0, 0.0, 0.5;
    const BinaryTarget b = discretize(v, 0.0);
    CHECK(b.values[0] == 0);
    CHECK(b.values[1] == 0);  // threshold itself maps to 0
    CHECK(b.values[2] == 1);
    CHECK(b.threshold == 0.0);

    const BinaryTarget all_equal = discretize(Vector::Constant(4, 2.5), 2.5);
    CHECK(all_equal.values.sum() == 0);

    Vector w(3);
    w << 1.0, 2.0, 3.0;
    const BinaryTarget c = discretize(w, 2.0);
    CHECK(c.values[0] == 0);
    CHECK(c.values[1] == 0);
    CHECK(c.values[2] == 1);
}

TEST_CASE("discretize rejects non-finite input") {
    Vector v(2);
    v << 1.0, std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(discretize(v, 0.0), DataError);
}

TEST_CASE("rdt marks exactly the treated purchasers") {
    const auto data = make_dataset({1, 1, 0, 0}, {120.0, 0.0, 50.0, 0.0});
    const BinaryTarget b = rdt(data);
    CHECK(b.values[0] == 1);  // treated purchaser
    CHECK(b.values[1] == 0);  // treated non-purchaser
    CHECK(b.values[2] == 0);  // control purchaser (z = -200 <= 0)
    CHECK(b.values[3] == 0);
}

TEST_CASE("rdt equals discretized crvtw and counts treated purchasers") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const UpliftDataset data = random_dataset(rng, 20);
        const BinaryTarget b = rdt(data);
        const BinaryTarget ref = discretize(crvtw(data).values, 0.0);
        CHECK(b.values == ref.values);

        int treated_purchasers = 0;
        for (Index i = 0; i < data.size(); ++i) {
            treated_purchasers += (data.treatment()[i] == 1 && data.revenue()[i] > 0.0) ? 1 : 0;
        }
        CHECK(b.values.sum() == treated_purchasers);
    }
}

TEST_CASE("itm augmentation lays out [X, T, X*T]") {
    Matrix x(2, 2);
    x << 1.5, -2.0, 0.5, 3.0;
    IntVector t(2);
    t << 1, 0;
    IntVector c = IntVector::Zero(2);
    Vector r = Vector::Zero(2);
    const UpliftDataset data(x, t, c, r, {"a", "b"});

    const AugmentedMatrix aug = itm_augment(data);
    REQUIRE(aug.values.rows() == 2);
    REQUIRE(aug.values.cols() == 5);
    Vector row0(5), row1(5);
    row0 << 1.5, -2.0, 1.0, 1.5, -2.0;
    row1 << 0.5, 3.0, 0.0, 0.0, 0.0;
    CHECK(aug.values.row(0).transpose() == row0);
    CHECK(aug.values.row(1).transpose() == row1);
    REQUIRE(aug.column_names.size() == 5);
    CHECK(aug.column_names[2] == "treatment");
    CHECK(aug.column_names[3] == "a:treatment");

    const AugmentedMatrix forced = itm_augment(data, 1);
    CHECK(forced.values.row(1).transpose() == (Vector(5) << 0.5, 3.0, 1.0, 0.5, 3.0).finished());
}

TEST_CASE("counterfactual difference of augmented designs") {
    std::mt19937_64 rng(8);
    const UpliftDataset data = random_dataset(rng, 30);
    const Index p = data.dim();
    const Matrix treated = itm_augment(data, 1).values;
    const Matrix control = itm_augment(data, 0).values;
    const Matrix diff = treated - control;
    CHECK(diff.leftCols(p).isZero());
    CHECK(diff.col(p).isApproxToConstant(1.0));
    CHECK(diff.rightCols(p) == data.covariates());
}

TEST_CASE("revenue scaling scales z and fixes the binary target") {
    std::mt19937_64 rng(77);
    const UpliftDataset data = random_dataset(rng, 50);
    const double lambda = 3.75;
    const UpliftDataset scaled(data.covariates(), data.treatment(), data.conversion(),
                               (data.revenue() * lambda).eval(), data.feature_names());
    const ContinuousTarget z = crvtw(data);
    const ContinuousTarget zs = crvtw(scaled);
    CHECK(zs.values.isApprox(z.values * lambda, 1e-14));
    CHECK(rdt(scaled).values == rdt(data).values);
}
