#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "uplift/error.hpp"
#include "uplift/types.hpp"

namespace uplift {

/// One customer session: covariate vector, group flag, conversion flag and
/// session revenue. Revenue and conversion are tied: a positive revenue
/// requires conversion = 1 and a non-converting session has revenue 0.
struct CustomerRecord {
    Vector covariates;
    int treatment = 0;
    int conversion = 0;
    double revenue = 0.0;
};

/// Immutable columnar container for an uplift modeling sample.
///
/// Record order is stable; the row index is the identity used for
/// deterministic tie-breaking downstream. An optional per-record oracle
/// column (true uplift under a known generating process) travels with the
/// rows through partitioning and CSV round trips but is never a covariate.
class UpliftDataset {
 public:
    UpliftDataset(Matrix covariates, IntVector treatment, IntVector conversion,
                  Vector revenue, std::vector<std::string> feature_names,
                  std::optional<Vector> true_uplift = std::nullopt);

    static UpliftDataset from_records(const std::vector<CustomerRecord>& records,
                                      std::vector<std::string> feature_names = {});

    Index size() const { return covariates_.rows(); }
    Index dim() const { return covariates_.cols(); }

    const Matrix& covariates() const { return covariates_; }
    const IntVector& treatment() const { return treatment_; }
    const IntVector& conversion() const { return conversion_; }
    const Vector& revenue() const { return revenue_; }
    const std::vector<std::string>& feature_names() const { return feature_names_; }
    const std::optional<Vector>& true_uplift() const { return true_uplift_; }

    CustomerRecord record(Index i) const;

    /// New dataset holding the given rows in the given order.
    UpliftDataset select(const std::vector<Index>& rows) const;

 private:
    Matrix covariates_;
    IntVector treatment_;
    IntVector conversion_;
    Vector revenue_;
    std::vector<std::string> feature_names_;
    std::optional<Vector> true_uplift_;
};

/// Treatment/control group sizes and their fractions of the sample.
struct GroupShares {
    Index n_treatment = 0;
    Index n_control = 0;
    Index n_total = 0;
    double treatment_share = 0.0;
    double control_share = 0.0;
};

/// Random train/validation/test partition request. Fractions must be
/// positive and sum to 1 within 1e-12.
struct SplitSpec {
    double train_frac = 0.4;
    double valid_frac = 0.3;
    double test_frac = 0.3;
    std::uint64_t seed = 0;

    void validate() const;
};

struct GroupSummary {
    Index sessions = 0;
    Index purchasers = 0;
    double conversion_rate = 0.0;   // purchasers / sessions, exact quotient
    double revenue_total = 0.0;
    double revenue_per_person = 0.0;  // revenue_total / sessions of this group
};

/// Descriptive uplift statistics: per-group conversion and revenue figures
/// plus their treatment-minus-control differences.
struct UpliftSummary {
    GroupSummary treatment;
    GroupSummary control;
    double conversion_uplift = 0.0;  // rate difference, as a fraction
    double revenue_uplift = 0.0;     // per-person revenue difference
};

struct DatasetSplits {
    UpliftDataset train;
    UpliftDataset valid;
    UpliftDataset test;
};

UpliftSummary summarize(const UpliftDataset& dataset);

/// Seeded uniform shuffle, then contiguous assignment. Validation and test
/// sizes are floor(frac * n); the remainder goes to the training split.
/// Throws DataError if any split would lack a treatment or control record.
DatasetSplits partition(const UpliftDataset& dataset, const SplitSpec& spec);

GroupShares group_shares(const UpliftDataset& dataset);

/// Row-wise concatenation (first dataset's rows, then the second's).
UpliftDataset concat(const UpliftDataset& a, const UpliftDataset& b);

}  // namespace uplift
