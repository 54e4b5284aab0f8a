#include "uplift/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <utility>

namespace uplift {

namespace {

void check_flag_column(const IntVector& column, const char* name) {
    for (Index i = 0; i < column.size(); ++i) {
        if (column[i] != 0 && column[i] != 1) {
            throw DataError(std::string(name) + " must be 0 or 1 (row " +
                            std::to_string(i) + " has " + std::to_string(column[i]) + ")");
        }
    }
}

GroupSummary summarize_group(const UpliftDataset& dataset, int group) {
    GroupSummary out;
    for (Index i = 0; i < dataset.size(); ++i) {
        if (dataset.treatment()[i] != group) continue;
        ++out.sessions;
        out.purchasers += dataset.conversion()[i];
        out.revenue_total += dataset.revenue()[i];
    }
    if (out.sessions > 0) {
        out.conversion_rate = static_cast<double>(out.purchasers) / static_cast<double>(out.sessions);
        out.revenue_per_person = out.revenue_total / static_cast<double>(out.sessions);
    }
    return out;
}

}  // namespace

UpliftDataset::UpliftDataset(Matrix covariates, IntVector treatment, IntVector conversion,
                             Vector revenue, std::vector<std::string> feature_names,
                             std::optional<Vector> true_uplift)
    : covariates_(std::move(covariates)),
      treatment_(std::move(treatment)),
      conversion_(std::move(conversion)),
      revenue_(std::move(revenue)),
      feature_names_(std::move(feature_names)),
      true_uplift_(std::move(true_uplift)) {
    const Index n = covariates_.rows();
    if (treatment_.size() != n || conversion_.size() != n || revenue_.size() != n) {
        throw DataError("column lengths disagree: " + std::to_string(n) + " covariate rows, " +
                        std::to_string(treatment_.size()) + " treatment, " +
                        std::to_string(conversion_.size()) + " conversion, " +
                        std::to_string(revenue_.size()) + " revenue");
    }
    if (true_uplift_ && true_uplift_->size() != n) {
        throw DataError("true uplift column length disagrees with covariate rows");
    }
    if (feature_names_.empty()) {
        feature_names_.reserve(static_cast<std::size_t>(covariates_.cols()));
        for (Index j = 0; j < covariates_.cols(); ++j) {
            feature_names_.push_back("x" + std::to_string(j));
        }
    }
    if (static_cast<Index>(feature_names_.size()) != covariates_.cols()) {
        throw DataError("expected " + std::to_string(covariates_.cols()) + " feature names, got " +
                        std::to_string(feature_names_.size()));
    }
    check_flag_column(treatment_, "treatment");
    check_flag_column(conversion_, "conversion");
    for (Index i = 0; i < n; ++i) {
        if (!covariates_.row(i).allFinite()) {
            throw DataError("covariate entries must be finite (row " + std::to_string(i) + ")");
        }
        const double r = revenue_[i];
        if (!std::isfinite(r) || r < 0.0) {
            throw DataError("revenue must be finite and non-negative (row " + std::to_string(i) + ")");
        }
        if (conversion_[i] == 0 && r != 0.0) {
            throw DataError("non-converting session has nonzero revenue (row " + std::to_string(i) + ")");
        }
    }
    if (n == 0) throw DataError("dataset is empty");
    const Index n_treated = treatment_.sum();
    if (n_treated == 0) throw DataError("treatment group empty");
    if (n_treated == n) throw DataError("control group empty");
}

UpliftDataset UpliftDataset::from_records(const std::vector<CustomerRecord>& records,
                                          std::vector<std::string> feature_names) {
    const Index n = static_cast<Index>(records.size());
    const Index m = n > 0 ? records.front().covariates.size() : 0;
    Matrix covariates(n, m);
    IntVector treatment(n);
    IntVector conversion(n);
    Vector revenue(n);
    for (Index i = 0; i < n; ++i) {
        const CustomerRecord& rec = records[static_cast<std::size_t>(i)];
        if (rec.covariates.size() != m) {
            throw DataError("record " + std::to_string(i) + " has " +
                            std::to_string(rec.covariates.size()) + " covariates, expected " +
                            std::to_string(m));
        }
        covariates.row(i) = rec.covariates.transpose();
        treatment[i] = rec.treatment;
        conversion[i] = rec.conversion;
        revenue[i] = rec.revenue;
    }
    return UpliftDataset(std::move(covariates), std::move(treatment), std::move(conversion),
                         std::move(revenue), std::move(feature_names));
}

CustomerRecord UpliftDataset::record(Index i) const {
    if (i < 0 || i >= size()) {
        throw DataError("record index " + std::to_string(i) + " out of range");
    }
    CustomerRecord rec;
    rec.covariates = covariates_.row(i).transpose();
    rec.treatment = treatment_[i];
    rec.conversion = conversion_[i];
    rec.revenue = revenue_[i];
    return rec;
}

UpliftDataset UpliftDataset::select(const std::vector<Index>& rows) const {
    const Index k = static_cast<Index>(rows.size());
    Matrix covariates(k, dim());
    IntVector treatment(k);
    IntVector conversion(k);
    Vector revenue(k);
    std::optional<Vector> uplift;
    if (true_uplift_) uplift.emplace(k);
    for (Index out = 0; out < k; ++out) {
        const Index i = rows[static_cast<std::size_t>(out)];
        if (i < 0 || i >= size()) {
            throw DataError("row index " + std::to_string(i) + " out of range");
        }
        covariates.row(out) = covariates_.row(i);
        treatment[out] = treatment_[i];
        conversion[out] = conversion_[i];
        revenue[out] = revenue_[i];
        if (uplift) (*uplift)[out] = (*true_uplift_)[i];
    }
    return UpliftDataset(std::move(covariates), std::move(treatment), std::move(conversion),
                         std::move(revenue), feature_names_, std::move(uplift));
}

void SplitSpec::validate() const {
    if (!(train_frac > 0.0) || !(valid_frac > 0.0) || !(test_frac > 0.0)) {
        throw DataError("split fractions must be positive");
    }
    if (std::abs(train_frac + valid_frac + test_frac - 1.0) > 1e-12) {
        throw DataError("split fractions must sum to 1");
    }
}

UpliftSummary summarize(const UpliftDataset& dataset) {
    UpliftSummary out;
    out.treatment = summarize_group(dataset, 1);
    out.control = summarize_group(dataset, 0);
    out.conversion_uplift = out.treatment.conversion_rate - out.control.conversion_rate;
    out.revenue_uplift = out.treatment.revenue_per_person - out.control.revenue_per_person;
    return out;
}

DatasetSplits partition(const UpliftDataset& dataset, const SplitSpec& spec) {
    spec.validate();
    const Index n = dataset.size();
    if (n < 3) throw DataError("partition needs at least 3 records, got " + std::to_string(n));
    const Index n_valid = static_cast<Index>(std::floor(spec.valid_frac * static_cast<double>(n)));
    const Index n_test = static_cast<Index>(std::floor(spec.test_frac * static_cast<double>(n)));
    const Index n_train = n - n_valid - n_test;

    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::mt19937_64 rng(spec.seed);
    std::shuffle(order.begin(), order.end(), rng);

    auto take = [&](Index begin, Index count) {
        return std::vector<Index>(order.begin() + begin, order.begin() + begin + count);
    };
    const std::vector<Index> train_rows = take(0, n_train);
    const std::vector<Index> valid_rows = take(n_train, n_valid);
    const std::vector<Index> test_rows = take(n_train + n_valid, n_test);

    const std::pair<const std::vector<Index>*, const char*> splits[] = {
        {&train_rows, "train"}, {&valid_rows, "valid"}, {&test_rows, "test"}};
    for (const auto& [rows, name] : splits) {
        Index n_treated = 0;
        for (const Index i : *rows) n_treated += dataset.treatment()[i];
        if (rows->empty() || n_treated == 0 || n_treated == static_cast<Index>(rows->size())) {
            throw DataError(std::string(name) +
                            " split lacks a treatment or control record; re-seed or use more data");
        }
    }
    return DatasetSplits{dataset.select(train_rows), dataset.select(valid_rows),
                         dataset.select(test_rows)};
}

GroupShares group_shares(const UpliftDataset& dataset) {
    GroupShares out;
    out.n_total = dataset.size();
    out.n_treatment = dataset.treatment().sum();
    out.n_control = out.n_total - out.n_treatment;
    if (out.n_total > 0) {
        out.treatment_share = static_cast<double>(out.n_treatment) / static_cast<double>(out.n_total);
        out.control_share = static_cast<double>(out.n_control) / static_cast<double>(out.n_total);
    }
    return out;
}

UpliftDataset concat(const UpliftDataset& a, const UpliftDataset& b) {
    if (a.dim() != b.dim()) {
        throw DataError("cannot concatenate datasets with different covariate dimensions");
    }
    if (a.feature_names() != b.feature_names()) {
        throw DataError("cannot concatenate datasets with different feature names");
    }
    const Index n = a.size() + b.size();
    Matrix covariates(n, a.dim());
    covariates << a.covariates(), b.covariates();
    IntVector treatment(n);
    treatment << a.treatment(), b.treatment();
    IntVector conversion(n);
    conversion << a.conversion(), b.conversion();
    Vector revenue(n);
    revenue << a.revenue(), b.revenue();
    std::optional<Vector> uplift;
    if (a.true_uplift() && b.true_uplift()) {
        uplift.emplace(n);
        *uplift << *a.true_uplift(), *b.true_uplift();
    }
    return UpliftDataset(std::move(covariates), std::move(treatment), std::move(conversion),
                         std::move(revenue), a.feature_names(), std::move(uplift));
}

}  // namespace uplift
