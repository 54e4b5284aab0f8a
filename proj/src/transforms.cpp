#include "uplift/transforms.hpp"

#include <cmath>

namespace uplift {

ContinuousTarget crvtw(const UpliftDataset& dataset, TargetKind target) {
    const GroupShares shares = group_shares(dataset);
    if (shares.treatment_share <= 0.0 || shares.control_share <= 0.0) {
        throw DataError("crvtw requires both treatment and control records");
    }
    Vector values = Vector::Zero(dataset.size());
    for (Index i = 0; i < dataset.size(); ++i) {
        if (dataset.conversion()[i] != 1) continue;
        const double y = target == TargetKind::Revenue ? dataset.revenue()[i] : 1.0;
        values[i] = dataset.treatment()[i] == 1 ? y / shares.treatment_share
                                                : -y / shares.control_share;
    }
    return ContinuousTarget{std::move(values), shares};
}

BinaryTarget discretize(VectorRef values, double threshold) {
    if (!std::isfinite(threshold)) throw DataError("discretize threshold must be finite");
    IntVector out(values.size());
    for (Index i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw DataError("discretize input must be finite (index " + std::to_string(i) + ")");
        }
        out[i] = values[i] > threshold ? 1 : 0;
    }
    return BinaryTarget{std::move(out), threshold};
}

BinaryTarget rdt(const UpliftDataset& dataset) {
    return discretize(crvtw(dataset, TargetKind::Revenue).values, 0.0);
}

AugmentedMatrix itm_augment(const UpliftDataset& dataset, std::optional<int> force_treatment) {
    if (force_treatment && *force_treatment != 0 && *force_treatment != 1) {
        throw DataError("force_treatment must be 0 or 1");
    }
    const Index n = dataset.size();
    const Index p = dataset.dim();
    AugmentedMatrix out;
    out.values.resize(n, 2 * p + 1);
    for (Index i = 0; i < n; ++i) {
        const double t = force_treatment ? *force_treatment : dataset.treatment()[i];
        out.values.row(i).head(p) = dataset.covariates().row(i);
        out.values(i, p) = t;
        out.values.row(i).tail(p) = t * dataset.covariates().row(i);
    }
    out.column_names = dataset.feature_names();
    out.column_names.push_back("treatment");
    for (const std::string& name : dataset.feature_names()) {
        out.column_names.push_back(name + ":treatment");
    }
    return out;
}

}  // namespace uplift
