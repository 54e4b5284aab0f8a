#pragma once

#include <optional>
#include <string>
#include <vector>

#include "uplift/dataset.hpp"
#include "uplift/types.hpp"

namespace uplift {

enum class TargetKind { Revenue, Conversion };

/// Signed, group-share-weighted outcome: positive for treated purchasers,
/// negative for control purchasers, zero for everyone else. Its mean equals
/// the treatment-minus-control mean outcome difference.
struct ContinuousTarget {
    Vector values;
    GroupShares shares;
};

/// Thresholded target: 1 where the source value exceeds the threshold.
struct BinaryTarget {
    IntVector values;
    double threshold = 0.0;
};

/// Interaction design [X, T, X*T] with 2p+1 columns.
struct AugmentedMatrix {
    Matrix values;
    std::vector<std::string> column_names;
};

/// Outcome transformation: z = +Y/q_T for treated purchasers, -Y/q_C for
/// control purchasers, 0 otherwise. Y is session revenue by default or the
/// conversion flag in conversion mode.
ContinuousTarget crvtw(const UpliftDataset& dataset, TargetKind target = TargetKind::Revenue);

/// 1 where value > threshold, 0 where value <= threshold.
BinaryTarget discretize(VectorRef values, double threshold);

/// Revenue discretization: crvtw followed by thresholding at zero, so the
/// positive class is exactly the treated purchasers.
BinaryTarget rdt(const UpliftDataset& dataset);

/// Builds the interaction design. With force_treatment set, every row uses
/// that flag instead of its own (counterfactual scoring matrix).
AugmentedMatrix itm_augment(const UpliftDataset& dataset,
                            std::optional<int> force_treatment = std::nullopt);

}  // namespace uplift
