#pragma once

#include <cstdint>
#include <utility>

#include "uplift/types.hpp"

namespace uplift {

struct SmoteConfig {
    int k = 5;
    Index target_minority_count = 0;  // 0 balances the classes
    std::uint64_t seed = 0;
};

/// Minority over-sampling: each synthetic row sits on the segment between a
/// minority row and one of its k nearest minority neighbors (distances in
/// standardized space, interpolation in raw space). Originals are returned
/// unchanged, synthetics appended with the minority label.
std::pair<Matrix, Vector> smote(MatrixRef X, VectorRef y, const SmoteConfig& config = {});

}  // namespace uplift
