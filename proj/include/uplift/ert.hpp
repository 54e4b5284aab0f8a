#pragma once

#include <cstdint>
#include <vector>

#include "uplift/types.hpp"

namespace uplift {

struct ErtConfig {
    int n_trees = 100;
    int max_features = 0;      // 0 picks round(sqrt(m))
    int min_samples_leaf = 20;
    int n_random_cuts = 5;
    std::uint64_t seed = 0;
    int n_threads = 1;
};

/// feature < 0 marks a leaf; value is the leaf mean of the training targets.
struct ErtNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
};

struct ErtTree {
    std::vector<ErtNode> nodes;

    double predict_row(const double* row) const {
        int node = 0;
        while (nodes[static_cast<std::size_t>(node)].feature >= 0) {
            const ErtNode& split = nodes[static_cast<std::size_t>(node)];
            node = row[split.feature] <= split.threshold ? split.left : split.right;
        }
        return nodes[static_cast<std::size_t>(node)].value;
    }
};

/// Ensemble of totally randomized trees grown on the full sample (no
/// bootstrap). Per-tree seeds derive from the master seed, so predictions do
/// not depend on n_threads.
struct ErtEnsemble {
    std::vector<ErtTree> trees;
    ErtConfig config;
    Index n_features = 0;

    Vector predict(MatrixRef X) const;
};

/// At each node, max_features candidate features are sampled without
/// replacement and n_random_cuts thresholds are drawn uniformly inside each
/// feature's node-local range; the best cut by variance reduction wins (for
/// 0/1 targets this coincides with Gini decrease). Both children must keep at
/// least min_samples_leaf rows. Works for regression and for binary targets,
/// whose leaves then hold class-1 fractions.
ErtEnsemble fit_ert(MatrixRef X, VectorRef y, const ErtConfig& config = {});

}  // namespace uplift
