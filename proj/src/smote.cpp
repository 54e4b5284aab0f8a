#include "uplift/smote.hpp"

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "uplift/error.hpp"
#include "uplift/scaler.hpp"

namespace uplift {

std::pair<Matrix, Vector> smote(MatrixRef X, VectorRef y, const SmoteConfig& config) {
    const Index n = X.rows();
    if (y.size() != n) throw DataError("smote target length does not match rows");
    if (config.k < 1) throw DataError("smote k must be positive");
    if (!X.allFinite()) throw DataError("smote inputs must be finite");

    std::vector<Index> by_class[2];
    for (Index i = 0; i < n; ++i) {
        if (y[i] != 0.0 && y[i] != 1.0) {
            throw DataError("smote targets must be 0 or 1 (row " + std::to_string(i) + ")");
        }
        by_class[y[i] == 1.0 ? 1 : 0].push_back(i);
    }
    // Ties count class 1 as the minority.
    const int minority_label = by_class[1].size() <= by_class[0].size() ? 1 : 0;
    const std::vector<Index>& minority = by_class[minority_label];
    const auto n_minority = static_cast<Index>(minority.size());
    const auto n_majority = n - n_minority;

    const Index target =
        config.target_minority_count > 0 ? config.target_minority_count : n_majority;
    if (target < n_minority) {
        throw DataError("smote target minority count " + std::to_string(target) +
                        " is below the current count " + std::to_string(n_minority));
    }
    const Index n_synthetic = target - n_minority;
    if (n_synthetic == 0) return {Matrix(X), Vector(y)};
    if (n_minority < static_cast<Index>(config.k) + 1) {
        throw FitError("smote needs at least k+1 = " + std::to_string(config.k + 1) +
                       " minority rows, got " + std::to_string(n_minority));
    }

    // k nearest minority neighbors per minority row, standardized Euclidean,
    // ties broken by row index.
    const StandardScaler scaler = StandardScaler::fit(X);
    Matrix scaled_minority(n_minority, X.cols());
    for (Index i = 0; i < n_minority; ++i) {
        scaled_minority.row(i) = scaler.transform(X.row(minority[static_cast<std::size_t>(i)]));
    }
    std::vector<std::vector<Index>> neighbors(static_cast<std::size_t>(n_minority));
    std::vector<std::pair<double, Index>> distances;
    for (Index i = 0; i < n_minority; ++i) {
        distances.clear();
        for (Index j = 0; j < n_minority; ++j) {
            if (j == i) continue;
            distances.emplace_back((scaled_minority.row(i) - scaled_minority.row(j)).squaredNorm(),
                                   j);
        }
        std::sort(distances.begin(), distances.end());
        auto& near = neighbors[static_cast<std::size_t>(i)];
        for (int k = 0; k < config.k; ++k) near.push_back(distances[static_cast<std::size_t>(k)].second);
    }

    Matrix out_X(n + n_synthetic, X.cols());
    out_X.topRows(n) = X;
    Vector out_y(n + n_synthetic);
    out_y.head(n) = y;
    std::mt19937_64 rng(config.seed);
    std::uniform_int_distribution<int> pick_neighbor(0, config.k - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (Index s = 0; s < n_synthetic; ++s) {
        const Index seed_pos = s % n_minority;
        const Index seed_row = minority[static_cast<std::size_t>(seed_pos)];
        const Index neighbor_row =
            minority[static_cast<std::size_t>(neighbors[static_cast<std::size_t>(seed_pos)]
                                                  [static_cast<std::size_t>(pick_neighbor(rng))])];
        const double u = unit(rng);
        out_X.row(n + s) = X.row(seed_row) + u * (X.row(neighbor_row) - X.row(seed_row));
        out_y[n + s] = minority_label;
    }
    return {std::move(out_X), std::move(out_y)};
}

}  // namespace uplift
