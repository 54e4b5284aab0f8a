#include "uplift/ert.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <thread>

#include "uplift/error.hpp"

namespace uplift {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

ErtTree grow_tree(MatrixRef X, VectorRef y, int max_features, int min_leaf, int cuts,
                  std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const Index m = X.cols();
    std::vector<Index> rows(static_cast<std::size_t>(X.rows()));
    std::iota(rows.begin(), rows.end(), Index{0});
    std::vector<Index> features(static_cast<std::size_t>(m));
    std::iota(features.begin(), features.end(), Index{0});

    ErtTree tree;
    std::function<int(Index, Index)> build = [&](Index begin, Index end) -> int {
        const Index count = end - begin;
        double sum = 0.0;
        double y_min = y[rows[static_cast<std::size_t>(begin)]];
        double y_max = y_min;
        for (Index r = begin; r < end; ++r) {
            const double v = y[rows[static_cast<std::size_t>(r)]];
            sum += v;
            y_min = std::min(y_min, v);
            y_max = std::max(y_max, v);
        }
        const int node_id = static_cast<int>(tree.nodes.size());
        ErtNode node;
        node.value = sum / static_cast<double>(count);
        tree.nodes.push_back(node);
        if (count < 2 * min_leaf || y_min == y_max) return node_id;

        int best_feature = -1;
        double best_threshold = 0.0;
        double best_score = -std::numeric_limits<double>::infinity();
        for (int k = 0; k < max_features; ++k) {
            std::uniform_int_distribution<Index> pick(k, m - 1);
            std::swap(features[static_cast<std::size_t>(k)],
                      features[static_cast<std::size_t>(pick(rng))]);
            const Index f = features[static_cast<std::size_t>(k)];
            double lo = X(rows[static_cast<std::size_t>(begin)], f);
            double hi = lo;
            for (Index r = begin; r < end; ++r) {
                const double v = X(rows[static_cast<std::size_t>(r)], f);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            if (lo == hi) continue;
            std::uniform_real_distribution<double> cut(lo, hi);
            for (int c = 0; c < cuts; ++c) {
                const double threshold = cut(rng);
                Index n_left = 0;
                double sum_left = 0.0;
                for (Index r = begin; r < end; ++r) {
                    const Index row = rows[static_cast<std::size_t>(r)];
                    if (X(row, f) <= threshold) {
                        ++n_left;
                        sum_left += y[row];
                    }
                }
                const Index n_right = count - n_left;
                if (n_left < min_leaf || n_right < min_leaf) continue;
                const double sum_right = sum - sum_left;
                const double score = sum_left * sum_left / static_cast<double>(n_left) +
                                     sum_right * sum_right / static_cast<double>(n_right);
                if (score > best_score) {
                    best_score = score;
                    best_feature = static_cast<int>(f);
                    best_threshold = threshold;
                }
            }
        }
        if (best_feature < 0) return node_id;

        const auto first = rows.begin() + begin;
        const auto last = rows.begin() + end;
        const auto mid = std::partition(first, last, [&](Index row) {
            return X(row, best_feature) <= best_threshold;
        });
        const Index split_at = static_cast<Index>(mid - rows.begin());
        const int left = build(begin, split_at);
        const int right = build(split_at, end);
        ErtNode& filled = tree.nodes[static_cast<std::size_t>(node_id)];
        filled.feature = best_feature;
        filled.threshold = best_threshold;
        filled.left = left;
        filled.right = right;
        return node_id;
    };
    build(0, X.rows());
    return tree;
}

}  // namespace

Vector ErtEnsemble::predict(MatrixRef X) const {
    if (X.cols() != n_features) {
        throw DataError("ert ensemble expects " + std::to_string(n_features) + " features, got " +
                        std::to_string(X.cols()));
    }
    Vector out(X.rows());
    Vector row(X.cols());
    for (Index i = 0; i < X.rows(); ++i) {
        row = X.row(i).transpose();
        double sum = 0.0;
        for (const ErtTree& tree : trees) sum += tree.predict_row(row.data());
        out[i] = sum / static_cast<double>(trees.size());
    }
    return out;
}

ErtEnsemble fit_ert(MatrixRef X, VectorRef y, const ErtConfig& config) {
    const Index n = X.rows();
    const Index m = X.cols();
    if (n < 1 || m < 1) throw DataError("fit_ert requires a non-empty design matrix");
    if (y.size() != n) throw DataError("fit_ert target length does not match rows");
    if (!X.allFinite() || !y.allFinite()) throw DataError("fit_ert inputs must be finite");
    if (config.n_trees < 1) throw DataError("n_trees must be positive");
    if (config.min_samples_leaf < 1) throw DataError("min_samples_leaf must be positive");
    if (config.n_random_cuts < 1) throw DataError("n_random_cuts must be positive");
    if (config.max_features > m) {
        throw DataError("max_features " + std::to_string(config.max_features) +
                        " exceeds feature count " + std::to_string(m));
    }
    if (n < config.min_samples_leaf) {
        throw FitError("fit_ert needs at least min_samples_leaf = " +
                       std::to_string(config.min_samples_leaf) + " rows, got " + std::to_string(n));
    }
    const int max_features =
        config.max_features > 0
            ? config.max_features
            : std::max(1, static_cast<int>(std::lround(std::sqrt(static_cast<double>(m)))));

    ErtEnsemble ensemble;
    ensemble.config = config;
    ensemble.n_features = m;
    ensemble.trees.resize(static_cast<std::size_t>(config.n_trees));

    // Per-tree seeds come from one serial pass so thread scheduling cannot
    // change any tree.
    std::vector<std::uint64_t> seeds(static_cast<std::size_t>(config.n_trees));
    std::uint64_t state = config.seed;
    for (auto& s : seeds) s = splitmix64(state);

    auto grow_range = [&](int thread_index, int stride) {
        for (int i = thread_index; i < config.n_trees; i += stride) {
            ensemble.trees[static_cast<std::size_t>(i)] =
                grow_tree(X, y, max_features, config.min_samples_leaf, config.n_random_cuts,
                          seeds[static_cast<std::size_t>(i)]);
        }
    };

    const int threads = std::min(std::max(config.n_threads, 1), config.n_trees);
    if (threads <= 1) {
        grow_range(0, 1);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                try {
                    grow_range(t, threads);
                } catch (...) {
                    errors[static_cast<std::size_t>(t)] = std::current_exception();
                }
            });
        }
        for (auto& worker : pool) worker.join();
        for (const auto& err : errors) {
            if (err) std::rethrow_exception(err);
        }
    }
    return ensemble;
}

}  // namespace uplift
