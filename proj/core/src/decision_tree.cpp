#include "tabaug/decision_tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tabaug/errors.hpp"

namespace tabaug {

namespace {

constexpr double kMinImprovement = 1e-12;

double node_impurity(SplitCriterion criterion, double sum, double sum_sq, double n) {
    if (criterion == SplitCriterion::gini) {
        const double p = sum / n; // targets are 0/1, sum = positive count
        return 2.0 * p * (1.0 - p);
    }
    const double mean = sum / n;
    return std::max(0.0, sum_sq / n - mean * mean);
}

struct BestSplit {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double improvement = 0.0;
};

struct Builder {
    const Matrix& X;
    std::span<const double> targets;
    const TreeFitOptions& options;
    Rng& rng;
    DecisionTree tree;

    // Sample options.max_features distinct feature indices, ascending.
    std::vector<std::size_t> candidate_features() const {
        const std::size_t d = X.cols;
        if (options.max_features == 0 || options.max_features >= d) {
            std::vector<std::size_t> all(d);
            std::iota(all.begin(), all.end(), 0);
            return all;
        }
        std::vector<std::size_t> pool(d);
        std::iota(pool.begin(), pool.end(), 0);
        // Partial Fisher-Yates: first max_features entries are the sample.
        for (std::size_t i = 0; i < options.max_features; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.below(d - i));
            std::swap(pool[i], pool[j]);
        }
        pool.resize(options.max_features);
        std::sort(pool.begin(), pool.end());
        return pool;
    }

    BestSplit find_split(const std::vector<std::size_t>& rows, double parent_impurity) const {
        BestSplit best;
        const double n = static_cast<double>(rows.size());
        std::vector<std::pair<double, double>> column(rows.size()); // (value, target)

        for (std::size_t f : candidate_features()) {
            for (std::size_t i = 0; i < rows.size(); ++i)
                column[i] = {X(rows[i], f), targets[rows[i]]};
            std::sort(column.begin(), column.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });

            double left_sum = 0.0, left_sq = 0.0;
            double right_sum = 0.0, right_sq = 0.0;
            for (const auto& [v, t] : column) {
                right_sum += t;
                right_sq += t * t;
            }

            for (std::size_t i = 0; i + 1 < column.size(); ++i) {
                const double t = column[i].second;
                left_sum += t;
                left_sq += t * t;
                right_sum -= t;
                right_sq -= t * t;
                if (column[i].first == column[i + 1].first) continue; // no boundary here
                const double n_left = static_cast<double>(i + 1);
                const double n_right = n - n_left;
                const double child =
                    (n_left * node_impurity(options.criterion, left_sum, left_sq, n_left) +
                     n_right * node_impurity(options.criterion, right_sum, right_sq, n_right)) /
                    n;
                const double improvement = parent_impurity - child;
                // Strict > keeps the lowest feature index / lowest threshold on ties.
                if (improvement > best.improvement + kMinImprovement &&
                    improvement > kMinImprovement) {
                    best.found = true;
                    best.feature = static_cast<int>(f);
                    best.threshold = column[i].first + 0.5 * (column[i + 1].first - column[i].first);
                    best.improvement = improvement;
                }
            }
        }
        return best;
    }

    std::size_t build(std::vector<std::size_t> rows, std::size_t depth) {
        const double n = static_cast<double>(rows.size());
        double sum = 0.0, sum_sq = 0.0;
        for (std::size_t r : rows) {
            sum += targets[r];
            sum_sq += targets[r] * targets[r];
        }
        const std::size_t index = tree.nodes.size();
        tree.nodes.emplace_back();
        tree.nodes[index].value = sum / n;
        tree.nodes[index].impurity = node_impurity(options.criterion, sum, sum_sq, n);
        tree.nodes[index].samples = rows.size();

        const bool depth_ok = options.max_depth == 0 || depth < options.max_depth;
        if (!depth_ok || rows.size() < options.min_samples_split ||
            tree.nodes[index].impurity <= kMinImprovement)
            return index;

        const BestSplit split = find_split(rows, tree.nodes[index].impurity);
        if (!split.found) return index;

        std::vector<std::size_t> left_rows, right_rows;
        left_rows.reserve(rows.size());
        right_rows.reserve(rows.size());
        for (std::size_t r : rows) {
            (X(r, static_cast<std::size_t>(split.feature)) <= split.threshold ? left_rows
                                                                              : right_rows)
                .push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();

        tree.nodes[index].feature = split.feature;
        tree.nodes[index].threshold = split.threshold;
        const std::size_t left = build(std::move(left_rows), depth + 1);
        tree.nodes[index].left = left;
        const std::size_t right = build(std::move(right_rows), depth + 1);
        tree.nodes[index].right = right;
        return index;
    }
};

} // namespace

std::size_t DecisionTree::leaf_index(std::span<const double> row) const {
    std::size_t i = 0;
    while (nodes[i].feature >= 0) {
        i = row[static_cast<std::size_t>(nodes[i].feature)] <= nodes[i].threshold
                ? nodes[i].left
                : nodes[i].right;
    }
    return i;
}

DecisionTree fit_tree(const Matrix& X, std::span<const double> targets,
                      std::span<const std::size_t> rows, const TreeFitOptions& options,
                      Rng& rng) {
    if (rows.empty()) throw InvalidArgument("fit_tree: no rows");
    if (targets.size() != X.rows) throw InvalidArgument("fit_tree: target length != X.rows");
    Builder builder{X, targets, options, rng, {}};
    builder.build(std::vector<std::size_t>(rows.begin(), rows.end()), 0);
    return std::move(builder.tree);
}

} // namespace tabaug
