#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tabaug/matrix.hpp"
#include "tabaug/rng.hpp"

namespace tabaug {

struct TreeNode {
    int feature = -1; // -1 marks a leaf
    double threshold = 0.0;
    std::size_t left = 0;
    std::size_t right = 0;
    double value = 0.0;    // mean target at the node (leaf prediction)
    double impurity = 0.0; // criterion value on the node's training rows
    std::size_t samples = 0;
};

enum class SplitCriterion { gini, mse };

struct TreeFitOptions {
    SplitCriterion criterion = SplitCriterion::gini;
    std::size_t max_depth = 0;        // 0 = unlimited
    std::size_t min_samples_split = 2;
    std::size_t max_features = 0;     // 0 = all; else sampled per split
};

/// Binary CART tree. Rows go left when row[feature] <= threshold.
struct DecisionTree {
    std::vector<TreeNode> nodes; // nodes[0] is the root

    double predict(std::span<const double> row) const { return nodes[leaf_index(row)].value; }
    std::size_t leaf_index(std::span<const double> row) const;
};

/// Grows a tree on the given rows (indices into X). Splits are exact: every
/// midpoint between consecutive distinct sorted feature values is a candidate.
/// A split is kept only if it strictly decreases the weighted impurity;
/// ties break on lowest feature index, then lowest threshold. When
/// max_features > 0, that many distinct features are sampled per split from
/// rng (draw order: node creation order, left subtree first).
DecisionTree fit_tree(const Matrix& X, std::span<const double> targets,
                      std::span<const std::size_t> rows, const TreeFitOptions& options,
                      Rng& rng);

} // namespace tabaug
