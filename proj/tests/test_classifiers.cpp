#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "tabaug/classifiers.hpp"
#include "tabaug/errors.hpp"
#include "tabaug/eval.hpp"

using namespace tabaug;
using test_helpers::separable_blobs;

namespace {

ClassifierParams fast_params() {
    ClassifierParams params;
    params.ann_epochs = 60; // plenty for the toy sets below
    params.rf_trees = 30;
    params.gbc_stages = 40;
    return params;
}

bool positives_above_negatives(const std::vector<double>& scores, const std::vector<int>& y) {
    double min_pos = 1e18, max_neg = -1e18;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] == 1) min_pos = std::min(min_pos, scores[i]);
        else max_neg = std::max(max_neg, scores[i]);
    }
    return min_pos > max_neg;
}

} // namespace

TEST_CASE("knn: separable clusters give training AUC 1.0") {
    const auto blobs = separable_blobs(30, 3, 0.6, 1);
    const auto model = train_classifier(ClassifierKind::knn, blobs.X, blobs.y, 0);
    CHECK(auc(model.score_batch(blobs.X), blobs.y) == 1.0);
}

TEST_CASE("knn: three neighbours labelled (1,1,0) vote 2/3") {
    Matrix X(3, 1);
    X(0, 0) = 0.0;
    X(1, 0) = 2.0;
    X(2, 0) = 4.0;
    const std::vector<int> y = {1, 1, 0};
    ClassifierParams params;
    params.knn_k = 3;
    const auto model = train_classifier(ClassifierKind::knn, X, y, 0, params);

    Matrix query(1, 1);
    query(0, 0) = 2.0; // k covers the whole set, so any query sees (1,1,0)
    CHECK(model.score_batch(query)[0] == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("knn: scores are vote fractions in {0..k}/k") {
    const auto blobs = separable_blobs(20, 2, 0.2, 2);
    ClassifierParams params;
    params.knn_k = 5;
    const auto model = train_classifier(ClassifierKind::knn, blobs.X, blobs.y, 0, params);
    for (double s : model.score_batch(blobs.X)) {
        const double scaled = s * 5.0;
        CHECK(scaled == doctest::Approx(std::round(scaled)).epsilon(1e-12));
        CHECK(s >= 0.0);
        CHECK(s <= 1.0);
    }
}

TEST_CASE("knn: matches a brute-force all-pairs vote oracle") {
    Rng rng(3);
    const auto blobs = separable_blobs(60, 3, 0.1, 3); // heavily overlapping
    const std::size_t k = 5;
    ClassifierParams params;
    params.knn_k = k;
    const auto model = train_classifier(ClassifierKind::knn, blobs.X, blobs.y, 0, params);
    const auto scores = model.score_batch(blobs.X);

    for (std::size_t q = 0; q < blobs.X.rows; ++q) {
        std::vector<std::pair<double, std::size_t>> dist;
        for (std::size_t i = 0; i < blobs.X.rows; ++i) {
            double d2 = 0.0;
            for (std::size_t c = 0; c < blobs.X.cols; ++c) {
                const double diff = blobs.X(q, c) - blobs.X(i, c);
                d2 += diff * diff;
            }
            dist.emplace_back(d2, i);
        }
        std::sort(dist.begin(), dist.end());
        double votes = 0.0;
        for (std::size_t i = 0; i < k; ++i) votes += blobs.y[dist[i].second];
        CHECK(scores[q] == doctest::Approx(votes / static_cast<double>(k)));
    }
}

TEST_CASE("rf: single depth-1 tree picks the oracle's best threshold") {
    // 1-D, threshold-separable: negatives below 0.4, positives above 0.6.
    Matrix X(10, 1);
    std::vector<int> y(10);
    for (std::size_t i = 0; i < 5; ++i) {
        X(i, 0) = 0.1 + 0.05 * static_cast<double>(i);
        y[i] = 0;
        X(5 + i, 0) = 0.65 + 0.05 * static_cast<double>(i);
        y[5 + i] = 1;
    }

    // Exhaustive split-point oracle over midpoints (gini decrease).
    std::vector<double> sorted(X.data);
    std::sort(sorted.begin(), sorted.end());
    double best_gain = -1.0, best_threshold = 0.0;
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        if (sorted[i] == sorted[i + 1]) continue;
        const double threshold = 0.5 * (sorted[i] + sorted[i + 1]);
        double pos_left = 0, n_left = 0, pos_right = 0, n_right = 0;
        for (std::size_t r = 0; r < X.rows; ++r) {
            if (X(r, 0) <= threshold) {
                n_left += 1;
                pos_left += y[r];
            } else {
                n_right += 1;
                pos_right += y[r];
            }
        }
        const auto gini = [](double pos, double n) {
            if (n == 0) return 0.0;
            const double p = pos / n;
            return 2.0 * p * (1.0 - p);
        };
        const double gain = 0.5 - (n_left * gini(pos_left, n_left) +
                                   n_right * gini(pos_right, n_right)) / 10.0;
        if (gain > best_gain) {
            best_gain = gain;
            best_threshold = threshold;
        }
    }

    std::vector<double> targets(y.begin(), y.end());
    std::vector<std::size_t> rows(10);
    std::iota(rows.begin(), rows.end(), 0);
    TreeFitOptions options;
    options.max_depth = 1;
    Rng rng(0);
    const DecisionTree tree = fit_tree(X, targets, rows, options, rng);

    REQUIRE(tree.nodes[0].feature == 0);
    CHECK(tree.nodes[0].threshold == doctest::Approx(best_threshold));
    CHECK(tree.nodes[0].threshold > 0.3);
    CHECK(tree.nodes[0].threshold < 0.65);
}

TEST_CASE("rf and gbc: every split strictly decreases the node impurity") {
    const auto blobs = separable_blobs(40, 4, 0.15, 4);
    const auto params = fast_params();

    const auto check_tree = [](const DecisionTree& tree) {
        for (const auto& node : tree.nodes) {
            if (node.feature < 0) continue;
            const auto& left = tree.nodes[node.left];
            const auto& right = tree.nodes[node.right];
            const double weighted =
                (static_cast<double>(left.samples) * left.impurity +
                 static_cast<double>(right.samples) * right.impurity) /
                static_cast<double>(node.samples);
            CHECK(weighted < node.impurity);
        }
    };

    const auto rf = train_classifier(ClassifierKind::rf, blobs.X, blobs.y, 5, params);
    for (const auto& tree : std::get<ForestState>(rf.state()).trees) check_tree(tree);

    const auto gbc = train_classifier(ClassifierKind::gbc, blobs.X, blobs.y, 5, params);
    // gbc leaf values are Newton-adjusted after fitting, but impurity and
    // sample counts still describe the split decision.
    for (const auto& tree : std::get<GbcState>(gbc.state()).trees) check_tree(tree);
}

TEST_CASE("gbc: staged training loss is non-increasing") {
    const auto blobs = separable_blobs(40, 3, 0.2, 6);
    const auto params = fast_params();
    const auto model = train_classifier(ClassifierKind::gbc, blobs.X, blobs.y, 0, params);
    const auto losses = gbc_staged_train_loss(std::get<GbcState>(model.state()), blobs.X, blobs.y);
    REQUIRE(losses.size() == params.gbc_stages + 1);
    for (std::size_t i = 1; i < losses.size(); ++i) CHECK(losses[i] <= losses[i - 1] + 1e-12);
}

TEST_CASE("ann: separates the separable and scores duplicates identically") {
    const auto blobs = separable_blobs(25, 3, 0.5, 7);
    const auto model =
        train_classifier(ClassifierKind::ann, blobs.X, blobs.y, 11, fast_params());
    const auto scores = model.score_batch(blobs.X);
    CHECK(positives_above_negatives(scores, blobs.y));

    Matrix duplicated(2, 3);
    for (std::size_t c = 0; c < 3; ++c) duplicated(0, c) = duplicated(1, c) = blobs.X(0, c);
    const auto pair_scores = model.score_batch(duplicated);
    CHECK(pair_scores[0] == pair_scores[1]);
}

TEST_CASE("ann: its loss passes the nn-core gradient check") {
    Rng rng(8);
    MlpParams net = init_mlp({4, 12, 1}, Activation::relu, Activation::sigmoid, rng);
    Matrix batch = test_helpers::random_matrix(5, 4, rng, 0.25, 1.0);
    for (int attempt = 0; attempt < 50; ++attempt) {
        const ActivationStack stack = forward(net, batch);
        double min_abs = 1e9;
        for (double v : stack.pre[0].data) min_abs = std::min(min_abs, std::abs(v));
        if (min_abs > 1e-3) break;
        for (double& v : batch.data) v += 0.01;
    }
    Matrix target(5, 1);
    for (std::size_t i = 0; i < 5; ++i) target(i, 0) = i % 2;
    CHECK(gradient_check(net, batch, LossKind::logistic, target) < 1e-6);
}

TEST_CASE("svm: margins rank the separable correctly") {
    const auto blobs = separable_blobs(30, 2, 0.5, 9);
    const auto model = train_classifier(ClassifierKind::svm, blobs.X, blobs.y, 13);
    const auto scores = model.score_batch(blobs.X);
    CHECK(auc(scores, blobs.y) == 1.0);
    // Margins are signed, not probabilities.
    bool any_negative = false;
    for (double s : scores) any_negative = any_negative || s < 0.0;
    CHECK(any_negative);
}

TEST_CASE("every kind: same seed reproduces identical scores on a probe set") {
    const auto blobs = separable_blobs(25, 3, 0.3, 10);
    const auto probe = separable_blobs(10, 3, 0.3, 99).X;
    const auto params = fast_params();
    for (ClassifierKind kind : {ClassifierKind::knn, ClassifierKind::ann, ClassifierKind::svm,
                                ClassifierKind::rf, ClassifierKind::gbc}) {
        const auto a = train_classifier(kind, blobs.X, blobs.y, 21, params);
        const auto b = train_classifier(kind, blobs.X, blobs.y, 21, params);
        CHECK(a.score_batch(probe) == b.score_batch(probe));
    }
}

TEST_CASE("rejected inputs: single class and feature mismatch") {
    Matrix X(4, 2);
    const std::vector<int> single_class = {1, 1, 1, 1};
    CHECK_THROWS_AS(train_classifier(ClassifierKind::knn, X, single_class, 0), InvalidArgument);

    const auto blobs = separable_blobs(10, 3, 0.4, 11);
    const auto model = train_classifier(ClassifierKind::rf, blobs.X, blobs.y, 0, fast_params());
    CHECK_THROWS_AS(model.score_batch(Matrix(2, 5)), InvalidArgument);

    const std::vector<int> bad_labels = {0, 2, 0, 1};
    CHECK_THROWS_AS(train_classifier(ClassifierKind::knn, X, bad_labels, 0), InvalidArgument);
}
