#include "tabaug/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tabaug/errors.hpp"
#include "tabaug/rng.hpp"

namespace tabaug {

const char* to_string(ClassifierKind k) {
    switch (k) {
        case ClassifierKind::knn: return "knn";
        case ClassifierKind::ann: return "ann";
        case ClassifierKind::svm: return "svm";
        case ClassifierKind::rf: return "rf";
        case ClassifierKind::gbc: return "gbc";
    }
    return "?";
}

ClassifierKind classifier_from_string(const std::string& s) {
    if (s == "knn") return ClassifierKind::knn;
    if (s == "ann") return ClassifierKind::ann;
    if (s == "svm") return ClassifierKind::svm;
    if (s == "rf") return ClassifierKind::rf;
    if (s == "gbc") return ClassifierKind::gbc;
    throw InvalidArgument("unknown classifier: " + s);
}

namespace {

void validate_training_input(const Matrix& X, const std::vector<int>& y) {
    if (X.rows != y.size() || X.rows < 2)
        throw InvalidArgument("train_classifier: need X.rows == y.size() >= 2");
    std::size_t pos = 0;
    for (int label : y) {
        if (label != 0 && label != 1)
            throw InvalidArgument("train_classifier: labels must be 0 or 1");
        pos += static_cast<std::size_t>(label);
    }
    if (pos == 0 || pos == y.size())
        throw InvalidArgument("train_classifier: both classes must be present");
}

KnnState train_knn(const Matrix& X, const std::vector<int>& y, const ClassifierParams& params) {
    return KnnState{X, y, std::max<std::size_t>(1, params.knn_k)};
}

AnnState train_ann(const Matrix& X, const std::vector<int>& y, std::uint64_t seed,
                   const ClassifierParams& params) {
    Rng rng(seed);
    MlpParams net = init_mlp({X.cols, params.ann_hidden, 1}, Activation::relu,
                             Activation::sigmoid, rng);
    OptimizerState opt = make_optimizer(OptimizerKind::adam, net, params.ann_learning_rate);

    const std::size_t n = X.rows;
    const std::size_t batch = std::min(params.ann_batch, n);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    for (std::size_t epoch = 0; epoch < params.ann_epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < n; start += batch) {
            const std::size_t count = std::min(batch, n - start);
            const std::span<const std::size_t> idx(order.data() + start, count);
            const Matrix bx = take_rows(X, idx);
            Matrix by(count, 1);
            for (std::size_t i = 0; i < count; ++i) by(i, 0) = y[idx[i]];
            const ActivationStack stack = forward(net, bx);
            const Matrix grad = loss_output_grad(LossKind::logistic, stack.output(), by);
            optimizer_step(net, backward(net, stack, grad), opt);
        }
    }
    return AnnState{std::move(net)};
}

SvmState train_svm(const Matrix& X, const std::vector<int>& y, std::uint64_t seed,
                   const ClassifierParams& params) {
    const std::size_t n = X.rows;
    const std::size_t d = X.cols + 1; // augmented constant feature carries the bias
    const double lambda = 1.0 / (params.svm_c * static_cast<double>(n));
    std::vector<double> w(d, 0.0);

    Rng rng(seed);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    std::size_t t = 0;
    for (std::size_t epoch = 0; epoch < params.svm_epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t i : order) {
            ++t;
            const double eta = 1.0 / (lambda * static_cast<double>(t));
            const double label = y[i] == 1 ? 1.0 : -1.0;
            const auto row = X.row(i);
            double margin = w[d - 1];
            for (std::size_t j = 0; j < X.cols; ++j) margin += w[j] * row[j];
            margin *= label;

            const double keep = 1.0 - eta * lambda;
            for (double& v : w) v *= keep;
            if (margin < 1.0) {
                for (std::size_t j = 0; j < X.cols; ++j) w[j] += eta * label * row[j];
                w[d - 1] += eta * label;
            }
            // Pegasos projection onto the ball of radius 1/sqrt(lambda).
            double norm_sq = 0.0;
            for (double v : w) norm_sq += v * v;
            const double radius = 1.0 / std::sqrt(lambda);
            if (norm_sq > radius * radius) {
                const double scale = radius / std::sqrt(norm_sq);
                for (double& v : w) v *= scale;
            }
        }
    }
    return SvmState{std::move(w)};
}

ForestState train_rf(const Matrix& X, const std::vector<int>& y, std::uint64_t seed,
                     const ClassifierParams& params) {
    std::vector<double> targets(y.begin(), y.end());
    TreeFitOptions options;
    options.criterion = SplitCriterion::gini;
    options.max_depth = 0;
    options.min_samples_split = params.rf_min_samples_split;
    options.max_features = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::sqrt(static_cast<double>(X.cols))));

    ForestState forest;
    forest.trees.reserve(params.rf_trees);
    for (std::size_t t = 0; t < params.rf_trees; ++t) {
        Rng tree_rng(derive_seed(seed, "tree", t));
        std::vector<std::size_t> bootstrap(X.rows);
        for (auto& r : bootstrap) r = static_cast<std::size_t>(tree_rng.below(X.rows));
        forest.trees.push_back(fit_tree(X, targets, bootstrap, options, tree_rng));
    }
    return forest;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

GbcState train_gbc(const Matrix& X, const std::vector<int>& y, std::uint64_t seed,
                   const ClassifierParams& params) {
    const std::size_t n = X.rows;
    double pos = 0.0;
    for (int label : y) pos += label;
    GbcState state;
    state.learning_rate = params.gbc_learning_rate;
    state.initial_score = std::log(pos / (static_cast<double>(n) - pos));

    TreeFitOptions options;
    options.criterion = SplitCriterion::mse;
    options.max_depth = params.gbc_depth;
    options.min_samples_split = 2;
    options.max_features = 0;

    std::vector<double> score(n, state.initial_score);
    std::vector<double> residual(n);
    std::vector<std::size_t> all_rows(n);
    std::iota(all_rows.begin(), all_rows.end(), 0);
    Rng rng(derive_seed(seed, "gbc")); // trees use every feature; rng is idle

    for (std::size_t stage = 0; stage < params.gbc_stages; ++stage) {
        for (std::size_t i = 0; i < n; ++i)
            residual[i] = static_cast<double>(y[i]) - sigmoid(score[i]);
        DecisionTree tree = fit_tree(X, residual, all_rows, options, rng);

        // Newton leaf values: sum(residual) / sum(p(1-p)) per leaf.
        std::vector<double> num(tree.nodes.size(), 0.0), den(tree.nodes.size(), 0.0);
        std::vector<std::size_t> leaf_of(n);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t leaf = tree.leaf_index(X.row(i));
            leaf_of[i] = leaf;
            const double p = sigmoid(score[i]);
            num[leaf] += residual[i];
            den[leaf] += p * (1.0 - p);
        }
        for (std::size_t node = 0; node < tree.nodes.size(); ++node) {
            if (tree.nodes[node].feature < 0)
                tree.nodes[node].value = num[node] / std::max(den[node], 1e-12);
        }
        for (std::size_t i = 0; i < n; ++i)
            score[i] += state.learning_rate * tree.nodes[leaf_of[i]].value;
        state.trees.push_back(std::move(tree));
    }
    return state;
}

double logistic_margin_loss(const std::vector<double>& score, const std::vector<int>& y) {
    double acc = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double m = (y[i] == 1 ? 1.0 : -1.0) * score[i];
        acc += m > 0.0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
    }
    return acc / static_cast<double>(y.size());
}

} // namespace

TrainedClassifier train_classifier(ClassifierKind kind, const Matrix& X,
                                   const std::vector<int>& y, std::uint64_t seed,
                                   const ClassifierParams& params) {
    validate_training_input(X, y);
    switch (kind) {
        case ClassifierKind::knn:
            return {kind, X.cols, train_knn(X, y, params)};
        case ClassifierKind::ann:
            return {kind, X.cols, train_ann(X, y, seed, params)};
        case ClassifierKind::svm:
            return {kind, X.cols, train_svm(X, y, seed, params)};
        case ClassifierKind::rf:
            return {kind, X.cols, train_rf(X, y, seed, params)};
        case ClassifierKind::gbc:
            return {kind, X.cols, train_gbc(X, y, seed, params)};
    }
    throw InvalidArgument("train_classifier: unknown kind");
}

std::vector<double> TrainedClassifier::score_batch(const Matrix& X) const {
    if (X.cols != feature_count_)
        throw InvalidArgument("score_batch: feature count mismatch (got " +
                              std::to_string(X.cols) + ", expected " +
                              std::to_string(feature_count_) + ")");
    std::vector<double> scores(X.rows, 0.0);

    if (const auto* knn = std::get_if<KnnState>(&state_)) {
        const std::size_t k = std::min(knn->k, knn->train.rows);
        std::vector<std::pair<double, std::size_t>> dist(knn->train.rows);
        for (std::size_t q = 0; q < X.rows; ++q) {
            const auto query = X.row(q);
            for (std::size_t i = 0; i < knn->train.rows; ++i) {
                const auto row = knn->train.row(i);
                double d2 = 0.0;
                for (std::size_t c = 0; c < X.cols; ++c) {
                    const double diff = query[c] - row[c];
                    d2 += diff * diff;
                }
                dist[i] = {d2, i};
            }
            std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k),
                              dist.end());
            double votes = 0.0;
            for (std::size_t i = 0; i < k; ++i) votes += knn->labels[dist[i].second];
            scores[q] = votes / static_cast<double>(k);
        }
    } else if (const auto* ann = std::get_if<AnnState>(&state_)) {
        const Matrix out = forward(ann->net, X).output();
        for (std::size_t i = 0; i < X.rows; ++i) scores[i] = out(i, 0);
    } else if (const auto* svm = std::get_if<SvmState>(&state_)) {
        for (std::size_t i = 0; i < X.rows; ++i) {
            const auto row = X.row(i);
            double margin = svm->weights.back();
            for (std::size_t j = 0; j < X.cols; ++j) margin += svm->weights[j] * row[j];
            scores[i] = margin;
        }
    } else if (const auto* rf = std::get_if<ForestState>(&state_)) {
        for (std::size_t i = 0; i < X.rows; ++i) {
            double acc = 0.0;
            for (const auto& tree : rf->trees) acc += tree.predict(X.row(i));
            scores[i] = acc / static_cast<double>(rf->trees.size());
        }
    } else if (const auto* gbc = std::get_if<GbcState>(&state_)) {
        for (std::size_t i = 0; i < X.rows; ++i) {
            double f = gbc->initial_score;
            for (const auto& tree : gbc->trees)
                f += gbc->learning_rate * tree.predict(X.row(i));
            scores[i] = f;
        }
    }

    for (double s : scores) {
        if (!std::isfinite(s)) throw NumericFault("score_batch: non-finite score");
    }
    return scores;
}

std::vector<double> gbc_staged_train_loss(const GbcState& state, const Matrix& X,
                                          const std::vector<int>& y) {
    std::vector<double> score(X.rows, state.initial_score);
    std::vector<double> losses;
    losses.reserve(state.trees.size() + 1);
    losses.push_back(logistic_margin_loss(score, y));
    for (const auto& tree : state.trees) {
        for (std::size_t i = 0; i < X.rows; ++i)
            score[i] += state.learning_rate * tree.predict(X.row(i));
        losses.push_back(logistic_margin_loss(score, y));
    }
    return losses;
}

} // namespace tabaug
