#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "tabaug/decision_tree.hpp"
#include "tabaug/matrix.hpp"
#include "tabaug/nn.hpp"

namespace tabaug {

enum class ClassifierKind { knn, ann, svm, rf, gbc };

const char* to_string(ClassifierKind k);
ClassifierKind classifier_from_string(const std::string& s);

/// Defaults follow the common library defaults for each of the five kinds.
/// The SVM is a linear-kernel substitute trained by Pegasos-style subgradient
/// descent; its scores are signed margins.
struct ClassifierParams {
    std::size_t knn_k = 5;

    std::size_t ann_hidden = 100;
    std::size_t ann_epochs = 200;
    std::size_t ann_batch = 200; // capped at the training-set size
    double ann_learning_rate = 1e-3;

    double svm_c = 1.0;
    std::size_t svm_epochs = 20;

    std::size_t rf_trees = 100;
    std::size_t rf_min_samples_split = 2;

    std::size_t gbc_stages = 100;
    std::size_t gbc_depth = 3;
    double gbc_learning_rate = 0.1;
};

struct KnnState {
    Matrix train;
    std::vector<int> labels;
    std::size_t k = 5;
};

struct AnnState {
    MlpParams net;
};

struct SvmState {
    std::vector<double> weights; // last entry is the bias (augmented constant feature)
};

struct ForestState {
    std::vector<DecisionTree> trees;
};

struct GbcState {
    std::vector<DecisionTree> trees; // leaf values already Newton-adjusted
    double initial_score = 0.0;      // prior log-odds
    double learning_rate = 0.1;
};

/// Immutable after training; scores are ranking scores (higher = more
/// positive), not calibrated probabilities.
class TrainedClassifier {
public:
    using State = std::variant<KnnState, AnnState, SvmState, ForestState, GbcState>;

    TrainedClassifier(ClassifierKind kind, std::size_t feature_count, State state)
        : kind_(kind), feature_count_(feature_count), state_(std::move(state)) {}

    ClassifierKind kind() const { return kind_; }
    std::size_t feature_count() const { return feature_count_; }
    const State& state() const { return state_; }

    std::vector<double> score_batch(const Matrix& X) const;

private:
    ClassifierKind kind_;
    std::size_t feature_count_;
    State state_;
};

/// Requires both classes present and X.rows == y.size() >= 2.
TrainedClassifier train_classifier(ClassifierKind kind, const Matrix& X,
                                   const std::vector<int>& y, std::uint64_t seed,
                                   const ClassifierParams& params = {});

/// Training-set logistic loss after each boosting stage (test hook for the
/// non-increasing staged-loss property).
std::vector<double> gbc_staged_train_loss(const GbcState& state, const Matrix& X,
                                          const std::vector<int>& y);

} // namespace tabaug
