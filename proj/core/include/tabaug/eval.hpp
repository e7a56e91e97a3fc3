#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tabaug/classifiers.hpp"
#include "tabaug/data.hpp"
#include "tabaug/gan.hpp"
#include "tabaug/smote.hpp"

namespace tabaug {

/// Mann-Whitney AUC: ties get average ranks, so each tied (pos, neg) pair
/// contributes one half. Requires both classes present.
double auc(const std::vector<double>& scores, const std::vector<int>& labels);

struct FoldPlan {
    std::size_t k = 10;
    std::vector<std::size_t> fold_of; // per-row fold assignment
    std::uint64_t seed = 0;
};

/// Within each class, rows are shuffled by seed and dealt round-robin, so
/// per-fold class counts differ by at most one. Each class needs >= k rows.
FoldPlan stratified_folds(const std::vector<int>& labels, std::size_t k, std::uint64_t seed);

enum class AugmenterKind { none, smote, gan, wgan, iwgan, mwgan, swgan, r_iwgan };

struct Augmenter {
    AugmenterKind kind = AugmenterKind::none;
    double delta = 0.0; // r_iwgan only
};

/// "r_iwgan+0.10" style for r_iwgan; the bare kind name otherwise.
std::string augmenter_name(const Augmenter& augmenter);
Augmenter augmenter_from_name(const std::string& name);

/// Everything a reproduction run needs in one place. All per-cell randomness
/// is derived from `seed` and the cell key, so any subset of the grid can be
/// recomputed independently and agree with the full run.
struct ExperimentConfig {
    TrainConfig wgan_cfg = default_wgan_config();
    TrainConfig gan_cfg = default_gan_config();
    SmoteParams smote_params;
    ClassifierParams classifier_params;
    std::vector<std::size_t> hidden = {64, 32};          // constrained trunk
    std::vector<std::size_t> unconstrained_d = {48, 24}; // baseline critic trunk
    double grid_r_iwgan_delta = 0.10;
    std::size_t folds = 10;
    std::uint64_t seed = 42;
    std::size_t threads = 1;
};

std::string fingerprint(const ExperimentConfig& cfg);

struct CellResult {
    std::string dataset;
    std::string augmenter;
    ClassifierKind classifier = ClassifierKind::knn;
    std::vector<double> fold_aucs;
    double mean_auc = 0.0;
    double std_auc = 0.0; // population standard deviation over folds
    bool failed = false;
    std::string diagnostic;
};

struct ExperimentGrid {
    std::vector<CellResult> cells;
    std::string config_fingerprint;
};

/// The architecture a given augmenter trains under, at this data width.
ArchSpec arch_for_augmenter(const Augmenter& augmenter, std::size_t data_dim,
                            const ExperimentConfig& cfg);

/// Synthetic minority rows for one training split. GAN-family augmenters
/// train on the minority rows with the batch size clamped to the row count;
/// SMOTE clamps k to rows-1.
Matrix synthesize_minority(const Matrix& minority, std::size_t n_needed,
                           const Augmenter& augmenter, const ExperimentConfig& cfg,
                           std::uint64_t seed);

/// The fold plan run_grid builds for a dataset; standalone run_cell callers
/// use this to land on the same partition.
FoldPlan plan_for_dataset(const Dataset& ds, std::size_t folds, const ExperimentConfig& cfg);

/// One (dataset, augmenter, classifier) cell: per fold, fit the augmenter on
/// the training split's minority rows, top the split up to a 1:1 class
/// balance, train the classifier, and score the untouched test split.
/// Augmenter divergence marks the cell failed instead of aborting.
CellResult run_cell(const Dataset& ds, const Augmenter& augmenter, ClassifierKind classifier,
                    const FoldPlan& plan, const ExperimentConfig& cfg);

/// Full factorial sweep under one FoldPlan per dataset (paired comparison).
/// Synthetic rows are generated once per (dataset, augmenter, fold) and shared
/// across classifiers; cell keys and derived seeds make the result identical
/// to calling run_cell per cell.
ExperimentGrid run_grid(const std::vector<Dataset>& datasets,
                        const std::vector<Augmenter>& augmenters,
                        const std::vector<ClassifierKind>& classifiers,
                        std::size_t folds, const ExperimentConfig& cfg);

struct GridSummary {
    std::size_t groups_total = 0;     // (dataset, classifier) pairs
    std::size_t groups_evaluated = 0; // groups with no failed relevant cell
    std::size_t improved_over_wgan = 0; // best constrained beats plain wgan
    std::size_t iwgan_best = 0;         // iwgan beats every other augmentation method
    std::size_t iwgan_wins_vs_wgan = 0;
    std::size_t mwgan_wins_vs_wgan = 0;
    std::size_t swgan_wins_vs_wgan = 0;
    std::vector<std::string> excluded_groups; // "dataset/classifier" with failures
};

GridSummary summarize(const ExperimentGrid& grid);

/// Trains the unconstrained baseline and the isomorphic variant on the
/// dataset's minority rows with identical config and seed; the traces differ
/// only through architecture.
std::pair<LossTrace, LossTrace> convergence_compare(const Dataset& ds,
                                                    const ExperimentConfig& cfg);

/// |iwgan iteration-0 generator loss| / |wgan iteration-0 generator loss|.
double initial_loss_ratio(const LossTrace& wgan_trace, const LossTrace& iwgan_trace);

struct SweepRow {
    double delta = 0.0; // 0 marks the exact-isomorphic reference
    ClassifierKind classifier = ClassifierKind::knn;
    double mean_auc = 0.0;
    bool failed = false;
};

struct SweepResult {
    std::vector<SweepRow> rows; // sorted by (classifier order, |delta|, delta)
    std::vector<std::pair<ClassifierKind, double>> trend; // Spearman(|delta|, auc)
    std::string config_fingerprint;
};

/// r-IWGAN node-perturbation sweep: the exact-isomorphic reference plus one
/// run per delta, per classifier, all under one FoldPlan.
SweepResult relative_iso_sweep(const Dataset& ds, const std::vector<ClassifierKind>& classifiers,
                               const std::vector<double>& deltas, std::size_t folds,
                               const ExperimentConfig& cfg);

/// Spearman rank correlation with average ranks on ties.
double spearman(const std::vector<double>& xs, const std::vector<double>& ys);

} // namespace tabaug
