#include "tabaug/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

#include "tabaug/errors.hpp"
#include "tabaug/rng.hpp"

namespace tabaug {

double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size())
        throw InvalidArgument("auc: scores and labels differ in length");
    std::size_t n_pos = 0;
    for (int label : labels) {
        if (label != 0 && label != 1) throw InvalidArgument("auc: labels must be 0 or 1");
        n_pos += static_cast<std::size_t>(label);
    }
    const std::size_t n = scores.size();
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0)
        throw InvalidArgument("auc: both classes must be present");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Average ranks over tie groups (1-based), then the Mann-Whitney statistic.
    double pos_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t t = i; t < j; ++t) {
            if (labels[order[t]] == 1) pos_rank_sum += avg_rank;
        }
        i = j;
    }
    const double u = pos_rank_sum -
                     0.5 * static_cast<double>(n_pos) * static_cast<double>(n_pos + 1);
    return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

FoldPlan stratified_folds(const std::vector<int>& labels, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw InvalidArgument("stratified_folds: k must be >= 2");
    std::vector<std::size_t> class_rows[2];
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != 0 && labels[i] != 1)
            throw InvalidArgument("stratified_folds: labels must be 0 or 1");
        class_rows[labels[i]].push_back(i);
    }
    for (int c = 0; c < 2; ++c) {
        if (class_rows[c].size() < k)
            throw InvalidArgument("stratified_folds: class " + std::to_string(c) + " has " +
                                  std::to_string(class_rows[c].size()) + " rows, needs >= " +
                                  std::to_string(k));
    }
    FoldPlan plan;
    plan.k = k;
    plan.seed = seed;
    plan.fold_of.assign(labels.size(), 0);
    Rng rng(seed);
    for (int c = 0; c < 2; ++c) {
        rng.shuffle(class_rows[c]);
        for (std::size_t i = 0; i < class_rows[c].size(); ++i)
            plan.fold_of[class_rows[c][i]] = i % k;
    }
    return plan;
}

std::string augmenter_name(const Augmenter& augmenter) {
    switch (augmenter.kind) {
        case AugmenterKind::none: return "none";
        case AugmenterKind::smote: return "smote";
        case AugmenterKind::gan: return "gan";
        case AugmenterKind::wgan: return "wgan";
        case AugmenterKind::iwgan: return "iwgan";
        case AugmenterKind::mwgan: return "mwgan";
        case AugmenterKind::swgan: return "swgan";
        case AugmenterKind::r_iwgan: {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "r_iwgan%+.2f", augmenter.delta);
            return buf;
        }
    }
    return "?";
}

Augmenter augmenter_from_name(const std::string& name) {
    if (name == "none") return {AugmenterKind::none, 0.0};
    if (name == "smote") return {AugmenterKind::smote, 0.0};
    if (name == "gan") return {AugmenterKind::gan, 0.0};
    if (name == "wgan") return {AugmenterKind::wgan, 0.0};
    if (name == "iwgan") return {AugmenterKind::iwgan, 0.0};
    if (name == "mwgan") return {AugmenterKind::mwgan, 0.0};
    if (name == "swgan") return {AugmenterKind::swgan, 0.0};
    if (name.rfind("r_iwgan", 0) == 0) {
        const std::string rest = name.substr(7);
        if (!rest.empty()) {
            try {
                const double delta = std::stod(rest);
                if (is_permitted_delta(delta)) return {AugmenterKind::r_iwgan, delta};
            } catch (const std::exception&) {
            }
        }
        throw InvalidArgument("augmenter_from_name: r_iwgan needs a delta in "
                              "{+-0.10, +-0.20, +-0.30}, got '" + name + "'");
    }
    throw InvalidArgument("augmenter_from_name: unknown augmenter '" + name + "'");
}

namespace {

std::string widths_str(const std::vector<std::size_t>& widths) {
    std::string out;
    for (std::size_t i = 0; i < widths.size(); ++i) {
        if (i) out += "x";
        out += std::to_string(widths[i]);
    }
    return out;
}

} // namespace

std::string fingerprint(const ExperimentConfig& cfg) {
    std::ostringstream os;
    const auto& cp = cfg.classifier_params;
    os << "seed=" << cfg.seed << " folds=" << cfg.folds << " hidden=" << widths_str(cfg.hidden)
       << " unconstrained_d=" << widths_str(cfg.unconstrained_d);
    char delta_buf[16];
    std::snprintf(delta_buf, sizeof(delta_buf), "%+.2f", cfg.grid_r_iwgan_delta);
    os << " grid_r_iwgan_delta=" << delta_buf;
    os << " wgan{" << describe(cfg.wgan_cfg) << "} gan{" << describe(cfg.gan_cfg) << "}";
    os << " smote_k=" << cfg.smote_params.k << " knn_k=" << cp.knn_k << " ann=" << cp.ann_hidden
       << "u/" << cp.ann_epochs << "ep/lr" << cp.ann_learning_rate << " svm_c=" << cp.svm_c
       << "/" << cp.svm_epochs << "ep rf=" << cp.rf_trees << " gbc=" << cp.gbc_stages << "x"
       << cp.gbc_depth << "/lr" << cp.gbc_learning_rate;
    return os.str();
}

ArchSpec arch_for_augmenter(const Augmenter& augmenter, std::size_t data_dim,
                            const ExperimentConfig& cfg) {
    switch (augmenter.kind) {
        case AugmenterKind::gan:
        case AugmenterKind::wgan:
            return build_unconstrained(data_dim, cfg.hidden, cfg.unconstrained_d);
        case AugmenterKind::iwgan:
            return build_isomorphic(data_dim, cfg.hidden);
        case AugmenterKind::mwgan:
            return build_mirror(data_dim, cfg.hidden);
        case AugmenterKind::swgan:
            return build_self_symmetric(data_dim, cfg.hidden);
        case AugmenterKind::r_iwgan:
            return build_relative_isomorphic(data_dim, cfg.hidden, augmenter.delta);
        case AugmenterKind::none:
        case AugmenterKind::smote:
            break;
    }
    throw InvalidArgument("arch_for_augmenter: '" + augmenter_name(augmenter) +
                          "' trains no network");
}

Matrix synthesize_minority(const Matrix& minority, std::size_t n_needed,
                           const Augmenter& augmenter, const ExperimentConfig& cfg,
                           std::uint64_t seed) {
    if (augmenter.kind == AugmenterKind::none || n_needed == 0)
        return Matrix(0, minority.cols);

    if (augmenter.kind == AugmenterKind::smote) {
        SmoteParams params = cfg.smote_params;
        params.seed = seed;
        if (minority.rows < 2)
            throw InvalidArgument("synthesize_minority: smote needs >= 2 minority rows");
        params.k = std::min(params.k, minority.rows - 1);
        return smote(minority, n_needed, params);
    }

    const ArchSpec spec = arch_for_augmenter(augmenter, minority.cols, cfg);
    TrainConfig tc = augmenter.kind == AugmenterKind::gan ? cfg.gan_cfg : cfg.wgan_cfg;
    tc.seed = seed;
    tc.batch_size = std::min(tc.batch_size, minority.rows);
    const auto trained = augmenter.kind == AugmenterKind::gan ? train_gan(minority, spec, tc)
                                                              : train_wgan(minority, spec, tc);
    return sample(trained.first, n_needed, derive_seed(seed, "sample"));
}

namespace {

struct SplitData {
    Matrix train_X;
    std::vector<int> train_y;
    Matrix test_X;
    std::vector<int> test_y;
    Matrix minority;   // training-split minority rows
    int minority_label = 1;
    std::size_t n_needed = 0;
};

SplitData make_split(const Dataset& ds, const FoldPlan& plan, std::size_t fold) {
    SplitData split;
    std::vector<std::size_t> train_idx, test_idx;
    for (std::size_t i = 0; i < ds.y.size(); ++i)
        (plan.fold_of[i] == fold ? test_idx : train_idx).push_back(i);

    split.train_X = take_rows(ds.X, train_idx);
    split.test_X = take_rows(ds.X, test_idx);
    for (std::size_t i : train_idx) split.train_y.push_back(ds.y[i]);
    for (std::size_t i : test_idx) split.test_y.push_back(ds.y[i]);

    std::size_t pos = 0;
    for (int label : split.train_y) pos += static_cast<std::size_t>(label);
    const std::size_t neg = split.train_y.size() - pos;
    split.minority_label = (pos * 2 <= split.train_y.size()) ? 1 : 0;
    split.n_needed = pos >= neg ? pos - neg : neg - pos;

    std::vector<std::size_t> minority_rows;
    for (std::size_t i = 0; i < split.train_y.size(); ++i) {
        if (split.train_y[i] == split.minority_label) minority_rows.push_back(i);
    }
    split.minority = take_rows(split.train_X, minority_rows);
    return split;
}

std::uint64_t synth_seed(const ExperimentConfig& cfg, const std::string& dataset,
                         const std::string& augmenter, std::size_t fold) {
    return derive_seed(cfg.seed, "aug:" + dataset + ":" + augmenter, fold);
}

// Classifier seeds do not depend on the augmenter: the paired design trains
// the same classifier stream against every augmenter's output, and a
// zero-synthesis cell reduces exactly to the augmenter=none cell.
std::uint64_t classifier_seed(const ExperimentConfig& cfg, const std::string& dataset,
                              ClassifierKind clf, std::size_t fold) {
    return derive_seed(cfg.seed, "clf:" + dataset + ":" + to_string(clf), fold);
}

double fold_auc(const SplitData& split, const Matrix& synthetic, ClassifierKind clf,
                std::uint64_t seed, const ClassifierParams& params) {
    Matrix X = split.train_X;
    std::vector<int> y = split.train_y;
    if (synthetic.rows > 0) {
        X = vstack(X, synthetic);
        y.insert(y.end(), synthetic.rows, split.minority_label);
    }
    const TrainedClassifier model = train_classifier(clf, X, y, seed, params);
    return auc(model.score_batch(split.test_X), split.test_y);
}

void finalize_stats(CellResult& cell) {
    if (cell.failed || cell.fold_aucs.empty()) {
        cell.fold_aucs.clear();
        cell.mean_auc = 0.0;
        cell.std_auc = 0.0;
        return;
    }
    const double k = static_cast<double>(cell.fold_aucs.size());
    double mean = 0.0;
    for (double a : cell.fold_aucs) mean += a;
    mean /= k;
    double var = 0.0;
    for (double a : cell.fold_aucs) var += (a - mean) * (a - mean);
    cell.mean_auc = mean;
    cell.std_auc = std::sqrt(var / k);
}

} // namespace

CellResult run_cell(const Dataset& ds, const Augmenter& augmenter, ClassifierKind classifier,
                    const FoldPlan& plan, const ExperimentConfig& cfg) {
    if (plan.fold_of.size() != ds.y.size())
        throw InvalidArgument("run_cell: fold plan does not match the dataset");

    CellResult cell;
    cell.dataset = ds.name;
    cell.augmenter = augmenter_name(augmenter);
    cell.classifier = classifier;

    for (std::size_t fold = 0; fold < plan.k; ++fold) {
        try {
            const SplitData split = make_split(ds, plan, fold);
            const Matrix synthetic =
                synthesize_minority(split.minority, split.n_needed, augmenter, cfg,
                                    synth_seed(cfg, ds.name, cell.augmenter, fold));
            cell.fold_aucs.push_back(fold_auc(split, synthetic, classifier,
                                              classifier_seed(cfg, ds.name, classifier, fold),
                                              cfg.classifier_params));
        } catch (const std::exception& e) {
            cell.failed = true;
            cell.diagnostic = "fold " + std::to_string(fold) + ": " + e.what();
            break;
        }
    }
    finalize_stats(cell);
    return cell;
}

FoldPlan plan_for_dataset(const Dataset& ds, std::size_t folds, const ExperimentConfig& cfg) {
    return stratified_folds(ds.y, folds, derive_seed(cfg.seed, "folds:" + ds.name));
}

ExperimentGrid run_grid(const std::vector<Dataset>& datasets,
                        const std::vector<Augmenter>& augmenters,
                        const std::vector<ClassifierKind>& classifiers,
                        std::size_t folds, const ExperimentConfig& cfg) {
    struct Task {
        std::size_t ds_index;
        std::size_t aug_index;
        std::size_t fold;
    };
    struct Outcome {
        std::vector<double> auc_per_classifier; // parallel to `classifiers`
        bool failed = false;
        std::string diagnostic;
    };

    std::vector<FoldPlan> plans;
    plans.reserve(datasets.size());
    for (const auto& ds : datasets) plans.push_back(plan_for_dataset(ds, folds, cfg));

    std::vector<Task> tasks;
    for (std::size_t d = 0; d < datasets.size(); ++d)
        for (std::size_t a = 0; a < augmenters.size(); ++a)
            for (std::size_t f = 0; f < folds; ++f) tasks.push_back({d, a, f});

    std::vector<Outcome> outcomes(tasks.size());
    const auto run_task = [&](std::size_t t) {
        const Task& task = tasks[t];
        Outcome& out = outcomes[t];
        const Dataset& ds = datasets[task.ds_index];
        const Augmenter& augmenter = augmenters[task.aug_index];
        const std::string aug_name = augmenter_name(augmenter);
        try {
            const SplitData split = make_split(ds, plans[task.ds_index], task.fold);
            const Matrix synthetic =
                synthesize_minority(split.minority, split.n_needed, augmenter, cfg,
                                    synth_seed(cfg, ds.name, aug_name, task.fold));
            for (ClassifierKind clf : classifiers) {
                out.auc_per_classifier.push_back(
                    fold_auc(split, synthetic, clf,
                             classifier_seed(cfg, ds.name, clf, task.fold),
                             cfg.classifier_params));
            }
        } catch (const std::exception& e) {
            out.failed = true;
            out.diagnostic = "fold " + std::to_string(task.fold) + ": " + e.what();
            out.auc_per_classifier.clear();
        }
    };

    const std::size_t workers = std::max<std::size_t>(1, cfg.threads);
    if (workers == 1) {
        for (std::size_t t = 0; t < tasks.size(); ++t) run_task(t);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t t = next.fetch_add(1); t < tasks.size(); t = next.fetch_add(1))
                    run_task(t);
            });
        }
        for (auto& th : pool) th.join();
    }

    // Assemble cells in deterministic (dataset, augmenter, classifier) order.
    ExperimentGrid grid;
    grid.config_fingerprint = fingerprint(cfg);
    for (std::size_t d = 0; d < datasets.size(); ++d) {
        for (std::size_t a = 0; a < augmenters.size(); ++a) {
            const std::size_t base = (d * augmenters.size() + a) * folds;
            for (std::size_t c = 0; c < classifiers.size(); ++c) {
                CellResult cell;
                cell.dataset = datasets[d].name;
                cell.augmenter = augmenter_name(augmenters[a]);
                cell.classifier = classifiers[c];
                for (std::size_t f = 0; f < folds; ++f) {
                    const Outcome& out = outcomes[base + f];
                    if (out.failed) {
                        cell.failed = true;
                        if (cell.diagnostic.empty()) cell.diagnostic = out.diagnostic;
                        break;
                    }
                    cell.fold_aucs.push_back(out.auc_per_classifier[c]);
                }
                finalize_stats(cell);
                grid.cells.push_back(std::move(cell));
            }
        }
    }
    return grid;
}

GridSummary summarize(const ExperimentGrid& grid) {
    struct Group {
        std::map<std::string, double> mean_by_augmenter;
        bool any_failed = false;
    };
    std::map<std::pair<std::string, std::string>, Group> groups;
    for (const auto& cell : grid.cells) {
        auto& group = groups[{cell.dataset, to_string(cell.classifier)}];
        if (cell.failed) {
            group.any_failed = true;
        } else {
            group.mean_by_augmenter[cell.augmenter] = cell.mean_auc;
        }
    }

    GridSummary summary;
    summary.groups_total = groups.size();
    for (const auto& [key, group] : groups) {
        const auto& means = group.mean_by_augmenter;
        const bool has_required = means.count("wgan") && means.count("iwgan") &&
                                  means.count("mwgan") && means.count("swgan");
        if (group.any_failed || !has_required) {
            summary.excluded_groups.push_back(key.first + "/" + key.second);
            continue;
        }
        ++summary.groups_evaluated;
        const double wgan = means.at("wgan");
        const double iwgan = means.at("iwgan");
        const double mwgan = means.at("mwgan");
        const double swgan = means.at("swgan");
        if (iwgan > wgan) ++summary.iwgan_wins_vs_wgan;
        if (mwgan > wgan) ++summary.mwgan_wins_vs_wgan;
        if (swgan > wgan) ++summary.swgan_wins_vs_wgan;
        if (std::max({iwgan, mwgan, swgan}) > wgan) ++summary.improved_over_wgan;

        bool best = true;
        for (const auto& [name, mean] : means) {
            if (name == "none" || name == "iwgan") continue;
            if (mean >= iwgan) {
                best = false;
                break;
            }
        }
        if (best) ++summary.iwgan_best;
    }
    return summary;
}

std::pair<LossTrace, LossTrace> convergence_compare(const Dataset& ds,
                                                    const ExperimentConfig& cfg) {
    const Matrix minority = split_by_class(ds).first;
    TrainConfig tc = cfg.wgan_cfg;
    tc.seed = derive_seed(cfg.seed, "convergence:" + ds.name);
    tc.batch_size = std::min(tc.batch_size, minority.rows);

    const auto run_one = [&](const ArchSpec& spec) {
        LossTrace trace;
        TrainHooks hooks;
        hooks.on_trace_point = [&trace](const TracePoint& p) { trace.points.push_back(p); };
        try {
            train_wgan(minority, spec, tc, hooks);
        } catch (const NumericFault&) {
            // Divergence leaves a truncated trace; the comparison still runs.
        }
        return trace;
    };

    LossTrace wgan_trace =
        run_one(build_unconstrained(ds.X.cols, cfg.hidden, cfg.unconstrained_d));
    LossTrace iwgan_trace = run_one(build_isomorphic(ds.X.cols, cfg.hidden));
    return {std::move(wgan_trace), std::move(iwgan_trace)};
}

double initial_loss_ratio(const LossTrace& wgan_trace, const LossTrace& iwgan_trace) {
    if (wgan_trace.points.empty() || iwgan_trace.points.empty())
        return std::numeric_limits<double>::quiet_NaN();
    const double wgan0 = std::abs(wgan_trace.points.front().gen_loss);
    const double iwgan0 = std::abs(iwgan_trace.points.front().gen_loss);
    if (wgan0 == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return iwgan0 / wgan0;
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& xs) {
    const std::size_t n = xs.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && xs[order[j]] == xs[order[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t t = i; t < j; ++t) ranks[order[t]] = avg;
        i = j;
    }
    return ranks;
}

} // namespace

double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        return std::numeric_limits<double>::quiet_NaN();
    const auto rx = average_ranks(xs);
    const auto ry = average_ranks(ys);
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= n;
    my /= n;
    double cov = 0.0, vx = 0.0, vy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        cov += (rx[i] - mx) * (ry[i] - my);
        vx += (rx[i] - mx) * (rx[i] - mx);
        vy += (ry[i] - my) * (ry[i] - my);
    }
    if (vx == 0.0 || vy == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return cov / std::sqrt(vx * vy);
}

SweepResult relative_iso_sweep(const Dataset& ds, const std::vector<ClassifierKind>& classifiers,
                               const std::vector<double>& deltas, std::size_t folds,
                               const ExperimentConfig& cfg) {
    for (double delta : deltas) {
        if (!is_permitted_delta(delta))
            throw InvalidArgument("relative_iso_sweep: delta outside the permitted set");
    }
    const FoldPlan plan = plan_for_dataset(ds, folds, cfg);

    // The exact-isomorphic reference (delta 0) plus the requested deltas,
    // ordered by |delta| then delta.
    std::vector<double> ordered = deltas;
    ordered.push_back(0.0);
    std::sort(ordered.begin(), ordered.end(), [](double a, double b) {
        if (std::abs(a) != std::abs(b)) return std::abs(a) < std::abs(b);
        return a < b;
    });
    ordered.erase(std::unique(ordered.begin(), ordered.end()), ordered.end());

    SweepResult result;
    result.config_fingerprint = fingerprint(cfg);
    for (ClassifierKind clf : classifiers) {
        std::vector<double> abs_deltas, aucs;
        for (double delta : ordered) {
            const Augmenter augmenter = delta == 0.0
                                            ? Augmenter{AugmenterKind::iwgan, 0.0}
                                            : Augmenter{AugmenterKind::r_iwgan, delta};
            const CellResult cell = run_cell(ds, augmenter, clf, plan, cfg);
            result.rows.push_back({delta, clf, cell.mean_auc, cell.failed});
            if (!cell.failed) {
                abs_deltas.push_back(std::abs(delta));
                aucs.push_back(cell.mean_auc);
            }
        }
        result.trend.emplace_back(clf, spearman(abs_deltas, aucs));
    }
    return result;
}

} // namespace tabaug
