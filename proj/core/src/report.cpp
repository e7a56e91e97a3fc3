#include "tabaug/report.hpp"

#include <algorithm>
#include <cstdio>

namespace tabaug {

std::string format6(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

void write_grid_csv(std::ostream& os, const ExperimentGrid& grid) {
    os << "# fingerprint: " << grid.config_fingerprint << "\n";
    os << "dataset,augmenter,classifier,fold,auc\n";
    for (const auto& cell : grid.cells) {
        if (cell.failed) continue;
        for (std::size_t f = 0; f < cell.fold_aucs.size(); ++f) {
            os << cell.dataset << ',' << cell.augmenter << ',' << to_string(cell.classifier)
               << ',' << f << ',' << format6(cell.fold_aucs[f]) << "\n";
        }
    }
    for (const auto& cell : grid.cells) {
        if (cell.failed)
            os << "# failed: " << cell.dataset << ',' << cell.augmenter << ','
               << to_string(cell.classifier) << " — " << cell.diagnostic << "\n";
    }
}

void write_summary_csv(std::ostream& os, const ExperimentGrid& grid, const GridSummary& summary) {
    os << "# fingerprint: " << grid.config_fingerprint << "\n";
    os << "# improved = best of {iwgan,mwgan,swgan} mean AUC beats wgan's;"
          " best = iwgan mean AUC strictly beats every other augmentation method\n";
    os << "# groups with any failed cell are excluded from all counts\n";
    os << "metric,count,total\n";
    os << "groups_evaluated," << summary.groups_evaluated << ',' << summary.groups_total << "\n";
    os << "constrained_improved_over_wgan," << summary.improved_over_wgan << ','
       << summary.groups_evaluated << "\n";
    os << "iwgan_best_overall," << summary.iwgan_best << ',' << summary.groups_evaluated << "\n";
    os << "iwgan_wins_vs_wgan," << summary.iwgan_wins_vs_wgan << ',' << summary.groups_evaluated
       << "\n";
    os << "mwgan_wins_vs_wgan," << summary.mwgan_wins_vs_wgan << ',' << summary.groups_evaluated
       << "\n";
    os << "swgan_wins_vs_wgan," << summary.swgan_wins_vs_wgan << ',' << summary.groups_evaluated
       << "\n";
    for (const auto& group : summary.excluded_groups)
        os << "# excluded group: " << group << "\n";
}

void write_convergence_csv(std::ostream& os, const LossTrace& wgan_trace,
                           const LossTrace& iwgan_trace, const std::string& fingerprint) {
    os << "# fingerprint: " << fingerprint << "\n";
    const double ratio = initial_loss_ratio(wgan_trace, iwgan_trace);
    os << "# initial_gen_loss_ratio_iwgan_over_wgan: " << format6(ratio) << "\n";
    os << "iter,wgan_gen_loss,iwgan_gen_loss\n";
    const std::size_t n = std::max(wgan_trace.points.size(), iwgan_trace.points.size());
    for (std::size_t i = 0; i < n; ++i) {
        os << i << ',';
        if (i < wgan_trace.points.size()) os << format6(wgan_trace.points[i].gen_loss);
        os << ',';
        if (i < iwgan_trace.points.size()) os << format6(iwgan_trace.points[i].gen_loss);
        os << "\n";
    }
}

void write_sweep_csv(std::ostream& os, const SweepResult& sweep) {
    os << "# fingerprint: " << sweep.config_fingerprint << "\n";
    os << "# delta 0.00 is the exact-isomorphic reference\n";
    os << "delta,classifier,mean_auc\n";
    char delta_buf[16];
    for (const auto& row : sweep.rows) {
        if (row.failed) {
            os << "# failed: delta " << format6(row.delta) << " under "
               << to_string(row.classifier) << "\n";
            continue;
        }
        std::snprintf(delta_buf, sizeof(delta_buf), "%+.2f", row.delta);
        os << delta_buf << ',' << to_string(row.classifier) << ',' << format6(row.mean_auc)
           << "\n";
    }
    for (const auto& [clf, rho] : sweep.trend)
        os << "# trend " << to_string(clf) << ": spearman(|delta|, auc) = " << format6(rho)
           << "\n";
}

} // namespace tabaug
