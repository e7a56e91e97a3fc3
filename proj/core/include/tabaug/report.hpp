#pragma once

#include <ostream>
#include <string>

#include "tabaug/eval.hpp"

namespace tabaug {

/// Fixed 6-decimal float formatting shared by every CSV artifact.
std::string format6(double v);

/// grid.csv: one row per (dataset, augmenter, classifier, fold); failed cells
/// contribute footnote comments instead of rows.
void write_grid_csv(std::ostream& os, const ExperimentGrid& grid);

/// summary.csv: win/loss counts over (dataset, classifier) groups, with the
/// comparison rules spelled out in header comments.
void write_summary_csv(std::ostream& os, const ExperimentGrid& grid, const GridSummary& summary);

/// convergence_<dataset>.csv: iter,wgan_gen_loss,iwgan_gen_loss aligned by
/// iteration; a truncated (diverged) trace leaves blanks. The measured
/// iteration-0 ratio goes into a header comment.
void write_convergence_csv(std::ostream& os, const LossTrace& wgan_trace,
                           const LossTrace& iwgan_trace, const std::string& fingerprint);

/// sweep.csv: delta,classifier,mean_auc rows plus per-classifier trend
/// comments (Spearman of |delta| vs AUC).
void write_sweep_csv(std::ostream& os, const SweepResult& sweep);

} // namespace tabaug
