#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "tabaug/matrix.hpp"
#include "tabaug/nn.hpp"
#include "tabaug/rng.hpp"

namespace test_helpers {

inline tabaug::Matrix random_matrix(std::size_t rows, std::size_t cols, tabaug::Rng& rng,
                                    double lo = -1.0, double hi = 1.0) {
    tabaug::Matrix m(rows, cols);
    for (double& v : m.data) v = rng.uniform(lo, hi);
    return m;
}

/// One clamped-Gaussian column, the 1-D synthetic training task.
inline tabaug::Matrix gaussian_column(std::size_t n, double mean, double sd, std::uint64_t seed) {
    tabaug::Rng rng(seed);
    tabaug::Matrix m(n, 1);
    for (double& v : m.data) v = std::clamp(rng.normal(mean, sd), 0.0, 1.0);
    return m;
}

inline double column_mean(const tabaug::Matrix& m, std::size_t col = 0) {
    double acc = 0.0;
    for (std::size_t r = 0; r < m.rows; ++r) acc += m(r, col);
    return acc / static_cast<double>(m.rows);
}

/// Two Gaussian blobs in `dim` dimensions, positives shifted by `gap`.
struct Blobs {
    tabaug::Matrix X;
    std::vector<int> y;
};

inline Blobs separable_blobs(std::size_t n_per_class, std::size_t dim, double gap,
                             std::uint64_t seed) {
    tabaug::Rng rng(seed);
    Blobs blobs;
    blobs.X = tabaug::Matrix(2 * n_per_class, dim);
    blobs.y.resize(2 * n_per_class);
    for (std::size_t i = 0; i < 2 * n_per_class; ++i) {
        const bool positive = i >= n_per_class;
        blobs.y[i] = positive ? 1 : 0;
        const double center = positive ? 0.5 + gap / 2.0 : 0.5 - gap / 2.0;
        for (std::size_t c = 0; c < dim; ++c)
            blobs.X(i, c) = std::clamp(rng.normal(center, 0.05), 0.0, 1.0);
    }
    return blobs;
}

/// Straight-line affine+activation chain, kept independent of the library's
/// forward() so it can serve as its oracle.
inline tabaug::Matrix oracle_forward(const tabaug::MlpParams& mlp, const tabaug::Matrix& batch) {
    using tabaug::Matrix;
    Matrix current = batch;
    for (std::size_t l = 0; l < mlp.weights.size(); ++l) {
        const Matrix& w = mlp.weights[l];
        Matrix next(current.rows, w.rows);
        for (std::size_t r = 0; r < current.rows; ++r) {
            for (std::size_t o = 0; o < w.rows; ++o) {
                double acc = mlp.biases[l][o];
                for (std::size_t i = 0; i < w.cols; ++i) acc += current(r, i) * w(o, i);
                next(r, o) = tabaug::apply_activation(mlp.activation_at(l), acc);
            }
        }
        current = std::move(next);
    }
    return current;
}

/// Brute-force AUC by pair counting (ties worth one half).
inline double oracle_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    double pairs = 0.0, wins = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] != 1) continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j] != 0) continue;
            pairs += 1.0;
            if (scores[i] > scores[j]) wins += 1.0;
            else if (scores[i] == scores[j]) wins += 0.5;
        }
    }
    return wins / pairs;
}

} // namespace test_helpers
