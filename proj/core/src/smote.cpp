#include "tabaug/smote.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tabaug/errors.hpp"
#include "tabaug/rng.hpp"

namespace tabaug {

namespace {

// Indices of row's k nearest neighbours among all rows (row itself excluded),
// ordered by (distance, index).
std::vector<std::size_t> nearest_neighbours(const Matrix& m, std::size_t row, std::size_t k) {
    std::vector<std::pair<double, std::size_t>> dist;
    dist.reserve(m.rows - 1);
    const auto a = m.row(row);
    for (std::size_t j = 0; j < m.rows; ++j) {
        if (j == row) continue;
        const auto b = m.row(j);
        double d2 = 0.0;
        for (std::size_t c = 0; c < m.cols; ++c) {
            const double diff = a[c] - b[c];
            d2 += diff * diff;
        }
        dist.emplace_back(d2, j);
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
    std::vector<std::size_t> out(k);
    for (std::size_t i = 0; i < k; ++i) out[i] = dist[i].second;
    return out;
}

} // namespace

Matrix smote(const Matrix& minority, std::size_t n_needed, const SmoteParams& params) {
    if (minority.rows < 2)
        throw InvalidArgument("smote: need at least 2 minority rows");
    if (params.k < 1 || params.k > minority.rows - 1)
        throw InvalidArgument("smote: k must be in [1, minority rows - 1]");

    Matrix out(n_needed, minority.cols);
    if (n_needed == 0) return out;

    std::vector<std::vector<std::size_t>> neighbours(minority.rows);
    Rng rng(params.seed);
    for (std::size_t i = 0; i < n_needed; ++i) {
        const std::size_t base = i % minority.rows;
        if (neighbours[base].empty())
            neighbours[base] = nearest_neighbours(minority, base, params.k);
        const std::size_t q = neighbours[base][rng.below(params.k)];
        const double lambda = rng.uniform01();
        const auto p_row = minority.row(base);
        const auto q_row = minority.row(q);
        auto o_row = out.row(i);
        for (std::size_t c = 0; c < minority.cols; ++c)
            o_row[c] = p_row[c] + lambda * (q_row[c] - p_row[c]);
    }
    return out;
}

} // namespace tabaug
