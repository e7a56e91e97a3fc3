#pragma once

#include <cstdint>

#include "tabaug/matrix.hpp"

namespace tabaug {

struct SmoteParams {
    std::size_t k = 5;
    std::uint64_t seed = 0;
};

/// Synthetic minority rows by linear interpolation: each output row is
/// p + lambda * (q - p) with p a minority row, q one of p's k nearest minority
/// neighbours (Euclidean, distance ties broken by lower row index) and lambda
/// uniform on [0,1]. Base points cycle through the minority rows in index
/// order so the requested count is hit exactly.
Matrix smote(const Matrix& minority, std::size_t n_needed, const SmoteParams& params);

} // namespace tabaug
