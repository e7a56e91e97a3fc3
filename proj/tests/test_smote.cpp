#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "tabaug/errors.hpp"
#include "tabaug/smote.hpp"

using namespace tabaug;

namespace {

// Independent reconstruction: s must lie on a segment between some minority
// row p and one of p's k nearest neighbours (brute-force neighbour search).
bool on_some_segment(const Matrix& minority, std::span<const double> s, std::size_t k,
                     double tolerance = 1e-9) {
    for (std::size_t p = 0; p < minority.rows; ++p) {
        std::vector<std::pair<double, std::size_t>> dist;
        for (std::size_t j = 0; j < minority.rows; ++j) {
            if (j == p) continue;
            double d2 = 0.0;
            for (std::size_t c = 0; c < minority.cols; ++c) {
                const double diff = minority(p, c) - minority(j, c);
                d2 += diff * diff;
            }
            dist.emplace_back(d2, j);
        }
        std::sort(dist.begin(), dist.end());
        for (std::size_t nb = 0; nb < k; ++nb) {
            const std::size_t q = dist[nb].second;
            double num = 0.0, den = 0.0;
            for (std::size_t c = 0; c < minority.cols; ++c) {
                const double seg = minority(q, c) - minority(p, c);
                num += (s[c] - minority(p, c)) * seg;
                den += seg * seg;
            }
            const double lambda = den > 0.0 ? num / den : 0.0;
            if (lambda < -tolerance || lambda > 1.0 + tolerance) continue;
            double residual = 0.0;
            for (std::size_t c = 0; c < minority.cols; ++c) {
                const double expect = minority(p, c) + lambda * (minority(q, c) - minority(p, c));
                residual = std::max(residual, std::abs(s[c] - expect));
            }
            if (residual < tolerance) return true;
        }
    }
    return false;
}

} // namespace

TEST_CASE("smote: two identical rows collapse every synthetic row onto them") {
    Matrix minority(2, 3);
    minority.row(0)[0] = 0.2; minority.row(0)[1] = 0.5; minority.row(0)[2] = 0.9;
    for (std::size_t c = 0; c < 3; ++c) minority(1, c) = minority(0, c);

    const Matrix out = smote(minority, 7, {1, 99});
    REQUIRE(out.rows == 7);
    for (std::size_t r = 0; r < out.rows; ++r)
        for (std::size_t c = 0; c < 3; ++c) CHECK(out(r, c) == doctest::Approx(minority(0, c)));
}

TEST_CASE("smote: segment between (0,0) and (1,1) yields diagonal points") {
    Matrix minority(2, 2);
    minority(1, 0) = 1.0;
    minority(1, 1) = 1.0;
    const Matrix out = smote(minority, 5, {1, 7});
    REQUIRE(out.rows == 5);
    for (std::size_t r = 0; r < out.rows; ++r) {
        CHECK(out(r, 0) == doctest::Approx(out(r, 1)).epsilon(1e-12)); // on the diagonal
        CHECK(out(r, 0) >= 0.0);
        CHECK(out(r, 0) <= 1.0);
    }
}

TEST_CASE("smote: zero rows requested gives an empty matrix") {
    Matrix minority(3, 2);
    minority(1, 0) = 0.5;
    minority(2, 1) = 1.0;
    const Matrix out = smote(minority, 0, {2, 1});
    CHECK(out.rows == 0);
    CHECK(out.cols == 2);
}

TEST_CASE("smote: rejected inputs") {
    Matrix one_row(1, 2);
    CHECK_THROWS_AS(smote(one_row, 3, {1, 0}), InvalidArgument);
    Matrix three_rows(3, 2);
    CHECK_THROWS_AS(smote(three_rows, 3, {3, 0}), InvalidArgument); // k > rows-1
    CHECK_THROWS_AS(smote(three_rows, 3, {0, 0}), InvalidArgument);
}

TEST_CASE("smote: synthetic rows sit on minority segments and inside the bounding box") {
    Rng rng(42);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t rows = 2 + rng.below(20);
        const std::size_t cols = 1 + rng.below(6);
        const std::size_t k = 1 + rng.below(rows - 1);
        Matrix minority = test_helpers::random_matrix(rows, cols, rng, 0.0, 1.0);
        const std::size_t n = rng.below(40);

        const Matrix out = smote(minority, n, {k, rng.next_u64()});
        REQUIRE(out.rows == n);

        std::vector<double> lo(cols, 1e18), hi(cols, -1e18);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c) {
                lo[c] = std::min(lo[c], minority(r, c));
                hi[c] = std::max(hi[c], minority(r, c));
            }

        for (std::size_t r = 0; r < out.rows; ++r) {
            CHECK(on_some_segment(minority, out.row(r), k));
            for (std::size_t c = 0; c < cols; ++c) {
                CHECK(out(r, c) >= lo[c] - 1e-12);
                CHECK(out(r, c) <= hi[c] + 1e-12);
            }
        }
    }
}

TEST_CASE("smote: same seed, same output") {
    Rng rng(5);
    const Matrix minority = test_helpers::random_matrix(12, 4, rng, 0.0, 1.0);
    const Matrix a = smote(minority, 25, {5, 1234});
    const Matrix b = smote(minority, 25, {5, 1234});
    CHECK(a.data == b.data);
    const Matrix c = smote(minority, 25, {5, 1235});
    CHECK(a.data != c.data);
}
