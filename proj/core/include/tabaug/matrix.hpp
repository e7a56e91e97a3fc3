#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tabaug {

/// Dense row-major matrix of doubles. The whole numeric stack is built on
/// this one type; rows are samples, columns are features or units.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data; // rows * cols, row-major

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
    std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

    bool is_finite() const;
    bool same_shape(const Matrix& other) const {
        return rows == other.rows && cols == other.cols;
    }
};

/// a(m,k) * b(k,n) -> (m,n)
Matrix matmul(const Matrix& a, const Matrix& b);
/// a(m,k) * b(n,k)^T -> (m,n)
Matrix matmul_bt(const Matrix& a, const Matrix& b);
/// a(k,m)^T * b(k,n) -> (m,n)
Matrix matmul_at(const Matrix& a, const Matrix& b);

/// Adds v to every row of m in place (v.size() == m.cols).
void add_row_inplace(Matrix& m, std::span<const double> v);
/// Column sums as a vector of length m.cols.
std::vector<double> col_sums(const Matrix& m);

/// Rows of `src` selected by index, in order.
Matrix take_rows(const Matrix& src, std::span<const std::size_t> indices);
/// a stacked on top of b (column counts must match).
Matrix vstack(const Matrix& a, const Matrix& b);

} // namespace tabaug
