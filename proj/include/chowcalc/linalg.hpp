#pragma once

#include <optional>
#include <vector>

#include "chowcalc/errors.hpp"
#include "chowcalc/rational.hpp"

namespace chowcalc {
namespace linalg {

using gring::Rational;
using Vector = std::vector<Rational>;
using Matrix = std::vector<Vector>; // row-major

inline Matrix zero_matrix(std::size_t rows, std::size_t cols) {
    return Matrix(rows, Vector(cols, Rational(0)));
}

inline Matrix identity_matrix(std::size_t n) {
    Matrix m = zero_matrix(n, n);
    for (std::size_t i = 0; i < n; ++i)
        m[i][i] = Rational(1);
    return m;
}

inline std::size_t rows(const Matrix& m) { return m.size(); }
inline std::size_t cols(const Matrix& m) { return m.empty() ? 0 : m.front().size(); }

inline void check_rect(const Matrix& m) {
    for (const auto& r : m)
        if (r.size() != cols(m))
            throw input_error("matrix rows have inconsistent lengths");
}

inline Vector mat_vec(const Matrix& m, const Vector& v) {
    if (cols(m) != v.size())
        throw input_error("matrix-vector dimension mismatch");
    Vector out(rows(m), Rational(0));
    for (std::size_t i = 0; i < rows(m); ++i)
        for (std::size_t j = 0; j < v.size(); ++j)
            out[i] += m[i][j] * v[j];
    return out;
}

inline Matrix mat_mul(const Matrix& a, const Matrix& b) {
    if (cols(a) != rows(b))
        throw input_error("matrix-matrix dimension mismatch");
    Matrix out = zero_matrix(rows(a), cols(b));
    for (std::size_t i = 0; i < rows(a); ++i)
        for (std::size_t k = 0; k < cols(a); ++k) {
            if (a[i][k] == 0)
                continue;
            for (std::size_t j = 0; j < cols(b); ++j)
                out[i][j] += a[i][k] * b[k][j];
        }
    return out;
}

inline bool is_zero(const Matrix& m) {
    for (const auto& r : m)
        for (const auto& x : r)
            if (x != 0)
                return false;
    return true;
}

// Side-by-side concatenation [a | b].
inline Matrix hconcat(const Matrix& a, const Matrix& b) {
    if (rows(a) != rows(b))
        throw input_error("hconcat: row count mismatch");
    Matrix out = a;
    for (std::size_t i = 0; i < rows(a); ++i)
        out[i].insert(out[i].end(), b[i].begin(), b[i].end());
    return out;
}

namespace detail {
// Row echelon with deterministic pivoting: first nonzero entry scanning
// columns left to right, rows top down. Returns pivot columns.
inline std::vector<std::size_t> echelonize(Matrix& m) {
    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    for (std::size_t col = 0; col < cols(m) && row < rows(m); ++col) {
        std::size_t pivot_row = row;
        while (pivot_row < rows(m) && m[pivot_row][col] == 0)
            ++pivot_row;
        if (pivot_row == rows(m))
            continue;
        std::swap(m[row], m[pivot_row]);
        const Rational inv = Rational(1) / m[row][col];
        for (auto& x : m[row])
            x *= inv;
        for (std::size_t r = 0; r < rows(m); ++r) {
            if (r == row || m[r][col] == 0)
                continue;
            const Rational factor = m[r][col];
            for (std::size_t c = 0; c < cols(m); ++c)
                m[r][c] -= factor * m[row][c];
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}
} // namespace detail

inline std::size_t rank(Matrix m) {
    check_rect(m);
    return detail::echelonize(m).size();
}

// Particular solution of A x = b with free variables set to zero;
// nullopt when inconsistent. Deterministic for fixed input.
inline std::optional<Vector> solve(const Matrix& a, const Vector& b) {
    if (rows(a) != b.size())
        throw input_error("solve: dimension mismatch");
    Matrix aug = a;
    for (std::size_t i = 0; i < rows(a); ++i)
        aug[i].push_back(b[i]);
    const auto pivots = detail::echelonize(aug);
    const std::size_t n = cols(a);
    Vector x(n, Rational(0));
    for (std::size_t i = 0; i < pivots.size(); ++i) {
        if (pivots[i] == n) // pivot in the augmented column: inconsistent
            return std::nullopt;
        x[pivots[i]] = aug[i][n];
    }
    // rows below the pivots must be zero in the augmented column
    for (std::size_t i = pivots.size(); i < rows(aug); ++i)
        if (aug[i][n] != 0)
            return std::nullopt;
    return x;
}

} // namespace linalg
} // namespace chowcalc
