#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "medsynth/errors.hpp"

namespace medsynth {

using Vector = std::vector<double>;

// Row-major dense matrix of doubles.
struct DenseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> entries;

    DenseMatrix() = default;
    DenseMatrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), entries(r * c, fill) {}

    double& at(std::size_t r, std::size_t c) { return entries[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return entries[r * cols + c]; }

    Vector row(std::size_t r) const {
        return Vector(entries.begin() + static_cast<std::ptrdiff_t>(r * cols),
                      entries.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols));
    }
};

inline bool all_finite(const Vector& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

inline bool all_finite(const DenseMatrix& m) { return all_finite(m.entries); }

// y = M x
inline Vector matvec(const DenseMatrix& m, const Vector& x) {
    if (x.size() != m.cols)
        throw ShapeError("matvec: matrix is " + std::to_string(m.rows) + "x" +
                         std::to_string(m.cols) + " but vector has length " +
                         std::to_string(x.size()));
    Vector y(m.rows, 0.0);
    for (std::size_t r = 0; r < m.rows; ++r) {
        double sum = 0.0;
        const double* row = m.entries.data() + r * m.cols;
        for (std::size_t c = 0; c < m.cols; ++c) sum += row[c] * x[c];
        y[r] = sum;
    }
    return y;
}

// y = M^T x
inline Vector matvec_transposed(const DenseMatrix& m, const Vector& x) {
    if (x.size() != m.rows)
        throw ShapeError("matvec_transposed: matrix is " + std::to_string(m.rows) +
                         "x" + std::to_string(m.cols) + " but vector has length " +
                         std::to_string(x.size()));
    Vector y(m.cols, 0.0);
    for (std::size_t r = 0; r < m.rows; ++r) {
        const double xr = x[r];
        const double* row = m.entries.data() + r * m.cols;
        for (std::size_t c = 0; c < m.cols; ++c) y[c] += row[c] * xr;
    }
    return y;
}

// M += u v^T
inline void add_outer(DenseMatrix& m, const Vector& u, const Vector& v) {
    if (u.size() != m.rows || v.size() != m.cols)
        throw ShapeError("add_outer: matrix is " + std::to_string(m.rows) + "x" +
                         std::to_string(m.cols) + " but vectors have lengths " +
                         std::to_string(u.size()) + " and " + std::to_string(v.size()));
    for (std::size_t r = 0; r < m.rows; ++r) {
        const double ur = u[r];
        double* row = m.entries.data() + r * m.cols;
        for (std::size_t c = 0; c < m.cols; ++c) row[c] += ur * v[c];
    }
}

inline double dot(const Vector& a, const Vector& b) {
    if (a.size() != b.size())
        throw ShapeError("dot: vectors have lengths " + std::to_string(a.size()) +
                         " and " + std::to_string(b.size()));
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
    return sum;
}

inline double norm(const Vector& v) { return std::sqrt(dot(v, v)); }

}  // namespace medsynth
