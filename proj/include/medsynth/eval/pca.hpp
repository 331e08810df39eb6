#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <vector>

#include "medsynth/errors.hpp"
#include "medsynth/numeric/matrix.hpp"
#include "medsynth/records/codec.hpp"

namespace medsynth {

// ---------------------------------------------------------------------------
// PCA by power iteration with deflation. Only a couple of components are
// ever needed for the scatter plots, so this stays dependency-free; a dense
// eigen-solver oracle cross-checks it in the tests.
// ---------------------------------------------------------------------------

struct PcaModel {
    Vector mean;                     // column means, length D
    std::vector<Vector> components;  // k orthonormal rows, descending eigenvalue
    Vector eigenvalues;              // k non-negative reals
};

namespace detail {

// Sample covariance (divisor n - 1) of mean-centered columns.
inline DenseMatrix covariance(const DenseMatrix& data, const Vector& mean) {
    const std::size_t n = data.rows;
    const std::size_t dim = data.cols;
    DenseMatrix cov(dim, dim);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t i = 0; i < dim; ++i) {
            const double di = data.at(r, i) - mean[i];
            for (std::size_t j = i; j < dim; ++j)
                cov.at(i, j) += di * (data.at(r, j) - mean[j]);
        }
    }
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = i; j < dim; ++j) {
            cov.at(i, j) /= static_cast<double>(n - 1);
            cov.at(j, i) = cov.at(i, j);
        }
    return cov;
}

inline void subtract_projections(Vector& v, const std::vector<Vector>& basis) {
    for (const auto& b : basis) {
        const double d = dot(v, b);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= d * b[i];
    }
}

// First standard-basis vector with a usable residual after orthogonalizing
// against the found components; used when the data has no variance left.
inline Vector completion_vector(std::size_t dim, const std::vector<Vector>& basis) {
    for (std::size_t axis = 0; axis < dim; ++axis) {
        Vector v(dim, 0.0);
        v[axis] = 1.0;
        subtract_projections(v, basis);
        const double len = norm(v);
        if (len > 1e-6) {
            for (auto& x : v) x /= len;
            return v;
        }
    }
    throw NumericError("pca_fit: cannot complete orthonormal basis");
}

// Largest-magnitude coordinate made positive (first index wins ties).
inline void fix_sign(Vector& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (std::abs(v[i]) > std::abs(v[best])) best = i;
    if (v[best] < 0.0)
        for (auto& x : v) x = -x;
}

}  // namespace detail

inline PcaModel pca_fit(const DenseMatrix& data, std::size_t k) {
    if (data.rows < 2)
        throw ShapeError("pca_fit: need at least 2 rows, got " + std::to_string(data.rows));
    if (k < 1 || k > std::min(data.rows, data.cols))
        throw ShapeError("pca_fit: k=" + std::to_string(k) + " out of range for " +
                         std::to_string(data.rows) + "x" + std::to_string(data.cols) +
                         " data");
    constexpr double kCosTol = 1e-9;
    constexpr std::size_t kMaxIters = 10000;
    const std::size_t dim = data.cols;

    PcaModel model;
    model.mean.assign(dim, 0.0);
    for (std::size_t r = 0; r < data.rows; ++r)
        for (std::size_t c = 0; c < dim; ++c) model.mean[c] += data.at(r, c);
    for (auto& m : model.mean) m /= static_cast<double>(data.rows);

    const DenseMatrix cov = detail::covariance(data, model.mean);

    for (std::size_t comp = 0; comp < k; ++comp) {
        Vector v(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
        detail::subtract_projections(v, model.components);
        double len = norm(v);
        if (len < 1e-12) {
            v = detail::completion_vector(dim, model.components);
        } else {
            for (auto& x : v) x /= len;
        }

        bool converged = false;
        double eigenvalue = 0.0;
        for (std::size_t iter = 0; iter < kMaxIters; ++iter) {
            Vector w = matvec(cov, v);
            detail::subtract_projections(w, model.components);
            const double wlen = norm(w);
            if (wlen < 1e-12) {
                // No variance along any remaining direction.
                v = detail::completion_vector(dim, model.components);
                eigenvalue = 0.0;
                converged = true;
                break;
            }
            for (auto& x : w) x /= wlen;
            const double cosine = dot(w, v);
            v = std::move(w);
            if (1.0 - cosine < kCosTol) {
                eigenvalue = dot(v, matvec(cov, v));
                converged = true;
                break;
            }
        }
        if (!converged)
            throw NumericError("pca_fit: power iteration did not converge for component " +
                               std::to_string(comp));
        detail::fix_sign(v);
        model.components.push_back(std::move(v));
        model.eigenvalues.push_back(std::max(eigenvalue, 0.0));
    }
    return model;
}

inline DenseMatrix pca_project(const PcaModel& model, const DenseMatrix& data) {
    if (data.cols != model.mean.size())
        throw ShapeError("pca_project: data has " + std::to_string(data.cols) +
                         " columns but model expects " + std::to_string(model.mean.size()));
    DenseMatrix out(data.rows, model.components.size());
    for (std::size_t r = 0; r < data.rows; ++r)
        for (std::size_t c = 0; c < model.components.size(); ++c) {
            double acc = 0.0;
            for (std::size_t i = 0; i < data.cols; ++i)
                acc += (data.at(r, i) - model.mean[i]) * model.components[c][i];
            out.at(r, c) = acc;
        }
    return out;
}

// ---------------------------------------------------------------------------
// Real-vs-synthetic scatter: PCA (k=2) fit on the pooled clouds.
// ---------------------------------------------------------------------------

enum class PointSource { Real, Synthetic };

inline std::string to_string(PointSource s) {
    return s == PointSource::Real ? "real" : "synthetic";
}

struct ScatterPoint {
    double pc1 = 0.0;
    double pc2 = 0.0;
    PointSource source = PointSource::Real;
};

struct ScatterDataset {
    std::vector<ScatterPoint> points;
    double explained_variance_ratio[2] = {0.0, 0.0};
};

inline DenseMatrix feature_matrix(const std::vector<FeatureVector>& features) {
    if (features.empty()) throw ShapeError("feature_matrix: empty feature list");
    DenseMatrix m(features.size(), features.front().values.size());
    for (std::size_t r = 0; r < features.size(); ++r) {
        if (features[r].values.size() != m.cols)
            throw ShapeError("feature_matrix: row " + std::to_string(r) + " has length " +
                             std::to_string(features[r].values.size()) + ", expected " +
                             std::to_string(m.cols));
        for (std::size_t c = 0; c < m.cols; ++c) m.at(r, c) = features[r].values[c];
    }
    return m;
}

inline ScatterDataset pca_scatter(const std::vector<FeatureVector>& real,
                                  const std::vector<FeatureVector>& synthetic) {
    if (real.empty() || synthetic.empty())
        throw FormatError("pca_scatter: both real and synthetic sets must be nonempty");
    std::vector<FeatureVector> pooled = real;
    pooled.insert(pooled.end(), synthetic.begin(), synthetic.end());
    const DenseMatrix data = feature_matrix(pooled);
    const PcaModel model = pca_fit(data, 2);
    const DenseMatrix projected = pca_project(model, data);

    ScatterDataset out;
    out.points.reserve(pooled.size());
    for (std::size_t r = 0; r < projected.rows; ++r)
        out.points.push_back(ScatterPoint{projected.at(r, 0), projected.at(r, 1),
                                          r < real.size() ? PointSource::Real
                                                          : PointSource::Synthetic});

    double total_variance = 0.0;
    const Vector mean = model.mean;
    for (std::size_t c = 0; c < data.cols; ++c) {
        double acc = 0.0;
        for (std::size_t r = 0; r < data.rows; ++r) {
            const double d = data.at(r, c) - mean[c];
            acc += d * d;
        }
        total_variance += acc / static_cast<double>(data.rows - 1);
    }
    if (total_variance > 0.0) {
        out.explained_variance_ratio[0] = model.eigenvalues[0] / total_variance;
        out.explained_variance_ratio[1] = model.eigenvalues[1] / total_variance;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Scatter CSV: shortest round-trip doubles, so equal datasets serialize
// byte-identically.
// ---------------------------------------------------------------------------

inline constexpr const char* kScatterCsvHeader = "pc1,pc2,source";

namespace detail {

inline std::string shortest_double(double value) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

}  // namespace detail

inline std::string write_scatter_csv(const ScatterDataset& dataset) {
    std::string out = kScatterCsvHeader;
    out += '\n';
    for (const auto& p : dataset.points) {
        out += detail::shortest_double(p.pc1);
        out += ',';
        out += detail::shortest_double(p.pc2);
        out += ',';
        out += to_string(p.source);
        out += '\n';
    }
    return out;
}

}  // namespace medsynth
