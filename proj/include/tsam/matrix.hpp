#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "tsam/errors.hpp"

namespace tsam {

/// Dense row-major matrix of 64-bit floats. All pipeline quantities
/// (vectors included, as 1xN or Nx1) live in this type.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;  // rows*cols, row-major

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
    Matrix(std::size_t r, std::size_t c, std::vector<double> d)
        : rows(r), cols(c), data(std::move(d)) {
        if (data.size() != rows * cols)
            throw DimensionError("Matrix: data length != rows*cols");
    }
    Matrix(std::initializer_list<std::initializer_list<double>> init) {
        rows = init.size();
        cols = rows ? init.begin()->size() : 0;
        data.reserve(rows * cols);
        for (const auto& row : init) {
            if (row.size() != cols) throw DimensionError("Matrix: ragged initializer");
            data.insert(data.end(), row.begin(), row.end());
        }
    }

    static Matrix zeros(std::size_t r, std::size_t c) { return Matrix(r, c); }
    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
        return m;
    }
    static Matrix filled(std::size_t r, std::size_t c, double v) {
        Matrix m(r, c);
        for (auto& x : m.data) x = v;
        return m;
    }
    static Matrix row_vector(std::vector<double> v) {
        const std::size_t n = v.size();
        return Matrix(1, n, std::move(v));
    }

    double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    std::span<const double> row(std::size_t i) const {
        return std::span<const double>(data.data() + i * cols, cols);
    }
    std::span<double> row(std::size_t i) {
        return std::span<double>(data.data() + i * cols, cols);
    }

    std::size_t size() const { return data.size(); }
    bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }

    bool all_finite() const {
        for (double v : data)
            if (!std::isfinite(v)) return false;
        return true;
    }

    bool operator==(const Matrix& o) const {
        return rows == o.rows && cols == o.cols && data == o.data;
    }
};

/// Correctly rounded floating-point summation (Shewchuk partials, as in
/// Python's math.fsum). The result is the exact sum rounded once, so it is
/// invariant under permutation of the inputs. Frame-indexed reductions use
/// this to make pooled embeddings and transport objectives bit-exactly
/// order-invariant where the contract demands it.
class ExactSum {
  public:
    void add(double x) {
        std::size_t i = 0;
        for (std::size_t j = 0; j < partials_.size(); ++j) {
            double y = partials_[j];
            if (std::fabs(x) < std::fabs(y)) std::swap(x, y);
            const double hi = x + y;
            const double lo = y - (hi - x);
            if (lo != 0.0) partials_[i++] = lo;
            x = hi;
        }
        partials_.resize(i);
        partials_.push_back(x);
    }

    double value() const {
        // Partials are nonoverlapping, increasing in magnitude. Summing from
        // the largest down with a single round-off correction yields the
        // correctly rounded total (CPython's fsum finalization).
        double hi = 0.0;
        std::size_t n = partials_.size();
        if (n > 0) {
            double lo = 0.0;
            std::size_t i = n - 1;
            hi = partials_[i];
            while (i > 0) {
                const double x = hi;
                const double y = partials_[--i];
                hi = x + y;
                const double yr = hi - x;
                lo = y - yr;
                if (lo != 0.0) break;
            }
            if (i > 0 && ((lo < 0.0 && partials_[i - 1] < 0.0) ||
                          (lo > 0.0 && partials_[i - 1] > 0.0))) {
                const double y2 = lo * 2.0;
                const double x2 = hi + y2;
                if (y2 == x2 - hi) hi = x2;
            }
        }
        return hi;
    }

    void reset() { partials_.clear(); }

  private:
    std::vector<double> partials_;
};

inline double exact_sum(std::span<const double> xs) {
    ExactSum s;
    for (double x : xs) s.add(x);
    return s.value();
}

inline double exact_mean(std::span<const double> xs) {
    if (xs.empty()) throw DimensionError("exact_mean: empty input");
    return exact_sum(xs) / static_cast<double>(xs.size());
}

// ---------------------------------------------------------------------------
// Forward kernels. Pure functions; the autograd tape reuses them so the
// differentiated path and the plain path share one implementation.
// ---------------------------------------------------------------------------

inline Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows)
        throw DimensionError("matmul: inner dimensions disagree");
    Matrix c(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* arow = a.data.data() + i * a.cols;
        double* crow = c.data.data() + i * c.cols;
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double aik = arow[k];
            if (aik == 0.0) continue;
            const double* brow = b.data.data() + k * b.cols;
            for (std::size_t j = 0; j < b.cols; ++j) crow[j] += aik * brow[j];
        }
    }
    return c;
}

inline Matrix transpose(const Matrix& a) {
    Matrix t(a.cols, a.rows);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < a.cols; ++j) t.at(j, i) = a.at(i, j);
    return t;
}

inline Matrix add(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) throw DimensionError("add: shape mismatch");
    Matrix c = a;
    for (std::size_t i = 0; i < c.size(); ++i) c.data[i] += b.data[i];
    return c;
}

inline Matrix sub(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) throw DimensionError("sub: shape mismatch");
    Matrix c = a;
    for (std::size_t i = 0; i < c.size(); ++i) c.data[i] -= b.data[i];
    return c;
}

inline Matrix scale(const Matrix& a, double s) {
    Matrix c = a;
    for (auto& v : c.data) v *= s;
    return c;
}

/// Stable softmax with temperature: softmax(x / temperature). Max-subtracted;
/// the normalizer is an exact sum so the result is invariant to input order
/// up to the element permutation itself.
inline std::vector<double> softmax(std::span<const double> x, double temperature = 1.0) {
    if (x.empty()) throw DimensionError("softmax: empty input");
    if (!(temperature > 0.0)) throw ArgumentError("softmax: temperature must be > 0");
    double m = x[0] / temperature;
    for (double v : x) m = std::max(m, v / temperature);
    std::vector<double> e(x.size());
    ExactSum denom;
    for (std::size_t i = 0; i < x.size(); ++i) {
        e[i] = std::exp(x[i] / temperature - m);
        denom.add(e[i]);
    }
    const double z = denom.value();
    for (auto& v : e) v /= z;
    return e;
}

inline Matrix softmax_rows(const Matrix& a, double temperature = 1.0) {
    Matrix out(a.rows, a.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        auto p = softmax(a.row(i), temperature);
        for (std::size_t j = 0; j < a.cols; ++j) out.at(i, j) = p[j];
    }
    return out;
}

/// Single-head scaled dot-product attention:
/// softmax(query . keys^T / sqrt(dim)) . values, row-wise over queries.
inline Matrix attention(const Matrix& query, const Matrix& keys, const Matrix& values) {
    if (query.cols != keys.cols)
        throw DimensionError("attention: query/key width mismatch");
    if (keys.rows != values.rows)
        throw DimensionError("attention: key/value count mismatch");
    const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(query.cols));
    Matrix scores = matmul(query, transpose(keys));
    for (auto& v : scores.data) v *= inv_sqrt_d;
    Matrix weights = softmax_rows(scores);
    return matmul(weights, values);
}

/// Per-row layer normalization with affine gain/bias (population variance).
inline Matrix layer_norm(const Matrix& x, const Matrix& gain, const Matrix& bias,
                         double eps = 1e-5) {
    if (gain.size() != x.cols || bias.size() != x.cols)
        throw DimensionError("layer_norm: gain/bias length != cols");
    if (!(eps > 0.0)) throw ArgumentError("layer_norm: eps must be > 0");
    Matrix out(x.rows, x.cols);
    const double n = static_cast<double>(x.cols);
    for (std::size_t i = 0; i < x.rows; ++i) {
        double mean = 0.0;
        for (std::size_t j = 0; j < x.cols; ++j) mean += x.at(i, j);
        mean /= n;
        double var = 0.0;
        for (std::size_t j = 0; j < x.cols; ++j) {
            const double d = x.at(i, j) - mean;
            var += d * d;
        }
        var /= n;
        const double inv_std = 1.0 / std::sqrt(var + eps);
        for (std::size_t j = 0; j < x.cols; ++j)
            out.at(i, j) = (x.at(i, j) - mean) * inv_std * gain.data[j] + bias.data[j];
    }
    return out;
}

inline double gelu_scalar(double x) {
    // Exact GELU: x * Phi(x).
    return 0.5 * x * (1.0 + std::erf(x / std::sqrt(2.0)));
}

inline Matrix gelu(const Matrix& a) {
    Matrix c = a;
    for (auto& v : c.data) v = gelu_scalar(v);
    return c;
}

/// Column means computed with exact summation: the result is bit-exactly
/// invariant under any permutation of the rows.
inline Matrix mean_rows(const Matrix& a) {
    if (a.rows == 0) throw DimensionError("mean_rows: empty matrix");
    Matrix out(1, a.cols);
    for (std::size_t j = 0; j < a.cols; ++j) {
        ExactSum s;
        for (std::size_t i = 0; i < a.rows; ++i) s.add(a.at(i, j));
        out.at(0, j) = s.value() / static_cast<double>(a.rows);
    }
    return out;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DimensionError("dot: length mismatch");
    ExactSum s;
    for (std::size_t i = 0; i < a.size(); ++i) s.add(a[i] * b[i]);
    return s.value();
}

inline double l2_norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double euclidean(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DimensionError("euclidean: length mismatch");
    ExactSum s;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s.add(d * d);
    }
    return std::sqrt(s.value());
}

/// log(sum_j exp(x_j)) with max subtraction and exact inner sum, so the value
/// is invariant under permutation of the inputs.
inline double log_sum_exp(std::span<const double> x) {
    if (x.empty()) throw DimensionError("log_sum_exp: empty input");
    double m = x[0];
    for (double v : x) m = std::max(m, v);
    if (!std::isfinite(m)) return m;  // all -inf stays -inf
    ExactSum s;
    for (double v : x) s.add(std::exp(v - m));
    return m + std::log(s.value());
}

}  // namespace tsam
