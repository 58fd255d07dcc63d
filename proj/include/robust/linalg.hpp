#pragma once

// Small dense symmetric-matrix routines (dimension <= 16): Cholesky solves and
// Jacobi eigenvalues. Nothing here is meant as general linear algebra.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "robust/error.hpp"

namespace robust {

inline constexpr std::size_t kMaxMatrixDim = 16;

/// Row-major square matrix.
class SquareMatrix {
public:
    SquareMatrix() = default;
    explicit SquareMatrix(std::size_t n, double fill = 0.0) : n_(n), a_(n * n, fill) {
        require(n <= kMaxMatrixDim, Errc::Unsupported, "matrix dimension above 16");
    }

    std::size_t dim() const { return n_; }
    double& operator()(std::size_t r, std::size_t c) { return a_[r * n_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return a_[r * n_ + c]; }
    std::span<const double> data() const { return a_; }

    bool is_symmetric(double tol = 1e-12) const {
        for (std::size_t r = 0; r < n_; ++r)
            for (std::size_t c = r + 1; c < n_; ++c)
                if (std::abs((*this)(r, c) - (*this)(c, r)) > tol) return false;
        return true;
    }

    SquareMatrix operator-(const SquareMatrix& o) const {
        SquareMatrix out(n_);
        for (std::size_t i = 0; i < a_.size(); ++i) out.a_[i] = a_[i] - o.a_[i];
        return out;
    }

    SquareMatrix& operator+=(const SquareMatrix& o) {
        for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
        return *this;
    }

    SquareMatrix& operator*=(double s) {
        for (double& v : a_) v *= s;
        return *this;
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : a_) m = std::max(m, std::abs(v));
        return m;
    }

private:
    std::size_t n_ = 0;
    std::vector<double> a_;
};

/// Lower Cholesky factor of a symmetric positive-definite matrix, or nullopt
/// when a pivot is not positive.
inline std::optional<SquareMatrix> cholesky(const SquareMatrix& a) {
    const std::size_t n = a.dim();
    SquareMatrix l(n);
    for (std::size_t j = 0; j < n; ++j) {
        double diag = a(j, j);
        for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
        if (!(diag > 0.0)) return std::nullopt;
        l(j, j) = std::sqrt(diag);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / l(j, j);
        }
    }
    return l;
}

/// x^T A^{-1} x through a Cholesky factor L of A (forward substitution only).
inline double inverse_quadratic_form(const SquareMatrix& chol_lower, std::span<const double> x) {
    const std::size_t n = chol_lower.dim();
    std::vector<double> y(n);
    double q = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double s = x[i];
        for (std::size_t k = 0; k < i; ++k) s -= chol_lower(i, k) * y[k];
        y[i] = s / chol_lower(i, i);
        q += y[i] * y[i];
    }
    return q;
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
inline std::vector<double> symmetric_eigenvalues(SquareMatrix a, double tol = 1e-15, int max_sweeps = 100) {
    const std::size_t n = a.dim();
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off <= tol * tol) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (a(p, q) == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

inline double min_eigenvalue(const SquareMatrix& a) {
    if (a.dim() == 0) return 0.0;
    return symmetric_eigenvalues(a).front();
}

} // namespace robust
