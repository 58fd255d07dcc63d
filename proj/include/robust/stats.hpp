#pragma once

// Multinomial covariances over the first d-1 outcomes, the i.i.d. ellipsoid
// acceptance test, per-outcome score intervals, and the chi-square / normal
// quantiles they need.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "robust/dgp.hpp"
#include "robust/error.hpp"
#include "robust/interval.hpp"
#include "robust/linalg.hpp"

namespace robust {

using CovMatrix = SquareMatrix;

inline constexpr double kPsdTol = 1e-10;

/// Sigma_{kl} = p_k (1[k=l] - p_l) for k, l < d-1.
inline CovMatrix multinomial_covariance(const Marginal& p) {
    const std::size_t m = p.size() - 1;
    CovMatrix s(m);
    for (std::size_t k = 0; k < m; ++k)
        for (std::size_t l = 0; l < m; ++l) s(k, l) = k == l ? p[k] * (1.0 - p[k]) : -p[k] * p[l];
    return s;
}

/// N^{-1} sum_{i<=N} Sigma_i.
inline CovMatrix average_covariance(const IndependentDgp& P, std::size_t N) {
    require(N >= 1, Errc::InvalidArgument, "average covariance needs N >= 1");
    CovMatrix acc(P.dimension() - 1);
    const std::size_t m = std::min(N, P.prefix_length());
    for (std::size_t i = 0; i < m; ++i) acc += multinomial_covariance(P.prefix()[i]);
    for (std::size_t c = 0; c < P.period(); ++c) {
        const double cnt = static_cast<double>(P.cycle_count(c, N));
        if (cnt == 0.0) continue;
        CovMatrix s = multinomial_covariance(P.cycle()[c]);
        s *= cnt;
        acc += s;
    }
    acc *= 1.0 / static_cast<double>(N);
    return acc;
}

/// Sigma-hat_N - Sigma-bar_N, Sigma-hat being the covariance of the averaged marginal.
inline CovMatrix gram_difference(const IndependentDgp& P, std::size_t N) {
    return multinomial_covariance(average_sample_marginals(P, N)) - average_covariance(P, N);
}

inline bool psd_check(const CovMatrix& m, double tol = kPsdTol) {
    require(m.is_symmetric(1e-12), Errc::InvalidArgument, "psd_check needs a symmetric matrix");
    return m.dim() == 0 || min_eigenvalue(m) >= -tol;
}

// --- special functions ---------------------------------------------------

/// Regularized upper incomplete gamma Q(a, x).
inline double regularized_gamma_q(double a, double x) {
    require(a > 0.0, Errc::InvalidArgument, "gamma shape must be positive");
    if (x <= 0.0) return 1.0;
    const double log_prefix = -x + a * std::log(x) - std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a, term = 1.0 / a, sum = term;
        for (int n = 0; n < 10000; ++n) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::abs(term) < std::abs(sum) * 1e-17) break;
        }
        return 1.0 - sum * std::exp(log_prefix);
    }
    // Lentz continued fraction.
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-17) break;
    }
    return std::exp(log_prefix) * h;
}

inline double chi_square_upper_tail(std::size_t df, double x) {
    return regularized_gamma_q(0.5 * static_cast<double>(df), 0.5 * x);
}

/// Upper-alpha quantile of chi-square(df), bisection to 1e-10 absolute.
inline double chi_square_quantile(std::size_t df, double alpha) {
    require(df >= 1, Errc::InvalidArgument, "chi-square needs df >= 1");
    require(alpha > 0.0 && alpha < 1.0, Errc::InvalidArgument, "alpha must lie in (0,1)");
    double lo = 0.0, hi = static_cast<double>(df) + 10.0;
    while (chi_square_upper_tail(df, hi) > alpha) hi *= 2.0;
    while (hi - lo > 1e-11) {
        const double mid = 0.5 * (lo + hi);
        if (chi_square_upper_tail(df, mid) > alpha) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

inline double normal_upper_tail(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

/// z with P(Z > z) = alpha, bisection to 1e-10 absolute.
inline double normal_upper_quantile(double alpha) {
    require(alpha > 0.0 && alpha < 1.0, Errc::InvalidArgument, "alpha must lie in (0,1)");
    double lo = -40.0, hi = 40.0;
    while (hi - lo > 1e-11) {
        const double mid = 0.5 * (lo + hi);
        if (normal_upper_tail(mid) > alpha) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

// --- acceptance regions --------------------------------------------------

/// x^T Sigma^{-1} x; throws SingularCovariance if Sigma is not positive definite.
inline double quadratic_statistic(std::span<const double> x, const CovMatrix& sigma) {
    auto l = cholesky(sigma);
    require(l.has_value(), Errc::SingularCovariance, "covariance matrix is not positive definite");
    return inverse_quadratic_form(*l, x);
}

/// N (phi - pbar)^T Sigma(pbar)^{-1} (phi - pbar) over the first d-1 outcomes,
/// with pbar floored at eta.
inline double acceptance_statistic(const Marginal& phi, const Marginal& pbar, std::size_t N,
                                   double eta = kDefaultFloor) {
    require(phi.size() == pbar.size(), Errc::InvalidArgument, "dimension mismatch in acceptance test");
    const Marginal q = pbar.floored(eta);
    std::vector<double> diff(q.size() - 1);
    for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = phi[k] - q[k];
    return static_cast<double>(N) * quadratic_statistic(diff, multinomial_covariance(q));
}

inline bool acceptance_test(const Marginal& phi, const Marginal& pbar, std::size_t N, double alpha,
                            double eta = kDefaultFloor) {
    return acceptance_statistic(phi, pbar, N, eta) <= chi_square_quantile(phi.size() - 1, alpha);
}

/// Same test with a precomputed critical value.
inline bool acceptance_test_q(const Marginal& phi, const Marginal& pbar, std::size_t N, double critical,
                              double eta = kDefaultFloor) {
    return acceptance_statistic(phi, pbar, N, eta) <= critical;
}

/// {p in [0,1] : N (phi - p)^2 <= c p (1 - p)} in closed form.
inline Interval score_interval(double phi1, std::size_t N, double c) {
    require(phi1 >= 0.0 && phi1 <= 1.0, Errc::InvalidArgument, "frequency outside [0,1]");
    require(N >= 1, Errc::InvalidArgument, "score interval needs N >= 1");
    const double n = static_cast<double>(N);
    const double centre = (n * phi1 + c / 2.0) / (n + c);
    const double half = std::sqrt(c) * std::sqrt(n) / (n + c) * std::sqrt(phi1 * (1.0 - phi1) + c / (4.0 * n));
    return {std::max(0.0, centre - half), std::min(1.0, centre + half), false};
}

inline Interval wilson_interval(double phi1, std::size_t N, double alpha) {
    const double z = normal_upper_quantile(alpha / 2.0);
    return score_interval(phi1, N, z * z);
}

/// Squared normal critical value for each of d-1 per-outcome intervals at
/// level 1 - alpha/(d-1).
inline double bonferroni_critical(std::size_t d, double alpha) {
    require(d >= 2, Errc::InvalidArgument, "need d >= 2");
    const double z = normal_upper_quantile(alpha / (2.0 * static_cast<double>(d - 1)));
    return z * z;
}

/// Per-outcome score tests at the Bonferroni level, outcomes 0..d-2.
inline bool bonferroni_accept_q(const Marginal& phi, const Marginal& pbar, std::size_t N, double z2,
                                double eta = kDefaultFloor) {
    const Marginal q = pbar.floored(eta);
    const double n = static_cast<double>(N);
    for (std::size_t k = 0; k + 1 < q.size(); ++k) {
        const double diff = phi[k] - q[k];
        if (n * diff * diff > z2 * q[k] * (1.0 - q[k])) return false;
    }
    return true;
}

inline bool bonferroni_accept(const Marginal& phi, const Marginal& pbar, std::size_t N, double alpha,
                              double eta = kDefaultFloor) {
    return bonferroni_accept_q(phi, pbar, N, bonferroni_critical(phi.size(), alpha), eta);
}

} // namespace robust
