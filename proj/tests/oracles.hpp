#pragma once

// Test-side reference computations, written independently of the library
// (plain loops, quadrature and bisection instead of closed forms).

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

/// Composite Simpson rule on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

/// Chi-square CDF by quadrature after t = u^2 (removes the df = 1 pole).
inline double chi2_cdf(double df, double x) {
    if (x <= 0.0) return 0.0;
    const double norm = std::pow(2.0, df / 2.0) * std::tgamma(df / 2.0);
    auto g = [&](double u) { return 2.0 * std::pow(u, df - 1.0) * std::exp(-u * u / 2.0) / norm; };
    return simpson(g, 0.0, std::sqrt(x));
}

/// Upper-alpha chi-square quantile by bisection on the quadrature CDF.
inline double chi2_quantile(double df, double alpha) {
    double lo = 0.0, hi = 200.0;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (1.0 - chi2_cdf(df, mid) > alpha ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Standard normal CDF by quadrature from 0.
inline double normal_cdf(double z) {
    auto phi = [](double t) { return std::exp(-t * t / 2.0) / std::sqrt(2.0 * std::numbers::pi); };
    return 0.5 + (z >= 0 ? 1.0 : -1.0) * simpson(phi, 0.0, std::abs(z));
}

/// Textbook Wilson score interval.
inline std::pair<double, double> wilson(double phat, double n, double z) {
    const double z2 = z * z;
    const double centre = (phat + z2 / (2 * n)) / (1 + z2 / n);
    const double half = z / (1 + z2 / n) * std::sqrt(phat * (1 - phat) / n + z2 / (4 * n * n));
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

/// Inverts the binary score test N (phi - p)^2 <= c p (1-p) over p by bisection
/// on each side of phi.
inline std::pair<double, double> score_inversion(double phi, double N, double c) {
    auto g = [&](double p) { return N * (phi - p) * (phi - p) - c * p * (1 - p); };
    auto root = [&](double in, double out) {
        if (g(out) <= 0.0) return out;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (in + out);
            (g(mid) <= 0.0 ? in : out) = mid;
        }
        return 0.5 * (in + out);
    };
    return {root(phi, 0.0), root(phi, 1.0)};
}

inline double log_binomial_pmf(int n, int k, double p) {
    if (p <= 0.0) return k == 0 ? 0.0 : -INFINITY;
    if (p >= 1.0) return k == n ? 0.0 : -INFINITY;
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + k * std::log(p) +
           (n - k) * std::log1p(-p);
}

/// P(lo <= X <= hi) for X ~ Bin(n, p), summing the pmf.
inline double binomial_range(int n, double p, int lo, int hi) {
    double s = 0.0;
    for (int k = std::max(lo, 0); k <= std::min(hi, n); ++k) s += std::exp(log_binomial_pmf(n, k, p));
    return s;
}

/// Minimum of sum_{a,b} f[a*2+b] p(a) q(b) over binary p(1) in [l1,h1],
/// q(1) in [l2,h2], scanned on a grid.
inline double grid_min_k2(const std::vector<double>& f, double l1, double h1, double l2, double h2, int n = 400) {
    double best = INFINITY;
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) {
            const double p = l1 + (h1 - l1) * i / n, q = l2 + (h2 - l2) * j / n;
            const double pa[2] = {1 - p, p}, qb[2] = {1 - q, q};
            double v = 0.0;
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) v += f[a * 2 + b] * pa[a] * qb[b];
            best = std::min(best, v);
        }
    return best;
}

/// theta feasible iff (1-delta) theta + delta psi = phi for some psi in [0,1];
/// scanned on a grid of step `step` over theta and psi.
inline std::pair<double, double> bern_theta_grid(double phi, double delta, double step = 1e-3) {
    double lo = INFINITY, hi = -INFINITY;
    const int n = static_cast<int>(std::round(1.0 / step));
    for (int i = 0; i <= n; ++i) {
        const double theta = i * step;
        bool ok = false;
        for (int j = 0; j <= n && !ok; ++j) ok = std::abs((1 - delta) * theta + delta * j * step - phi) <= step / 2;
        if (ok) {
            lo = std::min(lo, theta);
            hi = std::max(hi, theta);
        }
    }
    return {lo, hi};
}

/// Image of a theta interval under theta -> (1-delta) theta + delta psi, psi in [0,1].
inline std::pair<double, double> bern_prediction_image(double tlo, double thi, double delta) {
    return {(1 - delta) * tlo, (1 - delta) * thi + delta};
}

} // namespace oracle
