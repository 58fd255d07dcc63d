#pragma once

// Closed forms for the Bernoulli model with an ambiguous nuisance component
// and the Gaussian model with ambiguous variances.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "robust/dgp.hpp"
#include "robust/error.hpp"
#include "robust/interval.hpp"
#include "robust/rng.hpp"
#include "robust/stats.hpp"

namespace robust {

/// P(outcome 1) = (1 - delta) theta + delta psi_i with psi_i in [0,1] unknown.
struct BernoulliNuisanceModel {
    double delta = 0.0;

    double success_probability(double theta, double psi) const { return (1.0 - delta) * theta + delta * psi; }

    /// Per-experiment range of P(outcome 1) for a given theta.
    Interval marginal_range(double theta) const {
        return {(1.0 - delta) * theta, (1.0 - delta) * theta + delta, false};
    }
};

inline void check_probability(double x, const char* what) {
    require(x >= 0.0 && x <= 1.0, Errc::InvalidArgument, std::string(what) + " must lie in [0,1]");
}

inline Interval bern_theta_asymptotic(double phi1, double delta) {
    check_probability(phi1, "frequency");
    check_probability(delta, "delta");
    require(delta < 1.0, Errc::DeltaOne, "delta = 1 leaves theta unrestricted ([0,1])");
    return {std::max((phi1 - delta) / (1.0 - delta), 0.0), std::min(phi1 / (1.0 - delta), 1.0), false};
}

inline Interval bern_prediction_asymptotic(double phi1, double delta) {
    check_probability(phi1, "frequency");
    check_probability(delta, "delta");
    return {std::max(phi1 - delta, 0.0), std::min(phi1 + delta, 1.0), false};
}

inline Interval bern_prediction_ml(double phi1, double delta) {
    check_probability(phi1, "frequency");
    check_probability(delta, "delta");
    return {std::max(phi1 - (1.0 - phi1) * delta, 0.0), std::min(phi1 + phi1 * delta, 1.0), false};
}

struct BernoulliFinite {
    Interval wilson;
    Interval theta;
    Interval prediction;
};

inline BernoulliFinite bern_finite(double phi1, std::size_t N, double delta, double alpha) {
    check_probability(delta, "delta");
    require(delta < 1.0, Errc::DeltaOne, "delta = 1 leaves theta unrestricted ([0,1])");
    BernoulliFinite out;
    out.wilson = wilson_interval(phi1, N, alpha);
    const double wl = out.wilson.lo, wh = out.wilson.hi;
    out.theta = {std::max((wl - delta) / (1.0 - delta), 0.0), std::min(wh / (1.0 - delta), 1.0), false};
    out.prediction = {std::max(wl - delta, 0.0), std::min(wh + delta, 1.0), false};
    return out;
}

inline Interval bern_theta_finite(const SampleData& data, double delta, double alpha) {
    require(data.size() >= 1, Errc::EmptySample, "finite-sample interval needs data");
    const Marginal phi = empirical_distribution(data, 2);
    return bern_finite(phi[1], data.size(), delta, alpha).theta;
}

inline Interval bern_prediction_finite(const SampleData& data, double delta, double alpha) {
    require(data.size() >= 1, Errc::EmptySample, "finite-sample interval needs data");
    const Marginal phi = empirical_distribution(data, 2);
    return bern_finite(phi[1], data.size(), delta, alpha).prediction;
}

/// Signals x_i ~ N(theta, sigma_i^2), sigma_i in [sigma_lo, sigma_hi].
struct GaussianSignalsModel {
    double sigma_lo = 1.0;
    double sigma_hi = 1.0;
    double epsilon = 0.05;

    void validate() const {
        require(sigma_lo > 0.0 && sigma_lo <= sigma_hi, Errc::InvalidArgument, "need 0 < sigma_lo <= sigma_hi");
        require(epsilon > 0.0, Errc::InvalidArgument, "epsilon must be > 0");
    }
};

/// {theta : |mean - theta| < epsilon}, flagged open.
inline Interval gauss_atu_states(double sample_mean, std::size_t N, double epsilon) {
    require(epsilon > 0.0, Errc::InvalidArgument, "epsilon must be > 0");
    require(N >= 1, Errc::EmptySample, "sample mean of no signals");
    return {sample_mean - epsilon, sample_mean + epsilon, true};
}

inline std::vector<double> gauss_sample(double theta, const std::vector<double>& sigmas, std::size_t N, Rng& rng) {
    require(!sigmas.empty(), Errc::InvalidArgument, "need at least one standard deviation");
    for (double s : sigmas) require(s > 0.0, Errc::InvalidArgument, "standard deviations must be positive");
    std::vector<double> x(N);
    for (std::size_t i = 0; i < N; ++i) x[i] = theta + sigmas[i % sigmas.size()] * rng.normal();
    return x;
}

inline std::vector<double> gauss_sample(double theta, const std::vector<double>& sigmas, std::size_t N,
                                        std::uint64_t seed) {
    Rng rng(seed);
    return gauss_sample(theta, sigmas, N, rng);
}

inline std::vector<double> gauss_sample(const GaussianSignalsModel& m, double theta, const std::vector<double>& sigmas,
                                        std::size_t N, std::uint64_t seed) {
    m.validate();
    for (double s : sigmas)
        require(s >= m.sigma_lo && s <= m.sigma_hi, Errc::InvalidArgument, "sigma outside the model bounds");
    return gauss_sample(theta, sigmas, N, seed);
}

inline double mean(const std::vector<double>& x) {
    require(!x.empty(), Errc::EmptySample, "mean of no values");
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

} // namespace robust
