#pragma once

// Outcome spaces, marginals, independent (possibly non-identical) DGPs, and
// sample data. A DGP is an infinite sequence of marginals, described by an
// explicit prefix followed by an i.i.d. or periodic tail; finite-window joints
// are computed on demand.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "robust/error.hpp"
#include "robust/rng.hpp"

namespace robust {

inline constexpr double kSimplexTol = 1e-12;
inline constexpr double kDefaultFloor = 1e-6;

class OutcomeSpace {
public:
    explicit OutcomeSpace(std::vector<std::string> labels) : labels_(std::move(labels)) {
        require(labels_.size() >= 2, Errc::InvalidArgument, "an outcome space needs at least two outcomes");
        std::unordered_set<std::string> seen(labels_.begin(), labels_.end());
        require(seen.size() == labels_.size(), Errc::InvalidArgument, "outcome labels must be distinct");
    }

    /// Outcomes labelled "0" and "1"; index 1 is the "success" outcome.
    static OutcomeSpace binary() { return OutcomeSpace({"0", "1"}); }

    std::size_t size() const { return labels_.size(); }
    const std::vector<std::string>& labels() const { return labels_; }

    std::size_t index_of(const std::string& label) const {
        for (std::size_t j = 0; j < labels_.size(); ++j)
            if (labels_[j] == label) return j;
        throw Error(Errc::InvalidArgument, "unknown outcome label '" + label + "'");
    }

    friend bool operator==(const OutcomeSpace&, const OutcomeSpace&) = default;

private:
    std::vector<std::string> labels_;
};

/// Probability vector over a finite outcome set.
class Marginal {
public:
    explicit Marginal(std::vector<double> probs) : p_(std::move(probs)) {
        require(p_.size() >= 2, Errc::InvalidArgument, "a marginal needs at least two outcomes");
        double sum = 0.0;
        for (double v : p_) {
            require(std::isfinite(v) && v >= 0.0, Errc::InvalidArgument, "marginal components must be finite and >= 0");
            sum += v;
        }
        require(std::abs(sum - 1.0) <= kSimplexTol * static_cast<double>(p_.size()), Errc::InvalidArgument,
                "marginal components must sum to 1 (got " + std::to_string(sum) + ")");
    }

    /// Renormalizes a nonnegative weight vector; for computed quantities whose
    /// rounding error would otherwise trip the simplex check.
    static Marginal normalized(std::vector<double> weights) {
        double sum = 0.0;
        for (double& v : weights) {
            if (v < 0.0 && v > -1e-12) v = 0.0;
            sum += v;
        }
        require(sum > 0.0, Errc::InvalidArgument, "cannot normalize a zero weight vector");
        for (double& v : weights) v /= sum;
        return Marginal(std::move(weights));
    }

    /// Binary marginal (1 - p1, p1).
    static Marginal bernoulli(double p1) {
        require(p1 >= 0.0 && p1 <= 1.0, Errc::InvalidArgument, "Bernoulli probability outside [0,1]");
        return Marginal({1.0 - p1, p1});
    }

    static Marginal degenerate(std::size_t d, std::size_t j) {
        std::vector<double> p(d, 0.0);
        p.at(j) = 1.0;
        return Marginal(std::move(p));
    }

    static Marginal uniform(std::size_t d) { return Marginal(std::vector<double>(d, 1.0 / static_cast<double>(d))); }

    std::size_t size() const { return p_.size(); }
    double operator[](std::size_t j) const { return p_[j]; }
    std::span<const double> probs() const { return p_; }
    const std::vector<double>& vec() const { return p_; }

    bool has_full_support(double eta = kDefaultFloor) const {
        return std::all_of(p_.begin(), p_.end(), [eta](double v) { return v >= eta; });
    }

    /// Raises every component to at least `eta`, taking the excess from the
    /// components above the floor proportionally.
    Marginal floored(double eta = kDefaultFloor) const {
        require(eta >= 0.0 && eta * static_cast<double>(p_.size()) < 1.0, Errc::InvalidArgument, "floor too large");
        if (has_full_support(eta)) return *this;
        std::vector<double> q(p_.size());
        double deficit = 0.0, free_mass = 0.0;
        for (std::size_t j = 0; j < p_.size(); ++j) {
            if (p_[j] < eta) deficit += eta - p_[j];
            else free_mass += p_[j] - eta;
        }
        const double scale = (free_mass - deficit) / free_mass;
        for (std::size_t j = 0; j < p_.size(); ++j)
            q[j] = p_[j] < eta ? eta : eta + (p_[j] - eta) * scale;
        return normalized(std::move(q));
    }

    double sup_distance(const Marginal& other) const {
        double m = 0.0;
        for (std::size_t j = 0; j < p_.size(); ++j) m = std::max(m, std::abs(p_[j] - other.p_[j]));
        return m;
    }

    bool approx_equal(const Marginal& other, double tol = kSimplexTol) const {
        return size() == other.size() && sup_distance(other) <= tol;
    }

private:
    std::vector<double> p_;
};

/// Sequence of independent marginals: an explicit prefix for experiments
/// 1..m, then a cycle repeated forever (a one-element cycle is an i.i.d. tail).
class IndependentDgp {
public:
    IndependentDgp(std::vector<Marginal> prefix, std::vector<Marginal> cycle, bool iid_tail = false)
        : prefix_(std::move(prefix)), cycle_(std::move(cycle)), iid_tail_(iid_tail) {
        require(!cycle_.empty(), Errc::InvalidArgument, "a DGP tail needs at least one marginal");
        require(!iid_tail_ || cycle_.size() == 1, Errc::InvalidArgument, "an i.i.d. tail has exactly one marginal");
        const std::size_t d = cycle_.front().size();
        for (const auto& m : prefix_) require(m.size() == d, Errc::InvalidArgument, "DGP marginals differ in dimension");
        for (const auto& m : cycle_) require(m.size() == d, Errc::InvalidArgument, "DGP marginals differ in dimension");
    }

    static IndependentDgp iid(Marginal p) { return IndependentDgp({}, {std::move(p)}, true); }
    static IndependentDgp periodic(std::vector<Marginal> cycle) { return IndependentDgp({}, std::move(cycle)); }

    /// Marginal of experiment i (1-based).
    const Marginal& marginal_at(std::size_t i) const {
        require(i >= 1, Errc::InvalidArgument, "experiments are indexed from 1");
        if (i <= prefix_.size()) return prefix_[i - 1];
        return cycle_[(i - prefix_.size() - 1) % cycle_.size()];
    }

    std::size_t dimension() const { return cycle_.front().size(); }
    std::size_t prefix_length() const { return prefix_.size(); }
    std::size_t period() const { return cycle_.size(); }
    bool iid_tail() const { return iid_tail_; }
    const std::vector<Marginal>& prefix() const { return prefix_; }
    const std::vector<Marginal>& cycle() const { return cycle_; }

    /// Number of experiments in 1..n that use cycle entry j.
    std::size_t cycle_count(std::size_t j, std::size_t n) const {
        if (n <= prefix_.size()) return 0;
        const std::size_t tail = n - prefix_.size();
        return tail / cycle_.size() + (j < tail % cycle_.size() ? 1 : 0);
    }

private:
    std::vector<Marginal> prefix_;
    std::vector<Marginal> cycle_;
    bool iid_tail_ = false;
};

struct SampleData {
    std::vector<std::size_t> outcomes;

    std::size_t size() const { return outcomes.size(); }

    /// Checks every index against dimension d.
    void validate(std::size_t d) const {
        for (std::size_t o : outcomes)
            require(o < d, Errc::InvalidArgument, "sample outcome index out of range");
    }
};

/// Number of experiments after which (prefix, cycle) pairs of two eventually
/// periodic sequences repeat: max prefix + lcm of periods.
inline std::size_t joint_horizon(std::size_t m1, std::size_t p1, std::size_t m2, std::size_t p2,
                                 std::size_t cap = 1'000'000) {
    const std::size_t l = std::lcm(p1, p2);
    require(l <= cap, Errc::Unsupported, "combined period too long to check");
    return std::max(m1, m2) + l;
}

inline Marginal empirical_distribution(const SampleData& data, std::size_t d) {
    require(data.size() >= 1, Errc::EmptySample, "empirical distribution of an empty sample");
    data.validate(d);
    std::vector<double> counts(d, 0.0);
    for (std::size_t o : data.outcomes) counts[o] += 1.0;
    const double n = static_cast<double>(data.size());
    for (double& c : counts) c /= n;
    return Marginal::normalized(std::move(counts));
}

inline Marginal empirical_distribution(const SampleData& data, const OutcomeSpace& space) {
    return empirical_distribution(data, space.size());
}

/// N^{-1} sum_{i<=N} P_i.
inline Marginal average_sample_marginals(const IndependentDgp& P, std::size_t N) {
    require(N >= 1, Errc::InvalidArgument, "average of sample marginals needs N >= 1");
    const std::size_t d = P.dimension();
    std::vector<double> acc(d, 0.0);
    const std::size_t m = std::min(N, P.prefix_length());
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < d; ++j) acc[j] += P.prefix()[i][j];
    for (std::size_t c = 0; c < P.period(); ++c) {
        const double cnt = static_cast<double>(P.cycle_count(c, N));
        if (cnt == 0.0) continue;
        for (std::size_t j = 0; j < d; ++j) acc[j] += cnt * P.cycle()[c][j];
    }
    for (double& v : acc) v /= static_cast<double>(N);
    return Marginal::normalized(std::move(acc));
}

/// sum_i log P_i(omega_i); -inf when an observed outcome has probability 0.
inline double log_likelihood(const IndependentDgp& P, const SampleData& data) {
    data.validate(P.dimension());
    double ll = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double p = P.marginal_at(i + 1)[data.outcomes[i]];
        if (p <= 0.0) return -std::numeric_limits<double>::infinity();
        ll += std::log(p);
    }
    return ll;
}

/// Draws experiments first..first+N-1 from `rng`.
inline SampleData sample(const IndependentDgp& P, std::size_t N, Rng& rng, std::size_t first = 1) {
    SampleData out;
    out.outcomes.reserve(N);
    for (std::size_t i = 0; i < N; ++i) out.outcomes.push_back(rng.categorical(P.marginal_at(first + i).probs()));
    return out;
}

inline SampleData sample(const IndependentDgp& P, std::size_t N, std::uint64_t seed) {
    Rng rng(seed);
    return sample(P, N, rng);
}

/// Joint distribution of experiments first..first+K-1, outcome of `first`
/// being the most significant digit of the joint index.
inline std::vector<double> joint_window(const IndependentDgp& P, std::size_t first, std::size_t K) {
    std::vector<double> joint{1.0};
    for (std::size_t k = 0; k < K; ++k) {
        const Marginal& m = P.marginal_at(first + k);
        std::vector<double> next;
        next.reserve(joint.size() * m.size());
        for (double w : joint)
            for (std::size_t j = 0; j < m.size(); ++j) next.push_back(w * m[j]);
        joint = std::move(next);
    }
    return joint;
}

/// Joint of a product of explicit factors (same digit order as joint_window).
inline std::vector<double> product_joint(std::span<const Marginal> factors) {
    std::vector<double> joint{1.0};
    for (const Marginal& m : factors) {
        std::vector<double> next;
        next.reserve(joint.size() * m.size());
        for (double w : joint)
            for (std::size_t j = 0; j < m.size(); ++j) next.push_back(w * m[j]);
        joint = std::move(next);
    }
    return joint;
}

/// Marginal over factor k of a joint vector on d^K outcomes.
inline std::vector<double> joint_factor_marginal(std::span<const double> joint, std::size_t d, std::size_t K,
                                                 std::size_t k) {
    std::vector<double> out(d, 0.0);
    std::size_t stride = 1;
    for (std::size_t t = k + 1; t < K; ++t) stride *= d;
    for (std::size_t idx = 0; idx < joint.size(); ++idx) out[(idx / stride) % d] += joint[idx];
    return out;
}

/// Exact equality of two DGPs as infinite sequences (tolerance per component).
inline bool same_dgp(const IndependentDgp& a, const IndependentDgp& b, double tol = kSimplexTol) {
    if (a.dimension() != b.dimension()) return false;
    const std::size_t h = joint_horizon(a.prefix_length(), a.period(), b.prefix_length(), b.period());
    for (std::size_t i = 1; i <= h; ++i)
        if (!a.marginal_at(i).approx_equal(b.marginal_at(i), tol)) return false;
    return true;
}

} // namespace robust
