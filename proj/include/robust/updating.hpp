#pragma once

// Updating rules as maps from an initial family and sample data to an
// updated family, plus posterior weights for the Bayesian baseline.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include "robust/dgp.hpp"
#include "robust/decision.hpp"
#include "robust/error.hpp"
#include "robust/family.hpp"
#include "robust/stats.hpp"

namespace robust {

enum class Rule { Atu, Ml, FullBayes, Bayes, Riid, Bonferroni };

inline std::string_view to_string(Rule r) {
    switch (r) {
    case Rule::Atu: return "atu";
    case Rule::Ml: return "ml";
    case Rule::FullBayes: return "fb";
    case Rule::Bayes: return "bayes";
    case Rule::Riid: return "riid";
    case Rule::Bonferroni: return "bonferroni";
    }
    return "?";
}

inline Rule parse_rule(std::string_view s) {
    for (Rule r : {Rule::Atu, Rule::Ml, Rule::FullBayes, Rule::Bayes, Rule::Riid, Rule::Bonferroni})
        if (to_string(r) == s) return r;
    throw Error(Errc::Config, "unknown rule '" + std::string(s) + "'");
}

struct UpdateParams {
    double epsilon = 0.05;
    double alpha = 0.05;
    bool bonferroni = false;
    double eta = kDefaultFloor;

    void validate() const {
        require(epsilon > 0.0, Errc::InvalidArgument, "epsilon must be > 0");
        require(alpha > 0.0 && alpha < 1.0, Errc::InvalidArgument, "alpha must lie in (0,1)");
    }
};

namespace detail {

/// Applies one average constraint to every branch. Explicit members are
/// filtered directly; boxes carry the constraint for later queries.
inline DgpFamily constrain(const DgpFamily& F, const AverageConstraint& c) {
    return std::visit(
        [&](const auto& f) -> DgpFamily {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, BoxFamily>) {
                return DgpFamily(ConstrainedFamily{f, {c}});
            } else if constexpr (std::is_same_v<T, ConstrainedFamily>) {
                ConstrainedFamily g = f;
                g.constraints.push_back(c);
                return DgpFamily(std::move(g));
            } else if constexpr (std::is_same_v<T, ExplicitSet>) {
                std::vector<IndependentDgp> kept;
                for (const auto& P : f.members)
                    if (c.satisfied_by(average_sample_marginals(P, c.n))) kept.push_back(P);
                if (kept.empty()) return DgpFamily::empty(F.dimension());
                return DgpFamily(ExplicitSet{std::move(kept)});
            } else if constexpr (std::is_same_v<T, VertexFamily>) {
                throw Error(Errc::Unsupported, "average-based updating of a vertex family");
            } else {
                std::vector<DgpFamily> out;
                for (const auto& b : f.branches) out.push_back(constrain(b, c));
                return DgpFamily(UnionFamily{f.d, std::move(out)});
            }
        },
        F.v);
}

inline Marginal checked_empirical(const DgpFamily& F, const SampleData& data) {
    require(data.size() >= 1, Errc::EmptySample, "updating needs at least one observation");
    return empirical_distribution(data, F.dimension());
}

} // namespace detail

/// {P in F : sup-norm(P-bar_N - Phi) < epsilon}.
inline DgpFamily average_then_update(const DgpFamily& F, const SampleData& data, const UpdateParams& params) {
    params.validate();
    const Marginal phi = detail::checked_empirical(F, data);
    if (params.epsilon >= 1.0) return F;
    AverageConstraint c;
    c.kind = AverageConstraint::Kind::Ball;
    c.n = data.size();
    c.phi = phi;
    c.level = params.epsilon;
    return detail::constrain(F, c);
}

/// {P in F : the i.i.d. ellipsoid test at P-bar_N accepts the data}.
inline DgpFamily robust_iid_update(const DgpFamily& F, const SampleData& data, const UpdateParams& params) {
    params.validate();
    const Marginal phi = detail::checked_empirical(F, data);
    AverageConstraint c;
    c.kind = AverageConstraint::Kind::Ellipsoid;
    c.n = data.size();
    c.phi = phi;
    c.level = chi_square_quantile(F.dimension() - 1, params.alpha);
    c.eta = params.eta;
    return detail::constrain(F, c);
}

/// Per-outcome score intervals at level 1 - alpha/(d-1) in place of the ellipsoid.
inline DgpFamily bonferroni_update(const DgpFamily& F, const SampleData& data, const UpdateParams& params) {
    params.validate();
    const Marginal phi = detail::checked_empirical(F, data);
    AverageConstraint c;
    c.kind = AverageConstraint::Kind::Bonferroni;
    c.n = data.size();
    c.phi = phi;
    c.level = bonferroni_critical(F.dimension(), params.alpha);
    c.eta = params.eta;
    return detail::constrain(F, c);
}

/// Conditioning an independent DGP on past data leaves its future unchanged.
inline DgpFamily full_bayesian_update(const DgpFamily& F, const SampleData&) { return F; }

namespace detail {

inline double floored_log(double p, double eta) { return std::log(std::max(p, eta)); }

/// Supremum of the floored log-likelihood over one branch.
inline double branch_sup_loglik(const DgpFamily& F, const SampleData& data, double eta) {
    return std::visit(
        [&](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, BoxFamily>) {
                double s = 0.0;
                for (std::size_t i = 0; i < data.size(); ++i)
                    s += floored_log(f.box_at(i + 1).hi()[data.outcomes[i]], eta);
                return s;
            } else if constexpr (std::is_same_v<T, ExplicitSet>) {
                double best = -std::numeric_limits<double>::infinity();
                for (const auto& P : f.members) {
                    double s = 0.0;
                    for (std::size_t i = 0; i < data.size(); ++i)
                        s += floored_log(P.marginal_at(i + 1)[data.outcomes[i]], eta);
                    best = std::max(best, s);
                }
                return best;
            } else if constexpr (std::is_same_v<T, UnionFamily>) {
                double best = -std::numeric_limits<double>::infinity();
                for (const auto& b : f.branches) best = std::max(best, branch_sup_loglik(b, data, eta));
                return best;
            } else {
                throw Error(Errc::Unsupported, "maximum-likelihood updating of this family shape");
            }
        },
        F.v);
}

/// Members of F whose floored likelihood is within `tol` of `target`.
inline DgpFamily ml_restrict(const DgpFamily& F, const SampleData& data, double eta, double target, double tol) {
    return std::visit(
        [&](const auto& f) -> DgpFamily {
            using T = std::decay_t<decltype(f)>;
            const std::size_t N = data.size();
            if constexpr (std::is_same_v<T, BoxFamily>) {
                if (branch_sup_loglik(F, data, eta) < target - tol) return DgpFamily::empty(F.dimension());
                // Maximizers: the observed outcome pinned at its upper bound for
                // experiments 1..N; later experiments keep their boxes.
                std::vector<MarginalBox> prefix;
                prefix.reserve(std::max(N, f.prefix.size()));
                for (std::size_t i = 1; i <= N; ++i) {
                    const MarginalBox& b = f.box_at(i);
                    const std::size_t o = data.outcomes[i - 1];
                    prefix.push_back(b.pinned(o, b.hi()[o]));
                }
                for (std::size_t i = N + 1; i <= f.prefix.size(); ++i) prefix.push_back(f.prefix[i - 1]);
                const std::size_t start = std::max(N, f.prefix.size());
                std::vector<MarginalBox> cycle;
                for (std::size_t c = 0; c < f.cycle.size(); ++c) cycle.push_back(f.box_at(start + 1 + c));
                return DgpFamily(BoxFamily(std::move(prefix), std::move(cycle)));
            } else if constexpr (std::is_same_v<T, ExplicitSet>) {
                std::vector<IndependentDgp> kept;
                for (const auto& P : f.members) {
                    double s = 0.0;
                    for (std::size_t i = 0; i < N; ++i) s += floored_log(P.marginal_at(i + 1)[data.outcomes[i]], eta);
                    if (s >= target - tol) kept.push_back(P);
                }
                if (kept.empty()) return DgpFamily::empty(F.dimension());
                return DgpFamily(ExplicitSet{std::move(kept)});
            } else if constexpr (std::is_same_v<T, UnionFamily>) {
                std::vector<DgpFamily> out;
                for (const auto& b : f.branches) {
                    DgpFamily r = ml_restrict(b, data, eta, target, tol);
                    if (!(r.template is<UnionFamily>() && r.template as<UnionFamily>().branches.empty()))
                        out.push_back(std::move(r));
                }
                return DgpFamily(UnionFamily{f.d, std::move(out)});
            } else {
                throw Error(Errc::Unsupported, "maximum-likelihood updating of this family shape");
            }
        },
        F.v);
}

} // namespace detail

inline constexpr double kLikelihoodTieTol = 1e-9;

/// {P in F : floored log-likelihood equals its supremum over F}.
inline DgpFamily max_likelihood_update(const DgpFamily& F, const SampleData& data, double eta = kDefaultFloor) {
    require(data.size() >= 1, Errc::EmptySample, "updating needs at least one observation");
    data.validate(F.dimension());
    const double sup = detail::branch_sup_loglik(F, data, eta);
    return detail::ml_restrict(F, data, eta, sup, kLikelihoodTieTol);
}

/// Posterior under a uniform prior over the distinct sample-window marginals
/// of F, grouped by top-level branch.
struct PosteriorWeights {
    /// log sum over the branch's window marginals of P_N(omega_N).
    std::vector<double> log_evidence;
    /// Normalized posterior mass of each branch.
    std::vector<double> mass;
    /// Vertex branches: weight of each vertex at each observed experiment.
    /// Explicit branches: posterior weight of each member (single row).
    std::vector<std::vector<std::vector<double>>> detail;
};

namespace detail {

inline void bayes_branch(const DgpFamily& F, const SampleData& data, std::vector<double>& log_ev,
                         std::vector<std::vector<std::vector<double>>>& det, std::vector<DgpFamily>& leaves) {
    if (F.is<UnionFamily>()) {
        for (const auto& b : F.as<UnionFamily>().branches) bayes_branch(b, data, log_ev, det, leaves);
        return;
    }
    if (F.is<VertexFamily>()) {
        const auto& vs = F.as<VertexFamily>().vertices;
        double le = 0.0;
        std::vector<std::vector<double>> w;
        w.reserve(data.size());
        for (std::size_t o : data.outcomes) {
            double s = 0.0;
            std::vector<double> row;
            for (const auto& v : vs) {
                row.push_back(v[o]);
                s += v[o];
            }
            le += s > 0.0 ? std::log(s) : -std::numeric_limits<double>::infinity();
            if (s > 0.0)
                for (double& r : row) r /= s;
            w.push_back(std::move(row));
        }
        log_ev.push_back(le);
        det.push_back(std::move(w));
        leaves.push_back(F);
        return;
    }
    if (F.is<ExplicitSet>()) {
        // Each member is one window marginal.
        const auto& ms = F.as<ExplicitSet>().members;
        std::vector<double> lls;
        double mx = -std::numeric_limits<double>::infinity();
        for (const auto& P : ms) {
            lls.push_back(log_likelihood(P, data));
            mx = std::max(mx, lls.back());
        }
        double s = 0.0;
        std::vector<double> row;
        for (double l : lls) {
            row.push_back(std::isfinite(mx) ? std::exp(l - mx) : 0.0);
            s += row.back();
        }
        if (s > 0.0)
            for (double& r : row) r /= s;
        log_ev.push_back(std::isfinite(mx) ? mx + std::log(s) : mx);
        det.push_back({row});
        leaves.push_back(F);
        return;
    }
    throw Error(Errc::Unsupported, "Bayesian posterior needs explicit or vertex families");
}

} // namespace detail

struct Posterior {
    PosteriorWeights weights;
    /// Leaf branches in the order of `weights`.
    std::vector<DgpFamily> branches;
};

inline Posterior bayesian_posterior(const DgpFamily& F, const SampleData& data) {
    data.validate(F.dimension());
    Posterior out;
    detail::bayes_branch(F, data, out.weights.log_evidence, out.weights.detail, out.branches);
    double mx = -std::numeric_limits<double>::infinity();
    for (double l : out.weights.log_evidence) mx = std::max(mx, l);
    require(std::isfinite(mx), Errc::ZeroEvidence, "every window marginal assigns the data probability 0");
    double s = 0.0;
    for (double l : out.weights.log_evidence) {
        out.weights.mass.push_back(std::exp(l - mx));
        s += out.weights.mass.back();
    }
    for (double& m : out.weights.mass) m /= s;
    return out;
}

/// Posterior expected utility of f over experiments N+1..N+K. Future vertex
/// choices are independent of the data, so a vertex branch predicts with its
/// centroid.
inline double posterior_expected_utility(const Posterior& post, const Act& f, std::size_t N) {
    double eu = 0.0;
    for (std::size_t b = 0; b < post.branches.size(); ++b) {
        const double m = post.weights.mass[b];
        if (m == 0.0) continue;
        const DgpFamily& br = post.branches[b];
        if (br.is<VertexFamily>()) {
            eu += m * objective_payoff(f, IndependentDgp::iid(br.as<VertexFamily>().centroid()), N);
        } else {
            const auto& ms = br.as<ExplicitSet>().members;
            const auto& w = post.weights.detail[b].front();
            for (std::size_t i = 0; i < ms.size(); ++i)
                if (w[i] > 0.0) eu += m * w[i] * objective_payoff(f, ms[i], N);
        }
    }
    return eu;
}

/// Expected-utility argmax; ties to the lowest index.
inline std::size_t bayes_choice(const DecisionProblem& D, const Posterior& post) {
    std::size_t best = 0;
    double bv = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < D.acts.size(); ++i) {
        const double v = posterior_expected_utility(post, D.acts[i], D.origin);
        if (v > bv + kPayoffTol) {
            bv = v;
            best = i;
        }
    }
    return best;
}

/// Dispatch for the family-valued rules.
inline DgpFamily apply_rule(Rule rule, const DgpFamily& F, const SampleData& data, const UpdateParams& params) {
    switch (rule) {
    case Rule::Atu: return average_then_update(F, data, params);
    case Rule::Ml: return max_likelihood_update(F, data, params.eta);
    case Rule::FullBayes: return full_bayesian_update(F, data);
    case Rule::Riid: return params.bonferroni ? bonferroni_update(F, data, params) : robust_iid_update(F, data, params);
    case Rule::Bonferroni: return bonferroni_update(F, data, params);
    case Rule::Bayes: break;
    }
    throw Error(Errc::Unsupported, "the Bayesian baseline yields posterior weights, not a family");
}

} // namespace robust
