#pragma once

// Acts over a finite future window, future-marginal hulls of DGP families,
// maxmin and minimax-regret choice, objective payoffs, and the accommodation
// and refinement predicates.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include "robust/dgp.hpp"
#include "robust/error.hpp"
#include "robust/family.hpp"
#include "robust/lp.hpp"

namespace robust {

inline constexpr double kPayoffTol = 1e-12;
inline constexpr double kLpTol = 1e-9;
inline constexpr std::size_t kDefaultHullCap = 100'000;

/// Utility table over the d^K joint outcomes of experiments N+1..N+K; the
/// outcome of N+1 is the most significant digit of the index.
struct Act {
    std::size_t d = 2;
    std::size_t horizon = 1;
    std::vector<double> payoff;

    Act() = default;
    Act(std::size_t d_, std::size_t K, std::vector<double> table) : d(d_), horizon(K), payoff(std::move(table)) {
        require(d >= 2 && K >= 1, Errc::InvalidArgument, "an act needs d >= 2 and K >= 1");
        std::size_t n = 1;
        for (std::size_t k = 0; k < K; ++k) n *= d;
        require(payoff.size() == n, Errc::InvalidArgument, "act table must have d^K entries");
        for (double u : payoff)
            require(std::isfinite(u) && u >= 0.0 && u <= 1.0, Errc::InvalidArgument, "act payoffs must lie in [0,1]");
    }

    static Act constant(double x, std::size_t d, std::size_t K = 1) {
        std::size_t n = 1;
        for (std::size_t k = 0; k < K; ++k) n *= d;
        return Act(d, K, std::vector<double>(n, x));
    }

    bool is_constant() const {
        for (double u : payoff)
            if (u != payoff.front()) return false;
        return true;
    }

    double expectation(std::span<const double> joint) const {
        double s = 0.0;
        for (std::size_t i = 0; i < payoff.size(); ++i) s += payoff[i] * joint[i];
        return s;
    }

    friend bool operator==(const Act&, const Act&) = default;
};

struct DecisionProblem {
    std::vector<Act> acts;
    std::size_t origin = 0;

    DecisionProblem() = default;
    DecisionProblem(std::vector<Act> a, std::size_t N) : acts(std::move(a)), origin(N) {
        require(!acts.empty(), Errc::InvalidArgument, "a decision problem needs at least one act");
        for (const auto& f : acts)
            require(f.d == acts.front().d && f.horizon == acts.front().horizon, Errc::InvalidArgument,
                    "acts in one problem must share d and horizon");
    }

    std::size_t horizon() const { return acts.front().horizon; }
    std::size_t dimension() const { return acts.front().d; }

    bool is_basic() const {
        return acts.size() == 2 && (acts[0].is_constant() != acts[1].is_constant());
    }
};

/// co of the future marginals of a family over experiments N+1..N+K.
struct MarginalHull {
    enum class Form { Rect, Cloud };

    Form form = Form::Cloud;
    std::size_t d = 2;
    std::size_t K = 1;
    std::vector<MarginalBox> boxes;
    std::vector<std::vector<double>> points;
    /// Set when the hull may be a strict superset of the true one.
    bool outer_approx = false;

    bool empty() const { return form == Form::Cloud && points.empty(); }

    static MarginalHull empty_hull(std::size_t d, std::size_t K) {
        MarginalHull h;
        h.d = d;
        h.K = K;
        return h;
    }
};

namespace detail {

inline std::size_t checked_power(std::size_t base, std::size_t exp, std::size_t cap) {
    std::size_t n = 1;
    for (std::size_t k = 0; k < exp; ++k) {
        n *= base;
        require(n <= cap, Errc::HorizonTooLarge, "joint outcome count exceeds the configured cap");
    }
    return n;
}

/// All products v_1 x ... x v_K with v_k drawn from sets[k].
inline std::vector<std::vector<double>> vertex_products(const std::vector<std::vector<Marginal>>& sets,
                                                        std::size_t cap) {
    std::size_t count = 1;
    for (const auto& s : sets) {
        count *= s.size();
        require(count <= cap, Errc::HorizonTooLarge, "hull vertex count exceeds the configured cap");
    }
    std::vector<std::vector<double>> out{{1.0}};
    for (const auto& s : sets) {
        std::vector<std::vector<double>> next;
        next.reserve(out.size() * s.size());
        for (const auto& joint : out)
            for (const Marginal& v : s) {
                std::vector<double> j;
                j.reserve(joint.size() * v.size());
                for (double w : joint)
                    for (double p : v.probs()) j.push_back(w * p);
                next.push_back(std::move(j));
            }
        out = std::move(next);
    }
    return out;
}

inline std::vector<std::vector<double>> extreme_points(const MarginalHull& H, std::size_t cap = kDefaultHullCap) {
    if (H.form == MarginalHull::Form::Cloud) return H.points;
    std::vector<std::vector<Marginal>> sets;
    sets.reserve(H.boxes.size());
    for (const auto& b : H.boxes) sets.push_back(b.vertices());
    return vertex_products(sets, cap);
}

/// Minimum of f over products of the boxes; exhaustive over vertex products
/// through recursive contraction on the leading experiment.
inline double rect_min(std::span<const double> f, std::span<const MarginalBox> boxes, std::size_t d) {
    if (boxes.size() == 1) return boxes.front().min_linear(f);
    const std::size_t stride = f.size() / d;
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> g(stride);
    for (const Marginal& v : boxes.front().vertices()) {
        std::fill(g.begin(), g.end(), 0.0);
        for (std::size_t o = 0; o < d; ++o) {
            if (v[o] == 0.0) continue;
            for (std::size_t r = 0; r < stride; ++r) g[r] += v[o] * f[o * stride + r];
        }
        best = std::min(best, rect_min(g, boxes.subspan(1), d));
    }
    return best;
}

inline bool is_product_of_factors(std::span<const double> joint, std::size_t d, std::size_t K,
                                  std::vector<std::vector<double>>& factors, double tol) {
    factors.clear();
    for (std::size_t k = 0; k < K; ++k) factors.push_back(joint_factor_marginal(joint, d, K, k));
    std::vector<double> prod{1.0};
    for (const auto& f : factors) {
        std::vector<double> next;
        for (double w : prod)
            for (double p : f) next.push_back(w * p);
        prod = std::move(next);
    }
    for (std::size_t i = 0; i < joint.size(); ++i)
        if (std::abs(prod[i] - joint[i]) > tol) return false;
    return true;
}

} // namespace detail

inline MarginalHull future_hull(const DgpFamily& F, std::size_t N, std::size_t K, std::size_t cap = kDefaultHullCap) {
    require(K >= 1, Errc::InvalidArgument, "future horizon K must be >= 1");
    const std::size_t d = F.dimension();
    detail::checked_power(d, K, cap);
    MarginalHull H;
    H.d = d;
    H.K = K;
    std::visit(
        [&](const auto& f) {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, BoxFamily>) {
                H.form = MarginalHull::Form::Rect;
                for (std::size_t k = 1; k <= K; ++k) H.boxes.push_back(f.box_at(N + k));
            } else if constexpr (std::is_same_v<T, ExplicitSet>) {
                H.form = MarginalHull::Form::Cloud;
                for (const auto& P : f.members) H.points.push_back(joint_window(P, N + 1, K));
            } else if constexpr (std::is_same_v<T, VertexFamily>) {
                H.form = MarginalHull::Form::Cloud;
                H.points = detail::vertex_products(std::vector<std::vector<Marginal>>(K, f.vertices), cap);
            } else if constexpr (std::is_same_v<T, ConstrainedFamily>) {
                for (const auto& c : f.constraints)
                    require(c.n <= N, Errc::InvalidArgument, "constrained family queried before its sample size");
                const Feasibility fz = f.feasibility();
                if (fz == Feasibility::Empty) return;
                H = future_hull(DgpFamily(f.base), N, K, cap);
                H.outer_approx = fz == Feasibility::MaybeNonEmpty;
            } else {
                std::vector<MarginalHull> parts;
                for (const auto& b : f.branches) {
                    MarginalHull hb = future_hull(b, N, K, cap);
                    if (!hb.empty()) parts.push_back(std::move(hb));
                }
                if (parts.empty()) return;
                if (parts.size() == 1) {
                    H = std::move(parts.front());
                    return;
                }
                H.form = MarginalHull::Form::Cloud;
                for (const auto& p : parts) {
                    H.outer_approx = H.outer_approx || p.outer_approx;
                    for (auto& pt : detail::extreme_points(p, cap)) {
                        H.points.push_back(std::move(pt));
                        require(H.points.size() <= cap, Errc::HorizonTooLarge, "hull point count exceeds the cap");
                    }
                }
            }
        },
        F.v);
    return H;
}

/// Worst-case expected utility of f over H; +inf over an empty hull.
inline double min_expected_utility(const Act& f, const MarginalHull& H) {
    require(f.horizon == H.K && f.d == H.d, Errc::InvalidArgument, "act and hull disagree on d or horizon");
    if (H.empty()) return std::numeric_limits<double>::infinity();
    if (H.form == MarginalHull::Form::Rect) return detail::rect_min(f.payoff, H.boxes, H.d);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : H.points) best = std::min(best, f.expectation(p));
    return best;
}

/// Index of the MEU act. Near-ties (1e-12) go to the incumbent when it is
/// among the optimal acts, then to the lowest index.
inline std::size_t meu_choice(const DecisionProblem& D, const MarginalHull& H,
                              std::optional<std::size_t> incumbent = std::nullopt) {
    std::vector<double> v;
    v.reserve(D.acts.size());
    for (const auto& f : D.acts) v.push_back(min_expected_utility(f, H));
    double best = -std::numeric_limits<double>::infinity();
    for (double x : v) best = std::max(best, x);
    auto optimal = [&](std::size_t i) { return v[i] >= best - kPayoffTol; };
    if (incumbent && *incumbent < v.size() && optimal(*incumbent)) return *incumbent;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (optimal(i)) return i;
    return 0;
}

/// E_{P*} f over experiments N+1..N+K.
inline double objective_payoff(const Act& f, const IndependentDgp& Pstar, std::size_t N) {
    require(f.d == Pstar.dimension(), Errc::InvalidArgument, "act and DGP disagree on d");
    return f.expectation(joint_window(Pstar, N + 1, f.horizon));
}

inline double certainty_equivalent(const DecisionProblem& D, const DgpFamily& initial, std::size_t N) {
    const MarginalHull H = future_hull(initial, N, D.horizon());
    return min_expected_utility(D.acts[meu_choice(D, H)], H);
}

enum class Tri { No, Yes, Unknown };

inline std::string_view to_string(Tri t) {
    switch (t) {
    case Tri::No: return "no";
    case Tri::Yes: return "yes";
    case Tri::Unknown: return "unknown";
    }
    return "unknown";
}

/// Membership of a joint vector in H.
inline bool hull_contains(const MarginalHull& H, std::span<const double> joint, double tol = kLpTol) {
    if (H.empty()) return false;
    if (H.form == MarginalHull::Form::Rect) {
        std::vector<std::vector<double>> factors;
        if (detail::is_product_of_factors(joint, H.d, H.K, factors, tol)) {
            for (std::size_t k = 0; k < H.K; ++k)
                if (!H.boxes[k].contains(std::span<const double>(factors[k]), tol)) return false;
            return true;
        }
        const auto pts = detail::extreme_points(H);
        return in_convex_hull(pts, joint, tol);
    }
    return in_convex_hull(H.points, joint, tol);
}

inline Tri hull_accommodates(const MarginalHull& H, const IndependentDgp& Pstar, std::size_t N) {
    if (H.empty()) return Tri::No;
    bool inside = false;
    if (H.form == MarginalHull::Form::Rect) {
        // P* is a product measure; its k-th factor must lie in the k-th box,
        // which is also the k-th factor projection of the hull.
        inside = true;
        for (std::size_t k = 0; k < H.K && inside; ++k)
            inside = H.boxes[k].contains(Pstar.marginal_at(N + 1 + k), kLpTol);
    } else {
        inside = in_convex_hull(H.points, joint_window(Pstar, N + 1, H.K), kLpTol);
    }
    if (!inside) return Tri::No;
    return H.outer_approx ? Tri::Unknown : Tri::Yes;
}

inline Tri accommodates(const DgpFamily& updated, const IndependentDgp& Pstar, std::size_t N, std::size_t K = 1) {
    return hull_accommodates(future_hull(updated, N, K), Pstar, N);
}

/// co(updated) strictly inside co(initial), checked on extreme points.
inline bool hull_refines(const MarginalHull& upd, const MarginalHull& init) {
    const auto up = detail::extreme_points(upd);
    for (const auto& p : up)
        if (!hull_contains(init, p)) return false;
    const auto ip = detail::extreme_points(init);
    for (const auto& p : ip)
        if (!hull_contains(upd, p)) return true;
    return false;
}

inline bool refines(const DgpFamily& updated, const DgpFamily& initial, std::size_t N, std::size_t K = 1) {
    return hull_refines(future_hull(updated, N, K), future_hull(initial, N, K));
}

/// max over hull points of E_P[max_g g - f] for every act f of D.
inline std::vector<double> max_regrets(const DecisionProblem& D, const MarginalHull& H) {
    require(!H.empty(), Errc::InvalidArgument, "regret over an empty hull");
    const std::size_t n = D.acts.front().payoff.size();
    std::vector<double> best(n, 0.0);
    for (const auto& g : D.acts)
        for (std::size_t i = 0; i < n; ++i) best[i] = std::max(best[i], g.payoff[i]);
    const auto pts = detail::extreme_points(H);
    std::vector<double> out;
    for (const auto& f : D.acts) {
        double worst = -std::numeric_limits<double>::infinity();
        for (const auto& p : pts) {
            double r = 0.0;
            for (std::size_t i = 0; i < n; ++i) r += p[i] * (best[i] - f.payoff[i]);
            worst = std::max(worst, r);
        }
        out.push_back(worst);
    }
    return out;
}

inline std::size_t minimax_regret_choice(const DecisionProblem& D, const MarginalHull& H) {
    const auto r = max_regrets(D, H);
    double lo = std::numeric_limits<double>::infinity();
    for (double x : r) lo = std::min(lo, x);
    for (std::size_t i = 0; i < r.size(); ++i)
        if (r[i] <= lo + kPayoffTol) return i;
    return 0;
}

struct Choices {
    std::size_t data_free = 0;
    std::size_t data_driven = 0;
};

/// Data-free choice under `initial`, then the data-driven choice under
/// `updated` with the data-free choice as incumbent.
inline Choices choose(const DecisionProblem& D, const MarginalHull& initial, const MarginalHull& updated) {
    Choices c;
    c.data_free = meu_choice(D, initial);
    c.data_driven = meu_choice(D, updated, c.data_free);
    return c;
}

/// An act f in [0,1]^(d^K) with min over H of E f > E_{P*} f, if one exists
/// by more than 1e-9; found by maximizing the gap over the extreme points.
inline std::optional<Act> separating_act(const MarginalHull& H, std::span<const double> pstar_joint) {
    if (H.empty()) return std::nullopt;
    const auto pts = detail::extreme_points(H);
    const std::size_t n = pstar_joint.size();
    // Variables: f (n), t+ , t-.
    LinearProgram lp;
    lp.num_vars = n + 2;
    lp.objective.assign(n + 2, 0.0);
    lp.objective[n] = 1.0;
    lp.objective[n + 1] = -1.0;
    for (const auto& p : pts) {
        std::vector<double> row(n + 2, 0.0);
        for (std::size_t j = 0; j < n; ++j) row[j] = p[j] - pstar_joint[j];
        row[n] = -1.0;
        row[n + 1] = 1.0;
        lp.add_row(std::move(row), RowSense::Ge, 0.0);
    }
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> row(n + 2, 0.0);
        row[j] = 1.0;
        lp.add_row(std::move(row), RowSense::Le, 1.0);
    }
    // Keep t bounded so the LP is never unbounded.
    std::vector<double> tb(n + 2, 0.0);
    tb[n] = 1.0;
    lp.add_row(std::move(tb), RowSense::Le, 2.0);
    const LpResult r = solve_lp(lp);
    if (r.status != LpStatus::Optimal || r.value <= kLpTol) return std::nullopt;
    std::vector<double> f(r.x.begin(), r.x.begin() + static_cast<std::ptrdiff_t>(n));
    for (double& u : f) u = std::clamp(u, 0.0, 1.0);
    return Act(H.d, H.K, std::move(f));
}

/// Basic problem {f, x} on which the data-driven choice under H is
/// objectively worse than the data-free choice, for any initial hull
/// containing P*: x sits halfway between min_H E f and E_{P*} f.
inline std::optional<DecisionProblem> separating_basic_problem(const MarginalHull& H, const IndependentDgp& Pstar,
                                                               std::size_t N) {
    const auto joint = joint_window(Pstar, N + 1, H.K);
    auto f = separating_act(H, joint);
    if (!f) return std::nullopt;
    const double x = 0.5 * (min_expected_utility(*f, H) + f->expectation(joint));
    return DecisionProblem({*f, Act::constant(x, H.d, H.K)}, N);
}

} // namespace robust
