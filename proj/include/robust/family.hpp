#pragma once

// Structured sets of independent DGPs: per-experiment boxes, finite explicit
// lists, per-experiment vertex choices, boxes with recorded average-marginal
// constraints (the output of the average-based updating rules), and unions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "robust/dgp.hpp"
#include "robust/error.hpp"
#include "robust/interval.hpp"
#include "robust/stats.hpp"

namespace robust {

inline constexpr double kMembershipTol = 1e-12;

/// {p in simplex : lo <= p <= hi}, stored with bounds tightened to the simplex.
class MarginalBox {
public:
    MarginalBox(std::vector<double> lo, std::vector<double> hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
        require(lo_.size() == hi_.size() && lo_.size() >= 2, Errc::InvalidArgument, "box bounds differ in length");
        double slo = 0.0, shi = 0.0;
        for (std::size_t j = 0; j < lo_.size(); ++j) {
            require(lo_[j] >= -kSimplexTol && hi_[j] <= 1.0 + kSimplexTol && lo_[j] <= hi_[j] + kSimplexTol,
                    Errc::InvalidArgument, "box bounds must satisfy 0 <= lo <= hi <= 1");
            lo_[j] = std::clamp(lo_[j], 0.0, 1.0);
            hi_[j] = std::clamp(hi_[j], lo_[j], 1.0);
            slo += lo_[j];
            shi += hi_[j];
        }
        // Feasibility of {sum p = 1} within the box.
        require(slo <= 1.0 + kSimplexTol && shi >= 1.0 - kSimplexTol, Errc::InvalidArgument,
                "box does not meet the probability simplex");
        std::vector<double> lo2(lo_.size()), hi2(hi_.size());
        for (std::size_t j = 0; j < lo_.size(); ++j) {
            lo2[j] = std::max(lo_[j], 1.0 - (shi - hi_[j]));
            hi2[j] = std::min(hi_[j], 1.0 - (slo - lo_[j]));
            if (hi2[j] < lo2[j]) hi2[j] = lo2[j];
        }
        lo_ = std::move(lo2);
        hi_ = std::move(hi2);
    }

    /// Binary box on the probability of outcome 1.
    static MarginalBox binary(double lo1, double hi1) { return MarginalBox({1.0 - hi1, lo1}, {1.0 - lo1, hi1}); }
    static MarginalBox point(const Marginal& p) { return MarginalBox(p.vec(), p.vec()); }
    static MarginalBox simplex(std::size_t d) {
        return MarginalBox(std::vector<double>(d, 0.0), std::vector<double>(d, 1.0));
    }

    std::size_t size() const { return lo_.size(); }
    const std::vector<double>& lo() const { return lo_; }
    const std::vector<double>& hi() const { return hi_; }
    Interval component(std::size_t j) const { return {lo_[j], hi_[j], false}; }

    bool contains(const Marginal& p, double tol = kMembershipTol) const {
        if (p.size() != size()) return false;
        for (std::size_t j = 0; j < size(); ++j)
            if (p[j] < lo_[j] - tol || p[j] > hi_[j] + tol) return false;
        return true;
    }

    bool contains(std::span<const double> p, double tol = kMembershipTol) const {
        if (p.size() != size()) return false;
        for (std::size_t j = 0; j < size(); ++j)
            if (p[j] < lo_[j] - tol || p[j] > hi_[j] + tol) return false;
        return true;
    }

    /// min_{p in box} f . p; exact greedy fill in increasing order of f.
    double min_linear(std::span<const double> f) const {
        std::vector<std::size_t> order(size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
        double rem = 1.0, value = 0.0;
        for (std::size_t j = 0; j < size(); ++j) {
            rem -= lo_[j];
            value += f[j] * lo_[j];
        }
        for (std::size_t j : order) {
            if (rem <= 0.0) break;
            const double add = std::min(rem, hi_[j] - lo_[j]);
            value += f[j] * add;
            rem -= add;
        }
        return value;
    }

    /// Extreme points: all but one coordinate at a bound, the last one solved.
    std::vector<Marginal> vertices() const {
        const std::size_t d = size();
        require(d <= 16, Errc::HorizonTooLarge, "vertex enumeration above d = 16");
        std::vector<std::vector<double>> out;
        auto seen = [&](const std::vector<double>& v) {
            for (const auto& w : out) {
                double m = 0.0;
                for (std::size_t j = 0; j < d; ++j) m = std::max(m, std::abs(v[j] - w[j]));
                if (m <= 1e-12) return true;
            }
            return false;
        };
        std::vector<double> v(d);
        for (std::size_t free = 0; free < d; ++free) {
            for (std::size_t mask = 0; mask < (std::size_t{1} << (d - 1)); ++mask) {
                double s = 0.0;
                std::size_t bit = 0;
                for (std::size_t j = 0; j < d; ++j) {
                    if (j == free) continue;
                    v[j] = (mask >> bit++) & 1U ? hi_[j] : lo_[j];
                    s += v[j];
                }
                v[free] = 1.0 - s;
                if (v[free] < lo_[free] - 1e-12 || v[free] > hi_[free] + 1e-12) continue;
                v[free] = std::clamp(v[free], lo_[free], hi_[free]);
                if (!seen(v)) out.push_back(v);
            }
        }
        std::vector<Marginal> res;
        res.reserve(out.size());
        for (auto& w : out) res.push_back(Marginal::normalized(std::move(w)));
        return res;
    }

    /// The box with component j fixed at value x (then re-tightened).
    MarginalBox pinned(std::size_t j, double x) const {
        auto lo = lo_, hi = hi_;
        lo[j] = hi[j] = x;
        return MarginalBox(std::move(lo), std::move(hi));
    }

    friend bool operator==(const MarginalBox&, const MarginalBox&) = default;

private:
    std::vector<double> lo_, hi_;
};

/// Every DGP whose marginal i lies in box_at(i); boxes follow the same
/// prefix-then-cycle convention as IndependentDgp.
struct BoxFamily {
    std::vector<MarginalBox> prefix;
    std::vector<MarginalBox> cycle;

    BoxFamily(std::vector<MarginalBox> prefix_boxes, std::vector<MarginalBox> cycle_boxes)
        : prefix(std::move(prefix_boxes)), cycle(std::move(cycle_boxes)) {
        require(!cycle.empty(), Errc::InvalidArgument, "a box family needs at least one tail box");
        const std::size_t d = cycle.front().size();
        for (const auto& b : prefix) require(b.size() == d, Errc::InvalidArgument, "boxes differ in dimension");
        for (const auto& b : cycle) require(b.size() == d, Errc::InvalidArgument, "boxes differ in dimension");
    }

    static BoxFamily iid(MarginalBox b) { return BoxFamily({}, {std::move(b)}); }

    std::size_t dimension() const { return cycle.front().size(); }

    const MarginalBox& box_at(std::size_t i) const {
        require(i >= 1, Errc::InvalidArgument, "experiments are indexed from 1");
        if (i <= prefix.size()) return prefix[i - 1];
        return cycle[(i - prefix.size() - 1) % cycle.size()];
    }

    std::size_t cycle_count(std::size_t j, std::size_t n) const {
        if (n <= prefix.size()) return 0;
        const std::size_t tail = n - prefix.size();
        return tail / cycle.size() + (j < tail % cycle.size() ? 1 : 0);
    }

    bool contains(const IndependentDgp& P) const {
        if (P.dimension() != dimension()) return false;
        const std::size_t h = joint_horizon(prefix.size(), cycle.size(), P.prefix_length(), P.period());
        for (std::size_t i = 1; i <= h; ++i)
            if (!box_at(i).contains(P.marginal_at(i))) return false;
        return true;
    }

    /// Per-component range of N^{-1} sum_{i<=N} P_i over members. Exact per
    /// component; the joint set of averages is the Minkowski mean of the boxes.
    std::vector<Interval> achievable_average(std::size_t N) const {
        require(N >= 1, Errc::InvalidArgument, "achievable average needs N >= 1");
        const std::size_t d = dimension();
        std::vector<double> lo(d, 0.0), hi(d, 0.0);
        const std::size_t m = std::min(N, prefix.size());
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < d; ++j) {
                lo[j] += prefix[i].lo()[j];
                hi[j] += prefix[i].hi()[j];
            }
        for (std::size_t c = 0; c < cycle.size(); ++c) {
            const double cnt = static_cast<double>(cycle_count(c, N));
            for (std::size_t j = 0; j < d; ++j) {
                lo[j] += cnt * cycle[c].lo()[j];
                hi[j] += cnt * cycle[c].hi()[j];
            }
        }
        std::vector<Interval> out(d);
        for (std::size_t j = 0; j < d; ++j)
            out[j] = {lo[j] / static_cast<double>(N), hi[j] / static_cast<double>(N), false};
        return out;
    }
};

struct ExplicitSet {
    std::vector<IndependentDgp> members;
};

/// Every DGP whose marginals are each one of `vertices`, chosen independently
/// per experiment (e.g. {0.6, 1}^inf).
struct VertexFamily {
    std::vector<Marginal> vertices;

    bool contains(const IndependentDgp& P) const {
        const std::size_t h = P.prefix_length() + P.period();
        for (std::size_t i = 1; i <= h; ++i) {
            const Marginal& m = P.marginal_at(i);
            if (std::none_of(vertices.begin(), vertices.end(),
                             [&](const Marginal& v) { return v.approx_equal(m, kMembershipTol); }))
                return false;
        }
        return true;
    }

    /// Uniform mixture of the vertices.
    Marginal centroid() const {
        std::vector<double> acc(vertices.front().size(), 0.0);
        for (const auto& v : vertices)
            for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += v[j];
        for (double& a : acc) a /= static_cast<double>(vertices.size());
        return Marginal::normalized(std::move(acc));
    }
};

/// A condition on the average of the first n marginals.
struct AverageConstraint {
    enum class Kind { Ball, Ellipsoid, Bonferroni };

    Kind kind = Kind::Ball;
    std::size_t n = 1;
    Marginal phi = Marginal::uniform(2);
    /// Ball: sup-norm radius. Ellipsoid: chi-square critical value.
    /// Bonferroni: squared normal critical value per outcome.
    double level = 0.0;
    double eta = kDefaultFloor;

    bool satisfied_by(const Marginal& pbar) const {
        switch (kind) {
        case Kind::Ball: return pbar.sup_distance(phi) < level;
        case Kind::Ellipsoid: return acceptance_test_q(phi, pbar, n, level, eta);
        case Kind::Bonferroni: return bonferroni_accept_q(phi, pbar, n, level, eta);
        }
        return false;
    }

    /// Interval of values of component j over averages meeting the condition.
    /// Exact for d = 2; for d > 2 a superset (merging outcomes can only lower
    /// the Pearson statistic, and the Bonferroni box is per component).
    Interval component_region(std::size_t j) const {
        const std::size_t d = phi.size();
        switch (kind) {
        case Kind::Ball: return {phi[j] - level, phi[j] + level, true};
        case Kind::Ellipsoid: return score_interval(phi[j], n, level);
        case Kind::Bonferroni:
            if (j + 1 < d) return score_interval(phi[j], n, level);
            if (d == 2) return score_interval(phi[j], n, level);
            return {0.0, 1.0, false};
        }
        return {0.0, 1.0, false};
    }
};

enum class Feasibility { Empty, NonEmpty, MaybeNonEmpty };

struct ConstrainedFamily {
    BoxFamily base;
    std::vector<AverageConstraint> constraints;

    std::size_t dimension() const { return base.dimension(); }

    bool contains(const IndependentDgp& P) const {
        if (!base.contains(P)) return false;
        for (const auto& c : constraints)
            if (!c.satisfied_by(average_sample_marginals(P, c.n))) return false;
        return true;
    }

    /// Whether some member satisfies every constraint. Exact for one
    /// constraint on binary outcomes; otherwise NonEmpty is weakened to
    /// MaybeNonEmpty since the check intersects per-component projections.
    Feasibility feasibility() const {
        const std::size_t d = dimension();
        for (const auto& c : constraints) {
            const auto ach = base.achievable_average(c.n);
            for (std::size_t j = 0; j < d; ++j) {
                Interval region = c.component_region(j);
                if (!ach[j].intersects(region)) return Feasibility::Empty;
            }
        }
        if (d == 2 && constraints.size() <= 1) return Feasibility::NonEmpty;
        return Feasibility::MaybeNonEmpty;
    }
};

struct DgpFamily;

struct UnionFamily {
    std::size_t d = 2;
    std::vector<DgpFamily> branches;
};

struct DgpFamily {
    using Variant = std::variant<BoxFamily, ExplicitSet, VertexFamily, ConstrainedFamily, UnionFamily>;
    Variant v;

    DgpFamily(BoxFamily f) : v(std::move(f)) {}
    DgpFamily(ExplicitSet f) : v(std::move(f)) {
        const auto& m = std::get<ExplicitSet>(v).members;
        require(!m.empty(), Errc::InvalidArgument, "an explicit set needs at least one member");
        for (const auto& p : m)
            require(p.dimension() == m.front().dimension(), Errc::InvalidArgument, "explicit members differ in dimension");
    }
    DgpFamily(VertexFamily f) : v(std::move(f)) {
        const auto& vs = std::get<VertexFamily>(v).vertices;
        require(!vs.empty(), Errc::InvalidArgument, "a vertex family needs at least one vertex");
        for (const auto& p : vs)
            require(p.size() == vs.front().size(), Errc::InvalidArgument, "vertices differ in dimension");
    }
    DgpFamily(ConstrainedFamily f) : v(std::move(f)) {}
    DgpFamily(UnionFamily f) : v(std::move(f)) {
        for (const auto& b : std::get<UnionFamily>(v).branches)
            require(b.dimension() == std::get<UnionFamily>(v).d, Errc::InvalidArgument, "union branches differ in dimension");
    }

    static DgpFamily empty(std::size_t d) { return DgpFamily(UnionFamily{d, {}}); }
    static DgpFamily singleton(IndependentDgp P) { return DgpFamily(ExplicitSet{{std::move(P)}}); }
    static DgpFamily make_union(std::vector<DgpFamily> branches) {
        require(!branches.empty(), Errc::InvalidArgument, "use DgpFamily::empty for an empty union");
        const std::size_t d = branches.front().dimension();
        return DgpFamily(UnionFamily{d, std::move(branches)});
    }

    std::size_t dimension() const {
        return std::visit(
            [](const auto& f) -> std::size_t {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, BoxFamily> || std::is_same_v<T, ConstrainedFamily>)
                    return f.dimension();
                else if constexpr (std::is_same_v<T, ExplicitSet>)
                    return f.members.front().dimension();
                else if constexpr (std::is_same_v<T, VertexFamily>)
                    return f.vertices.front().size();
                else
                    return f.d;
            },
            v);
    }

    template <class T> bool is() const { return std::holds_alternative<T>(v); }
    template <class T> const T& as() const { return std::get<T>(v); }
};

inline bool family_contains(const DgpFamily& F, const IndependentDgp& P) {
    if (F.dimension() != P.dimension()) return false;
    return std::visit(
        [&](const auto& f) -> bool {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, ExplicitSet>) {
                return std::any_of(f.members.begin(), f.members.end(),
                                   [&](const IndependentDgp& m) { return same_dgp(m, P, kMembershipTol); });
            } else if constexpr (std::is_same_v<T, UnionFamily>) {
                return std::any_of(f.branches.begin(), f.branches.end(),
                                   [&](const DgpFamily& b) { return family_contains(b, P); });
            } else {
                return f.contains(P);
            }
        },
        F.v);
}

/// Emptiness as far as it can be decided: Empty is always exact.
inline Feasibility family_feasibility(const DgpFamily& F) {
    if (F.is<ConstrainedFamily>()) return F.as<ConstrainedFamily>().feasibility();
    if (F.is<UnionFamily>()) {
        bool maybe = false;
        for (const auto& b : F.as<UnionFamily>().branches) {
            const Feasibility fb = family_feasibility(b);
            if (fb == Feasibility::NonEmpty) return Feasibility::NonEmpty;
            if (fb == Feasibility::MaybeNonEmpty) maybe = true;
        }
        return maybe ? Feasibility::MaybeNonEmpty : Feasibility::Empty;
    }
    return Feasibility::NonEmpty;
}

} // namespace robust
