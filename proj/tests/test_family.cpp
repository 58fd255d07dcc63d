#include <gtest/gtest.h>

#include <cmath>

#include "robust/family.hpp"
#include "robust/lp.hpp"
#include "robust/rng.hpp"
#include "robust/stats.hpp"

using namespace robust;

namespace {

MarginalBox random_box(Rng& rng, std::size_t d) {
    std::vector<double> w(d);
    double s = 0.0;
    for (double& x : w) s += (x = 0.05 + rng.uniform01());
    std::vector<double> lo(d), hi(d);
    for (std::size_t j = 0; j < d; ++j) {
        const double q = w[j] / s;
        lo[j] = q * (1.0 - rng.uniform01());
        hi[j] = q + (1.0 - q) * rng.uniform01();
    }
    return MarginalBox(lo, hi);
}

// min f.p over {lo <= p <= hi, sum p = 1} by LP.
double lp_min(const MarginalBox& b, const std::vector<double>& f) {
    LinearProgram lp;
    lp.num_vars = b.size();
    for (double v : f) lp.objective.push_back(-v);
    std::vector<double> ones(b.size(), 1.0);
    lp.add_row(ones, RowSense::Eq, 1.0);
    for (std::size_t j = 0; j < b.size(); ++j) {
        std::vector<double> e(b.size(), 0.0);
        e[j] = 1.0;
        lp.add_row(e, RowSense::Ge, b.lo()[j]);
        lp.add_row(e, RowSense::Le, b.hi()[j]);
    }
    const auto r = solve_lp(lp);
    EXPECT_EQ(r.status, LpStatus::Optimal);
    return -r.value;
}

} // namespace

TEST(MarginalBox, BinaryShorthandAndTightening) {
    const auto b = MarginalBox::binary(0.6, 1.0);
    EXPECT_NEAR(b.lo()[1], 0.6, 1e-15);
    EXPECT_NEAR(b.hi()[0], 0.4, 1e-15);
    // Upper bounds that cannot all be reached are tightened against the simplex.
    const MarginalBox t({0.5, 0.0, 0.0}, {1.0, 1.0, 1.0});
    EXPECT_NEAR(t.hi()[1], 0.5, 1e-15);
    EXPECT_THROW(MarginalBox({0.6, 0.6}, {1.0, 1.0}), Error);
    EXPECT_THROW(MarginalBox({0.0, 0.0}, {0.3, 0.3}), Error);
}

TEST(MarginalBox, MinLinearMatchesLp) {
    Rng rng(3);
    for (int t = 0; t < 300; ++t) {
        const std::size_t d = 2 + rng.below(5);
        const auto b = random_box(rng, d);
        std::vector<double> f(d);
        for (double& x : f) x = rng.uniform(-1, 1);
        EXPECT_NEAR(b.min_linear(f), lp_min(b, f), 1e-9);
    }
}

TEST(MarginalBox, VerticesAreFeasibleAndAttainMin) {
    Rng rng(4);
    for (int t = 0; t < 200; ++t) {
        const std::size_t d = 2 + rng.below(4);
        const auto b = random_box(rng, d);
        const auto vs = b.vertices();
        ASSERT_FALSE(vs.empty());
        for (const auto& v : vs) EXPECT_TRUE(b.contains(v, 1e-12));
        std::vector<double> f(d);
        for (double& x : f) x = rng.uniform(-1, 1);
        double m = INFINITY;
        for (const auto& v : vs) {
            double s = 0.0;
            for (std::size_t j = 0; j < d; ++j) s += f[j] * v[j];
            m = std::min(m, s);
        }
        EXPECT_NEAR(m, b.min_linear(f), 1e-9);
    }
}

TEST(BoxFamily, ContainsAndAchievableAverage) {
    const BoxFamily alt({}, {MarginalBox::binary(0.6, 0.7), MarginalBox::binary(0.9, 1.0)});
    EXPECT_TRUE(alt.contains(IndependentDgp::periodic({Marginal::bernoulli(0.65), Marginal::bernoulli(1.0)})));
    EXPECT_FALSE(alt.contains(IndependentDgp::iid(Marginal::bernoulli(0.65))));
    const auto avg = alt.achievable_average(3);
    EXPECT_NEAR(avg[1].lo, (0.6 + 0.9 + 0.6) / 3.0, 1e-15);
    EXPECT_NEAR(avg[1].hi, (0.7 + 1.0 + 0.7) / 3.0, 1e-15);
}

TEST(BoxFamily, AchievableAverageBracketsMembers) {
    Rng rng(6);
    for (int t = 0; t < 100; ++t) {
        const std::size_t d = 2 + rng.below(3);
        std::vector<MarginalBox> pre, cyc;
        for (std::size_t i = 0, m = rng.below(3); i < m; ++i) pre.push_back(random_box(rng, d));
        for (std::size_t i = 0, m = 1 + rng.below(3); i < m; ++i) cyc.push_back(random_box(rng, d));
        const BoxFamily F(pre, cyc);
        const std::size_t N = 1 + rng.below(20);
        const auto avg = F.achievable_average(N);
        // A member built from box vertices.
        std::vector<Marginal> mp, mc;
        for (const auto& b : pre) mp.push_back(b.vertices()[rng.below(b.vertices().size())]);
        for (const auto& b : cyc) mc.push_back(b.vertices()[rng.below(b.vertices().size())]);
        const IndependentDgp P(mp, mc);
        ASSERT_TRUE(F.contains(P));
        const Marginal pbar = average_sample_marginals(P, N);
        for (std::size_t j = 0; j < d; ++j) EXPECT_TRUE(avg[j].contains(pbar[j], 1e-12));
    }
}

TEST(VertexFamily, ContainsAndCentroid) {
    const VertexFamily V{{Marginal::bernoulli(0.6), Marginal::bernoulli(1.0)}};
    EXPECT_TRUE(V.contains(IndependentDgp::periodic({Marginal::bernoulli(0.6), Marginal::bernoulli(1.0)})));
    EXPECT_FALSE(V.contains(IndependentDgp::iid(Marginal::bernoulli(0.8))));
    EXPECT_NEAR(V.centroid()[1], 0.8, 1e-15);
}

TEST(ConstrainedFamily, BinaryFeasibilityIsExact) {
    AverageConstraint c;
    c.kind = AverageConstraint::Kind::Ball;
    c.n = 10;
    c.phi = Marginal::bernoulli(1.0 / 3.0);
    c.level = 0.05;
    const ConstrainedFamily far{BoxFamily::iid(MarginalBox::binary(0.6, 1.0)), {c}};
    EXPECT_EQ(far.feasibility(), Feasibility::Empty);
    const ConstrainedFamily near{BoxFamily::iid(MarginalBox::binary(0.3, 1.0)), {c}};
    EXPECT_EQ(near.feasibility(), Feasibility::NonEmpty);
    EXPECT_TRUE(near.contains(IndependentDgp::iid(Marginal::bernoulli(0.34))));
    EXPECT_FALSE(near.contains(IndependentDgp::iid(Marginal::bernoulli(0.39))));
    // Open ball: the boundary itself is excluded.
    c.phi = Marginal::bernoulli(0.25);
    const ConstrainedFamily edge{BoxFamily::iid(MarginalBox::binary(0.3, 1.0)), {c}};
    EXPECT_EQ(edge.feasibility(), Feasibility::Empty);
}

TEST(ConstrainedFamily, HigherDimensionIsOuterApproximation) {
    AverageConstraint c;
    c.kind = AverageConstraint::Kind::Ellipsoid;
    c.n = 100;
    c.phi = Marginal({0.2, 0.3, 0.5});
    c.level = chi_square_quantile(2, 0.05);
    const ConstrainedFamily F{BoxFamily::iid(MarginalBox::simplex(3)), {c}};
    EXPECT_EQ(F.feasibility(), Feasibility::MaybeNonEmpty);
    EXPECT_EQ(family_feasibility(DgpFamily(F)), Feasibility::MaybeNonEmpty);
}

TEST(DgpFamily, UnionValidation) {
    EXPECT_THROW(DgpFamily::make_union({DgpFamily(BoxFamily::iid(MarginalBox::simplex(2))),
                                        DgpFamily(BoxFamily::iid(MarginalBox::simplex(3)))}),
                 Error);
    EXPECT_THROW(DgpFamily(ExplicitSet{}), Error);
    EXPECT_EQ(family_feasibility(DgpFamily::empty(2)), Feasibility::Empty);
    EXPECT_FALSE(family_contains(DgpFamily::empty(2), IndependentDgp::iid(Marginal::uniform(2))));
}
