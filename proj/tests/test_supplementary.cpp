#include <gtest/gtest.h>

#include <cmath>

#include "robust/decision.hpp"
#include "robust/family.hpp"
#include "robust/harness/parallel.hpp"
#include "robust/rng.hpp"
#include "robust/updating.hpp"

using namespace robust;

// Larger-N runs of the retention and failure properties.

namespace {

DgpFamily box(double lo, double hi) { return DgpFamily(BoxFamily::iid(MarginalBox::binary(lo, hi))); }
IndependentDgp bern(double p) { return IndependentDgp::iid(Marginal::bernoulli(p)); }
DgpFamily movie_family() { return DgpFamily::make_union({box(0.6, 1.0), DgpFamily::singleton(bern(1.0 / 3.0))}); }

struct Case {
    const char* name;
    DgpFamily family;
    IndependentDgp truth;
};

std::vector<Case> battery() {
    std::vector<Case> out;
    out.push_back({"movie_truth", movie_family(), bern(1.0 / 3.0)});
    out.push_back({"alternating_in_box", movie_family(),
                   IndependentDgp::periodic({Marginal::bernoulli(0.6), Marginal::bernoulli(1.0)})});
    out.push_back({"prefix_then_cycle", DgpFamily(BoxFamily::iid(MarginalBox::binary(0.2, 0.7))),
                   IndependentDgp({Marginal::bernoulli(0.2), Marginal::bernoulli(0.7)},
                                  {Marginal::bernoulli(0.3), Marginal::bernoulli(0.5), Marginal::bernoulli(0.7)})});
    out.push_back({"three_outcomes", DgpFamily(BoxFamily::iid(MarginalBox({0.1, 0.1, 0.1}, {0.8, 0.8, 0.8}))),
                   IndependentDgp::periodic({Marginal({0.1, 0.1, 0.8}), Marginal({0.8, 0.1, 0.1}),
                                             Marginal({0.3, 0.5, 0.2})})});
    return out;
}

} // namespace

TEST(Supplementary, AverageThenUpdateRetainsNonIdenticalTruths) {
    const std::size_t N = 2000, reps = 500;
    for (const auto& c : battery()) {
        ASSERT_TRUE(family_contains(c.family, c.truth)) << c.name;
        std::vector<int> kept(reps);
        harness::parallel_for(reps, [&](std::size_t r) {
            const auto data = sample(c.truth, N, derive_seed(404, r));
            kept[r] = family_contains(average_then_update(c.family, data, UpdateParams{}), c.truth) ? 1 : 0;
        });
        int total = 0;
        for (int k : kept) total += k;
        EXPECT_GE(total, 495) << c.name;
    }
}

TEST(Supplementary, MaxLikelihoodKeepsExcludingTruth) {
    const std::size_t reps = 40;
    int excluded = 0;
    for (std::size_t r = 0; r < reps; ++r) {
        const auto data = sample(bern(1.0 / 3.0), 10000, derive_seed(405, r));
        excluded += family_contains(max_likelihood_update(movie_family(), data), bern(1.0 / 3.0)) ? 0 : 1;
    }
    EXPECT_EQ(excluded, static_cast<int>(reps));
}

TEST(Supplementary, BayesPosteriorMassOnTruthVanishes) {
    // Vertex encoding of the box branch plus the truth as its own branch.
    const DgpFamily F = DgpFamily::make_union(
        {DgpFamily(VertexFamily{{Marginal::bernoulli(0.6), Marginal::bernoulli(1.0)}}),
         DgpFamily(VertexFamily{{Marginal::bernoulli(1.0 / 3.0)}})});
    int small = 0;
    const int reps = 100;
    for (int r = 0; r < reps; ++r) {
        const auto post = bayesian_posterior(F, sample(bern(1.0 / 3.0), 1000, derive_seed(406, r)));
        small += post.weights.mass[1] < 1e-6 ? 1 : 0;
    }
    EXPECT_EQ(small, reps);
}

TEST(Supplementary, EmpiricalFrequencyTracksAverageMarginal) {
    const auto P = IndependentDgp::periodic({Marginal::bernoulli(0.2), Marginal::bernoulli(0.9), Marginal::bernoulli(0.4)});
    for (std::size_t N : {1000u, 10000u, 100000u}) {
        double worst = 0.0;
        for (int r = 0; r < 20; ++r) {
            const Marginal phi = empirical_distribution(sample(P, N, derive_seed(407, r)), 2);
            worst = std::max(worst, std::abs(phi[1] - average_sample_marginals(P, N)[1]));
        }
        // Five standard deviations of a frequency with variance at most 1/4.
        EXPECT_LT(worst, 5.0 * 0.5 / std::sqrt(static_cast<double>(N))) << N;
    }
}
