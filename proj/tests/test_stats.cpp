#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "robust/dgp.hpp"
#include "robust/linalg.hpp"
#include "robust/rng.hpp"
#include "robust/stats.hpp"

using namespace robust;

namespace {

Marginal random_marginal(Rng& rng, std::size_t d, double lo = 0.0) {
    std::vector<double> w(d);
    for (double& x : w) x = lo + rng.uniform01();
    return Marginal::normalized(w);
}

IndependentDgp random_nonidentical(Rng& rng, std::size_t d) {
    std::vector<Marginal> cyc;
    const std::size_t period = 2 + rng.below(3);
    for (std::size_t i = 0; i < period; ++i) cyc.push_back(random_marginal(rng, d, 0.05));
    return IndependentDgp({}, cyc);
}

SquareMatrix mat(std::initializer_list<std::initializer_list<double>> rows) {
    SquareMatrix m(rows.size());
    std::size_t r = 0;
    for (const auto& row : rows) {
        std::size_t c = 0;
        for (double v : row) m(r, c++) = v;
        ++r;
    }
    return m;
}

} // namespace

TEST(Linalg, CholeskyAndQuadraticForm) {
    const auto a = mat({{4, 2}, {2, 3}});
    const auto l = cholesky(a);
    ASSERT_TRUE(l);
    // a^{-1} = [[3,-2],[-2,4]]/8; x = (1,1) gives 3/8.
    const std::vector<double> x{1.0, 1.0};
    EXPECT_NEAR(inverse_quadratic_form(*l, x), 3.0 / 8.0, 1e-14);
    EXPECT_FALSE(cholesky(mat({{1, 2}, {2, 1}})));
}

TEST(Linalg, JacobiEigenvalues) {
    const auto e = symmetric_eigenvalues(mat({{1, 2}, {2, 1}}));
    ASSERT_EQ(e.size(), 2u);
    EXPECT_NEAR(e[0], -1.0, 1e-12);
    EXPECT_NEAR(e[1], 3.0, 1e-12);
    const auto e3 = symmetric_eigenvalues(mat({{2, -1, 0}, {-1, 2, -1}, {0, -1, 2}}));
    EXPECT_NEAR(e3[0], 2 - std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(e3[1], 2.0, 1e-12);
    EXPECT_NEAR(e3[2], 2 + std::sqrt(2.0), 1e-12);
}

TEST(PsdCheck, Examples) {
    EXPECT_TRUE(psd_check(SquareMatrix(3, 0.0)));
    EXPECT_FALSE(psd_check(mat({{1, 2}, {2, 1}})));
}

TEST(MultinomialCovariance, Examples) {
    const auto b = multinomial_covariance(Marginal({0.6, 0.4}));
    ASSERT_EQ(b.dim(), 1u);
    EXPECT_NEAR(b(0, 0), 0.24, 1e-15);
    const auto z = multinomial_covariance(Marginal::degenerate(4, 0));
    EXPECT_EQ(z.max_abs(), 0.0);
    const auto u = multinomial_covariance(Marginal::uniform(3));
    EXPECT_NEAR(u(0, 0), 2.0 / 9.0, 1e-15);
    EXPECT_NEAR(u(0, 1), -1.0 / 9.0, 1e-15);
    EXPECT_NEAR(u(1, 1), 2.0 / 9.0, 1e-15);
}

TEST(MultinomialCovariance, MinEigenvalueBoundedByMinComponent) {
    // The bound is on the nonzero spectrum of the full d x d matrix
    // diag(p) - p p' (eigenvalues interlace with the sorted p). The reduced
    // (d-1) block returned here is positive definite but can sit below
    // min_j p_j (d = 2 gives p1 p2).
    Rng rng(17);
    for (int t = 0; t < 500; ++t) {
        const std::size_t d = 2 + rng.below(6);
        const Marginal p = random_marginal(rng, d, 0.01);
        const double pmin = *std::min_element(p.vec().begin(), p.vec().end());
        const auto red = multinomial_covariance(p);
        EXPECT_GT(min_eigenvalue(red), 0.0);
        // Rebuild the full matrix from the reduced one: rows sum to zero.
        SquareMatrix full(d, 0.0);
        for (std::size_t k = 0; k + 1 < d; ++k)
            for (std::size_t l = 0; l + 1 < d; ++l) full(k, l) = red(k, l);
        for (std::size_t k = 0; k + 1 < d; ++k) {
            double s = 0.0;
            for (std::size_t l = 0; l + 1 < d; ++l) s += red(k, l);
            full(k, d - 1) = full(d - 1, k) = -s;
            full(d - 1, d - 1) += s;
        }
        const auto ev = symmetric_eigenvalues(full);
        EXPECT_NEAR(ev[0], 0.0, 1e-12);
        EXPECT_GE(ev[1], pmin * (1.0 - 1e-9) - 1e-15);
    }
}

TEST(AverageCovariance, Examples) {
    const auto P = IndependentDgp::iid(Marginal({0.2, 0.3, 0.5}));
    const auto a = average_covariance(P, 7), m = multinomial_covariance(P.cycle().front());
    EXPECT_LT((a - m).max_abs(), 1e-15);
    const auto alt = IndependentDgp::periodic({Marginal::bernoulli(0.6), Marginal::bernoulli(1.0)});
    EXPECT_NEAR(average_covariance(alt, 2)(0, 0), 0.12, 1e-15);
    const auto per = IndependentDgp::periodic({Marginal({0.2, 0.8}), Marginal({0.8, 0.2})});
    EXPECT_NEAR(average_covariance(per, 2)(0, 0), 0.16, 1e-15);
}

TEST(GramDifference, Examples) {
    EXPECT_LT(gram_difference(IndependentDgp::iid(Marginal::uniform(3)), 10).max_abs(), 1e-15);
    const auto alt = IndependentDgp::periodic({Marginal::bernoulli(0.6), Marginal::bernoulli(1.0)});
    EXPECT_NEAR(gram_difference(alt, 2)(0, 0), 0.04, 1e-15);
}

TEST(GramDifference, PsdOnRandomDgps) {
    Rng rng(23);
    const std::size_t ds[] = {2, 3, 5}, Ns[] = {2, 10, 100};
    for (int t = 0; t < 1000; ++t) {
        const auto P = random_nonidentical(rng, ds[t % 3]);
        const auto g = gram_difference(P, Ns[(t / 3) % 3]);
        EXPECT_GE(min_eigenvalue(g), -1e-10);
        EXPECT_TRUE(psd_check(g));
    }
}

TEST(GramDifference, StatisticOrdering) {
    // Sigma_hat = Sigma_bar + G with G PSD, so x' Sigma_hat^{-1} x <= x' Sigma_bar^{-1} x.
    Rng rng(29);
    for (int t = 0; t < 2000; ++t) {
        const std::size_t d = 2 + rng.below(4);
        const auto P = random_nonidentical(rng, d);
        const std::size_t N = 2 + rng.below(99);
        const auto sbar = average_covariance(P, N);
        const auto shat = multinomial_covariance(average_sample_marginals(P, N));
        std::vector<double> x(d - 1);
        for (double& v : x) v = rng.uniform(-1.0, 1.0);
        EXPECT_LE(quadratic_statistic(x, shat), quadratic_statistic(x, sbar) + 1e-9);
    }
}

TEST(ChiSquareQuantile, MatchesQuadratureOracle) {
    EXPECT_NEAR(chi_square_quantile(1, 0.05), oracle::chi2_quantile(1, 0.05), 1e-6);
    EXPECT_NEAR(chi_square_quantile(2, 0.05), oracle::chi2_quantile(2, 0.05), 1e-6);
    EXPECT_NEAR(chi_square_quantile(1, 0.5), oracle::chi2_quantile(1, 0.5), 1e-6);
    EXPECT_NEAR(chi_square_quantile(1, 0.05), 3.8415, 1e-3);
    EXPECT_NEAR(chi_square_quantile(2, 0.05), 5.9915, 1e-3);
    EXPECT_NEAR(chi_square_quantile(1, 0.5), 0.4549, 1e-3);
    for (std::size_t df : {3u, 5u, 9u})
        for (double a : {0.01, 0.1, 0.9}) EXPECT_NEAR(chi_square_quantile(df, a), oracle::chi2_quantile(df, a), 1e-5);
}

TEST(ChiSquareQuantile, MonotoneGrid) {
    const double alphas[] = {0.001, 0.01, 0.05, 0.1, 0.3, 0.5, 0.8, 0.99};
    for (std::size_t df = 1; df <= 10; ++df)
        for (std::size_t i = 0; i + 1 < std::size(alphas); ++i) {
            EXPECT_GT(chi_square_quantile(df, alphas[i]), chi_square_quantile(df, alphas[i + 1]));
            EXPECT_LT(chi_square_quantile(df, alphas[i]), chi_square_quantile(df + 1, alphas[i]));
        }
}

TEST(NormalQuantile, MatchesQuadrature) {
    for (double a : {0.005, 0.025, 0.05, 0.2}) {
        const double z = normal_upper_quantile(a);
        EXPECT_NEAR(1.0 - oracle::normal_cdf(z), a, 1e-9);
    }
    EXPECT_NEAR(normal_upper_quantile(0.025), 1.959963984540054, 1e-9);
}

TEST(AcceptanceTest, HandStatistic) {
    const double s = acceptance_statistic(Marginal::bernoulli(0.5), Marginal::bernoulli(0.4), 100);
    EXPECT_NEAR(s, 100 * 0.01 / 0.24, 1e-9);
    EXPECT_FALSE(acceptance_test(Marginal::bernoulli(0.5), Marginal::bernoulli(0.4), 100, 0.05));
    EXPECT_TRUE(acceptance_test(Marginal::bernoulli(0.5), Marginal::bernoulli(0.45), 100, 0.05));
    const Marginal p({0.2, 0.5, 0.3});
    EXPECT_EQ(acceptance_statistic(p, p, 1000), 0.0);
    EXPECT_TRUE(acceptance_test(p, p, 1000, 0.05));
}

TEST(AcceptanceTest, BinaryInversionIsWilson) {
    // Scan pbar on a fine grid and compare the accepted range to the interval.
    for (double phi : {0.0, 0.13, 0.5, 0.77, 1.0})
        for (std::size_t N : {10u, 100u, 1000u}) {
            const Interval w = wilson_interval(phi, N, 0.05);
            const double c = chi_square_quantile(1, 0.05);
            const auto inv = oracle::score_inversion(phi, static_cast<double>(N), c);
            EXPECT_NEAR(w.lo, inv.first, 1e-9);
            EXPECT_NEAR(w.hi, inv.second, 1e-9);
            for (int k = 1; k < 400; ++k) {
                const double p = k / 400.0;
                if (std::abs(p - w.lo) < 1e-7 || std::abs(p - w.hi) < 1e-7) continue;
                EXPECT_EQ(acceptance_test(Marginal::bernoulli(phi), Marginal::bernoulli(p), N, 0.05, 0.0), w.contains(p))
                    << phi << " " << N << " " << p;
            }
        }
}

TEST(WilsonInterval, Examples) {
    const Interval w = wilson_interval(0.5, 100, 0.05);
    EXPECT_NEAR(w.lo, 0.4038, 1e-3);
    EXPECT_NEAR(w.hi, 0.5962, 1e-3);
    const Interval z = wilson_interval(0.0, 1000000, 0.05);
    EXPECT_NEAR(z.lo, 0.0, 1e-4);
    EXPECT_NEAR(z.hi, 0.0, 1e-4);
    for (double phi : {0.0, 0.2, 0.5, 0.9})
        for (std::size_t N : {5u, 50u, 5000u}) {
            const auto tb = oracle::wilson(phi, N, normal_upper_quantile(0.025));
            const Interval v = wilson_interval(phi, N, 0.05);
            EXPECT_NEAR(v.lo, tb.first, 1e-12);
            EXPECT_NEAR(v.hi, tb.second, 1e-12);
        }
}

TEST(Bonferroni, LevelsAndContainment) {
    EXPECT_NEAR(bonferroni_critical(2, 0.05), std::pow(normal_upper_quantile(0.025), 2), 1e-12);
    // d = 3: two intervals at level 0.975 each.
    EXPECT_NEAR(bonferroni_critical(3, 0.05), std::pow(normal_upper_quantile(0.0125), 2), 1e-12);
    // d = 2: identical to the chi-square ellipsoid.
    Rng rng(31);
    for (int t = 0; t < 2000; ++t) {
        const Marginal phi = Marginal::bernoulli(rng.uniform01()), pbar = Marginal::bernoulli(rng.uniform(0.01, 0.99));
        const std::size_t N = 1 + rng.below(500);
        const bool a = acceptance_test(phi, pbar, N, 0.05), b = bonferroni_accept(phi, pbar, N, 0.05);
        if (std::abs(acceptance_statistic(phi, pbar, N) - chi_square_quantile(1, 0.05)) > 1e-9) { EXPECT_EQ(a, b); }
    }
}

TEST(Bonferroni, AcceptsMoreOftenThanEllipsoidAtD3) {
    // Frequency comparison under the true DGP over sampled data.
    const auto P = IndependentDgp::iid(Marginal({0.2, 0.5, 0.3}));
    const std::size_t N = 200;
    int ell = 0, bon = 0;
    for (int r = 0; r < 10000; ++r) {
        const Marginal phi = empirical_distribution(sample(P, N, derive_seed(5, r)), 3);
        ell += acceptance_test(phi, P.cycle().front(), N, 0.05) ? 1 : 0;
        bon += bonferroni_accept(phi, P.cycle().front(), N, 0.05) ? 1 : 0;
    }
    EXPECT_GE(bon, ell - 100);
    EXPECT_GE(bon / 10000.0, 0.93);
}

TEST(AcceptanceTest, CltSanity) {
    const auto P = IndependentDgp::periodic({Marginal::bernoulli(0.3), Marginal::bernoulli(0.7), Marginal::bernoulli(0.5)});
    const std::size_t N = 2000;
    const auto sbar = average_covariance(P, N);
    const Marginal pbar = average_sample_marginals(P, N);
    std::vector<double> stats;
    for (int r = 0; r < 10000; ++r) {
        const Marginal phi = empirical_distribution(sample(P, N, derive_seed(77, r)), 2);
        const std::vector<double> x{phi[0] - pbar[0]};
        stats.push_back(static_cast<double>(N) * quadratic_statistic(x, sbar));
    }
    std::sort(stats.begin(), stats.end());
    EXPECT_NEAR(stats[9500], chi_square_quantile(1, 0.05), 0.5);
}
