#include <gtest/gtest.h>

#include <cmath>

#include "robust/lp.hpp"
#include "robust/rng.hpp"

using namespace robust;

namespace {

// max c.x over {x >= 0, A x <= b} in two variables by enumerating all
// pairwise intersections of the constraint lines (axes included).
double vertex_enumeration_2d(const std::vector<std::array<double, 2>>& A, const std::vector<double>& b,
                             std::array<double, 2> c) {
    std::vector<std::array<double, 3>> lines;
    for (std::size_t i = 0; i < A.size(); ++i) lines.push_back({A[i][0], A[i][1], b[i]});
    lines.push_back({1, 0, 0});
    lines.push_back({0, 1, 0});
    double best = -INFINITY;
    for (std::size_t i = 0; i < lines.size(); ++i)
        for (std::size_t j = i + 1; j < lines.size(); ++j) {
            const double det = lines[i][0] * lines[j][1] - lines[i][1] * lines[j][0];
            if (std::abs(det) < 1e-12) continue;
            const double x = (lines[i][2] * lines[j][1] - lines[i][1] * lines[j][2]) / det;
            const double y = (lines[i][0] * lines[j][2] - lines[i][2] * lines[j][0]) / det;
            if (x < -1e-9 || y < -1e-9) continue;
            bool ok = true;
            for (std::size_t k = 0; k < A.size() && ok; ++k) ok = A[k][0] * x + A[k][1] * y <= b[k] + 1e-9;
            if (ok) best = std::max(best, c[0] * x + c[1] * y);
        }
    return best;
}

} // namespace

TEST(SolveLp, TextbookProblem) {
    // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6).
    LinearProgram lp;
    lp.num_vars = 2;
    lp.objective = {3, 5};
    lp.add_row({1, 0}, RowSense::Le, 4);
    lp.add_row({0, 2}, RowSense::Le, 12);
    lp.add_row({3, 2}, RowSense::Le, 18);
    const auto r = solve_lp(lp);
    ASSERT_EQ(r.status, LpStatus::Optimal);
    EXPECT_NEAR(r.value, 36.0, 1e-10);
    EXPECT_NEAR(r.x[0], 2.0, 1e-10);
    EXPECT_NEAR(r.x[1], 6.0, 1e-10);
}

TEST(SolveLp, InfeasibleAndUnbounded) {
    LinearProgram lp;
    lp.num_vars = 1;
    lp.objective = {1};
    lp.add_row({1}, RowSense::Le, 1);
    lp.add_row({1}, RowSense::Ge, 2);
    EXPECT_EQ(solve_lp(lp).status, LpStatus::Infeasible);

    LinearProgram u;
    u.num_vars = 2;
    u.objective = {1, 1};
    u.add_row({1, -1}, RowSense::Le, 1);
    EXPECT_EQ(solve_lp(u).status, LpStatus::Unbounded);
}

TEST(SolveLp, EqualityAndGreaterRows) {
    // min x + y s.t. x + y >= 1, x - y = 0.2 -> 1.
    LinearProgram lp;
    lp.num_vars = 2;
    lp.objective = {-1, -1};
    lp.add_row({1, 1}, RowSense::Ge, 1);
    lp.add_row({1, -1}, RowSense::Eq, 0.2);
    const auto r = solve_lp(lp);
    ASSERT_EQ(r.status, LpStatus::Optimal);
    EXPECT_NEAR(-r.value, 1.0, 1e-10);
    EXPECT_NEAR(r.x[0], 0.6, 1e-10);
}

TEST(SolveLp, RandomTwoVariableProblemsMatchVertexEnumeration) {
    Rng rng(41);
    for (int t = 0; t < 300; ++t) {
        const std::size_t m = 1 + rng.below(5);
        std::vector<std::array<double, 2>> A;
        std::vector<double> b;
        LinearProgram lp;
        lp.num_vars = 2;
        const std::array<double, 2> c{rng.uniform(-1, 1), rng.uniform(-1, 1)};
        lp.objective = {c[0], c[1]};
        for (std::size_t i = 0; i < m; ++i) {
            A.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1)});
            b.push_back(rng.uniform(0.1, 2));
            lp.add_row({A.back()[0], A.back()[1]}, RowSense::Le, b.back());
        }
        // Box to keep the problem bounded.
        A.push_back({1, 0});
        b.push_back(3);
        A.push_back({0, 1});
        b.push_back(3);
        lp.add_row({1, 0}, RowSense::Le, 3);
        lp.add_row({0, 1}, RowSense::Le, 3);
        const auto r = solve_lp(lp);
        ASSERT_EQ(r.status, LpStatus::Optimal);
        EXPECT_NEAR(r.value, vertex_enumeration_2d(A, b, c), 1e-8);
    }
}

TEST(InConvexHull, Examples) {
    const std::vector<std::vector<double>> pts{{0.8, 0.2}, {0.4, 0.6}};
    EXPECT_TRUE(in_convex_hull(pts, std::vector<double>{0.6, 0.4}));
    EXPECT_FALSE(in_convex_hull(pts, std::vector<double>{0.3, 0.7}));
    const std::vector<std::vector<double>> tri{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    EXPECT_TRUE(in_convex_hull(tri, std::vector<double>{0.2, 0.3, 0.5}));
    EXPECT_FALSE(in_convex_hull(tri, std::vector<double>{0.5, 0.6, -0.1}));
    EXPECT_FALSE(in_convex_hull({}, std::vector<double>{1.0}));
}
