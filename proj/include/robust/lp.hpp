#pragma once

// Dense two-phase simplex with Bland's rule. Sized for hull-membership and
// separation problems with at most a few hundred columns.

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "robust/error.hpp"

namespace robust {

enum class RowSense { Le, Ge, Eq };

/// maximize c^T x subject to rows (sense) b, x >= 0.
struct LinearProgram {
    std::size_t num_vars = 0;
    std::vector<std::vector<double>> rows;
    std::vector<RowSense> senses;
    std::vector<double> rhs;
    std::vector<double> objective;

    void add_row(std::vector<double> coeffs, RowSense sense, double b) {
        require(coeffs.size() == num_vars, Errc::InvalidArgument, "LP row has the wrong width");
        rows.push_back(std::move(coeffs));
        senses.push_back(sense);
        rhs.push_back(b);
    }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    double value = 0.0;
    std::vector<double> x;
    /// Phase-one optimum: total artificial mass left (0 when feasible).
    double infeasibility = 0.0;
};

namespace detail {

class Tableau {
public:
    Tableau(std::size_t m, std::size_t n) : m_(m), n_(n), t_((m + 1) * (n + 1), 0.0), basis_(m) {}

    double& at(std::size_t r, std::size_t c) { return t_[r * (n_ + 1) + c]; }
    double& rhs(std::size_t r) { return at(r, n_); }
    double& obj(std::size_t c) { return at(m_, c); }
    std::size_t& basis(std::size_t r) { return basis_[r]; }
    std::size_t rows() const { return m_; }
    std::size_t cols() const { return n_; }

    void pivot(std::size_t pr, std::size_t pc) {
        const double inv = 1.0 / at(pr, pc);
        for (std::size_t c = 0; c <= n_; ++c) at(pr, c) *= inv;
        for (std::size_t r = 0; r <= m_; ++r) {
            if (r == pr) continue;
            const double f = at(r, pc);
            if (f == 0.0) continue;
            for (std::size_t c = 0; c <= n_; ++c) at(r, c) -= f * at(pr, c);
        }
        basis_[pr] = pc;
    }

    /// Minimizes the objective row (reduced costs stored in row m) over the
    /// columns allowed by `usable`. Returns false if unbounded.
    bool run(const std::vector<bool>& usable, double eps) {
        for (std::size_t iter = 0; iter < 50000; ++iter) {
            std::size_t pc = n_;
            for (std::size_t c = 0; c < n_; ++c)
                if (usable[c] && obj(c) < -eps) {
                    pc = c;
                    break;
                }
            if (pc == n_) return true;
            std::size_t pr = m_;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t r = 0; r < m_; ++r) {
                const double a = at(r, pc);
                if (a <= eps) continue;
                const double ratio = rhs(r) / a;
                if (ratio < best - 1e-15 || (std::abs(ratio - best) <= 1e-15 && basis_[r] < basis_[pr])) {
                    best = ratio;
                    pr = r;
                }
            }
            if (pr == m_) return false;
            pivot(pr, pc);
        }
        throw Error(Errc::Unsupported, "simplex iteration limit reached");
    }

private:
    std::size_t m_, n_;
    std::vector<double> t_;
    std::vector<std::size_t> basis_;
};

} // namespace detail

inline LpResult solve_lp(const LinearProgram& lp, double eps = 1e-12) {
    const std::size_t m = lp.rows.size();
    const std::size_t n = lp.num_vars;
    require(lp.objective.empty() || lp.objective.size() == n, Errc::InvalidArgument, "LP objective has the wrong width");

    // Columns: originals, one slack/surplus per inequality, one artificial per row.
    std::size_t n_slack = 0;
    for (RowSense s : lp.senses) n_slack += s == RowSense::Eq ? 0 : 1;
    const std::size_t art0 = n + n_slack;
    const std::size_t total = art0 + m;
    detail::Tableau tab(m, total);

    std::size_t slack = n;
    for (std::size_t r = 0; r < m; ++r) {
        const double sign = lp.rhs[r] < 0.0 ? -1.0 : 1.0;
        for (std::size_t c = 0; c < n; ++c) tab.at(r, c) = sign * lp.rows[r][c];
        if (lp.senses[r] != RowSense::Eq) {
            tab.at(r, slack) = sign * (lp.senses[r] == RowSense::Le ? 1.0 : -1.0);
            ++slack;
        }
        tab.rhs(r) = sign * lp.rhs[r];
        tab.at(r, art0 + r) = 1.0;
        tab.basis(r) = art0 + r;
    }

    // Phase one: minimize the sum of artificials.
    for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c <= total; ++c)
            if (c < art0 || c == total) tab.at(m, c) -= tab.at(r, c);
    std::vector<bool> usable(total, true);
    tab.run(usable, eps);

    LpResult res;
    res.infeasibility = -tab.at(m, total);
    if (res.infeasibility > 1e-9) {
        res.status = LpStatus::Infeasible;
        return res;
    }
    // Drive remaining artificials out of the basis where possible.
    for (std::size_t r = 0; r < m; ++r) {
        if (tab.basis(r) < art0) continue;
        for (std::size_t c = 0; c < art0; ++c)
            if (std::abs(tab.at(r, c)) > 1e-9) {
                tab.pivot(r, c);
                break;
            }
    }
    for (std::size_t c = art0; c < total; ++c) usable[c] = false;

    // Phase two: minimize -c^T x.
    for (std::size_t c = 0; c <= total; ++c) tab.at(m, c) = 0.0;
    for (std::size_t c = 0; c < n && !lp.objective.empty(); ++c) tab.at(m, c) = -lp.objective[c];
    for (std::size_t r = 0; r < m; ++r) {
        const std::size_t b = tab.basis(r);
        const double f = tab.at(m, b);
        if (f == 0.0) continue;
        for (std::size_t c = 0; c <= total; ++c) tab.at(m, c) -= f * tab.at(r, c);
    }
    if (!tab.run(usable, eps)) {
        res.status = LpStatus::Unbounded;
        return res;
    }
    res.status = LpStatus::Optimal;
    res.x.assign(n, 0.0);
    for (std::size_t r = 0; r < m; ++r)
        if (tab.basis(r) < n) res.x[tab.basis(r)] = tab.rhs(r);
    res.value = 0.0;
    for (std::size_t c = 0; c < n && !lp.objective.empty(); ++c) res.value += lp.objective[c] * res.x[c];
    return res;
}

/// Whether `target` is a convex combination of `points`, each residual
/// within `tol`. Solved as min sum |residual| over the simplex of weights.
inline bool in_convex_hull(std::span<const std::vector<double>> points, std::span<const double> target,
                           double tol = 1e-9) {
    if (points.empty()) return false;
    const std::size_t k = points.size();
    const std::size_t dim = target.size();
    // Variables: weights (k), positive and negative residuals (2 dim).
    LinearProgram lp;
    lp.num_vars = k + 2 * dim;
    lp.objective.assign(lp.num_vars, 0.0);
    for (std::size_t j = 0; j < 2 * dim; ++j) lp.objective[k + j] = -1.0;
    for (std::size_t j = 0; j < dim; ++j) {
        std::vector<double> row(lp.num_vars, 0.0);
        for (std::size_t i = 0; i < k; ++i) row[i] = points[i][j];
        row[k + 2 * j] = 1.0;
        row[k + 2 * j + 1] = -1.0;
        lp.add_row(std::move(row), RowSense::Eq, target[j]);
    }
    std::vector<double> ones(lp.num_vars, 0.0);
    for (std::size_t i = 0; i < k; ++i) ones[i] = 1.0;
    lp.add_row(std::move(ones), RowSense::Eq, 1.0);
    const LpResult r = solve_lp(lp);
    if (r.status != LpStatus::Optimal) return false;
    for (std::size_t j = 0; j < dim; ++j)
        if (std::abs(r.x[k + 2 * j] - r.x[k + 2 * j + 1]) > tol) return false;
    return true;
}

} // namespace robust
