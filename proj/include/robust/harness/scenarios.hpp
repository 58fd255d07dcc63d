#pragma once

// Scenario drivers. Each one builds its environment from the config (with
// the documented defaults), runs its replications on derived seeds, and
// returns a report whose summary is recomputable from its records.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "robust/applied.hpp"
#include "robust/decision.hpp"
#include "robust/dgp.hpp"
#include "robust/error.hpp"
#include "robust/family.hpp"
#include "robust/harness/config.hpp"
#include "robust/harness/parallel.hpp"
#include "robust/harness/report.hpp"
#include "robust/io.hpp"
#include "robust/rng.hpp"
#include "robust/stats.hpp"
#include "robust/updating.hpp"

namespace robust::harness {

// --- shared pieces -----------------------------------------------------------

/// [0.6, 1]^inf together with (1/3)^inf.
inline DgpFamily movie_initial_family() {
    return DgpFamily::make_union({DgpFamily(BoxFamily::iid(MarginalBox::binary(0.6, 1.0))),
                                  DgpFamily::singleton(IndependentDgp::iid(Marginal::bernoulli(1.0 / 3.0)))});
}

/// Pays 1 on outcome 1 and 0 otherwise.
inline Act bet_on_one() { return Act(2, 1, {0.0, 1.0}); }

inline Tri tri(bool b) { return b ? Tri::Yes : Tri::No; }

inline void finish(Report& r, const ExperimentConfig& cfg) {
    r.summary = summarize(r.records);
    r.checks = cfg.expects;
    for (auto& c : r.checks) evaluate_check(r, c);
}

inline Report new_report(const ExperimentConfig& cfg) {
    Report r;
    r.scenario = cfg.scenario;
    r.name = cfg.name;
    r.seed = cfg.seed;
    r.reps = cfg.reps;
    return r;
}

/// Runs reps x truths replications; stream index t * reps + rep.
template <class Body>
std::vector<Record> replicate(const ExperimentConfig& cfg, std::size_t truths, Body&& body) {
    const std::size_t total = truths * cfg.reps;
    std::vector<Record> out(total);
    parallel_for(total, [&](std::size_t idx) {
        Record rec;
        rec.truth_index = idx / cfg.reps;
        rec.rep = idx % cfg.reps;
        rec.seed = derive_seed(cfg.seed, idx);
        rec.n = cfg.N;
        body(rec);
        out[idx] = std::move(rec);
    });
    return out;
}

// --- illustrative ------------------------------------------------------------

inline Report run_illustrative(const ExperimentConfig& cfg) {
    Report rep = new_report(cfg);
    const DgpFamily initial = cfg.initial ? *cfg.initial : movie_initial_family();
    const DecisionProblem D(param_acts(cfg, "acts", {bet_on_one(), Act::constant(0.5, 2)}), cfg.N);
    require(D.horizon() == 1, Errc::Config, "illustrative acts must depend on one experiment");
    const MarginalHull Hi = future_hull(initial, cfg.N, 1);
    const std::size_t c = meu_choice(D, Hi);
    const double ce = min_expected_utility(D.acts[c], Hi);

    rep.records = replicate(cfg, cfg.truths.size(), [&](Record& rec) {
        const IndependentDgp& truth = cfg.truths[rec.truth_index];
        Rng rng(rec.seed);
        const SampleData data = sample(truth, cfg.N, rng);
        const DgpFamily upd = apply_rule(cfg.rule, initial, data, cfg.params);
        const MarginalHull Hu = future_hull(upd, cfg.N, 1);
        const std::size_t c2 = meu_choice(D, Hu, c);
        rec.statistic = empirical_distribution(data, cfg.d())[1];
        rec.retained_truth = family_contains(upd, truth);
        rec.accommodates = hull_accommodates(Hu, truth, cfg.N);
        rec.data_free_act = c;
        rec.data_driven_act = c2;
        rec.payoff_data_free = objective_payoff(D.acts[c], truth, cfg.N);
        rec.payoff_data_driven = objective_payoff(D.acts[c2], truth, cfg.N);
        rec.certainty_equivalent = ce;
        rec.event = *rec.retained_truth && *rec.payoff_data_driven >= *rec.payoff_data_free - kPayoffTol;
    });
    rep.constants["data_free_act"] = c;
    rep.constants["certainty_equivalent"] = ce;
    for (std::size_t i = 0; i < D.acts.size(); ++i)
        rep.constants["min_eu_initial_act_" + std::to_string(i)] = min_expected_utility(D.acts[i], Hi);
    rep.constants["rule"] = std::string(to_string(cfg.rule));
    finish(rep, cfg);
    return rep;
}

// --- coverage ----------------------------------------------------------------

inline Report run_coverage(const ExperimentConfig& cfg) {
    Report rep = new_report(cfg);
    UpdateParams p = cfg.params;
    rep.records = replicate(cfg, cfg.truths.size(), [&](Record& rec) {
        const IndependentDgp& truth = cfg.truths[rec.truth_index];
        const DgpFamily F = cfg.initial ? *cfg.initial : DgpFamily::singleton(truth);
        Rng rng(rec.seed);
        const SampleData data = sample(truth, cfg.N, rng);
        const Marginal phi = empirical_distribution(data, cfg.d());
        rec.statistic = acceptance_statistic(phi, average_sample_marginals(truth, cfg.N), cfg.N, p.eta);
        rec.retained_truth = family_contains(robust_iid_update(F, data, p), truth);
        rec.retained_truth_alt = family_contains(bonferroni_update(F, data, p), truth);
    });
    rep.constants["chi_square_critical"] = chi_square_quantile(cfg.d() - 1, p.alpha);
    rep.constants["bonferroni_critical"] = bonferroni_critical(cfg.d(), p.alpha);
    finish(rep, cfg);
    return rep;
}

// --- dominance -----------------------------------------------------------------

namespace detail {

inline Marginal random_marginal(Rng& rng, std::size_t d) {
    std::vector<double> w(d);
    for (double& x : w) {
        double u = rng.uniform01();
        while (u <= 0.0) u = rng.uniform01();
        x = -std::log(u);
    }
    return Marginal::normalized(std::move(w));
}

inline IndependentDgp random_dgp(Rng& rng, std::size_t d) {
    const std::size_t m = rng.below(3), period = 1 + rng.below(3);
    std::vector<Marginal> prefix, cycle;
    for (std::size_t i = 0; i < m; ++i) prefix.push_back(random_marginal(rng, d));
    for (std::size_t i = 0; i < period; ++i) cycle.push_back(random_marginal(rng, d));
    return IndependentDgp(std::move(prefix), std::move(cycle), false);
}

inline Marginal random_point_in(Rng& rng, const MarginalBox& b) {
    const auto vs = b.vertices();
    std::vector<double> w(vs.size());
    for (double& x : w) x = -std::log(std::max(rng.uniform01(), 1e-300));
    std::vector<double> p(b.size(), 0.0);
    for (std::size_t k = 0; k < vs.size(); ++k)
        for (std::size_t j = 0; j < p.size(); ++j) p[j] += w[k] * vs[k][j];
    return Marginal::normalized(std::move(p));
}

inline MarginalBox random_box(Rng& rng, std::size_t d) {
    const Marginal q = random_marginal(rng, d);
    std::vector<double> lo(d), hi(d);
    for (std::size_t j = 0; j < d; ++j) {
        lo[j] = q[j] * (1.0 - rng.uniform(0.0, 0.8));
        hi[j] = q[j] + (1.0 - q[j]) * rng.uniform(0.0, 0.8);
    }
    return MarginalBox(std::move(lo), std::move(hi));
}

/// Sub-box shrunk toward a random point of `b`.
inline MarginalBox shrink_box(Rng& rng, const MarginalBox& b) {
    const Marginal q = random_point_in(rng, b);
    const double r = rng.uniform(0.0, 1.0);
    std::vector<double> lo(b.size()), hi(b.size());
    for (std::size_t j = 0; j < b.size(); ++j) {
        lo[j] = std::min(q[j], q[j] - r * (q[j] - b.lo()[j]));
        hi[j] = std::max(q[j], q[j] + r * (b.hi()[j] - q[j]));
    }
    return MarginalBox(std::move(lo), std::move(hi));
}

struct DominanceInstance {
    std::size_t d = 2;
    DgpFamily initial = DgpFamily::empty(2);
    DgpFamily updated = DgpFamily::empty(2);
    IndependentDgp truth = IndependentDgp::iid(Marginal::uniform(2));
};

/// Random initial family (explicit, or a box together with explicit
/// members), a truth inside it, and an updated subfamily.
inline DominanceInstance random_instance(Rng& rng, const std::vector<double>& dims) {
    DominanceInstance in;
    in.d = static_cast<std::size_t>(dims[rng.below(dims.size())]);
    const std::size_t d = in.d;
    const bool with_box = rng.below(2) == 1;
    const std::size_t m = with_box ? 1 + rng.below(4) : 2 + rng.below(5);
    std::vector<IndependentDgp> members;
    for (std::size_t i = 0; i < m; ++i) members.push_back(random_dgp(rng, d));
    std::optional<BoxFamily> box;
    if (with_box) {
        std::vector<MarginalBox> cyc;
        const std::size_t period = 1 + rng.below(2);
        for (std::size_t i = 0; i < period; ++i) cyc.push_back(random_box(rng, d));
        box = BoxFamily({}, std::move(cyc));
    }

    // Truth: an explicit member, or a DGP drawn inside the box.
    bool truth_in_box = false;
    if (box && rng.below(2) == 1) {
        truth_in_box = true;
        std::vector<Marginal> cyc;
        for (const auto& b : box->cycle) cyc.push_back(random_point_in(rng, b));
        in.truth = IndependentDgp({}, std::move(cyc));
    } else {
        in.truth = members[rng.below(members.size())];
    }

    std::vector<DgpFamily> ib;
    if (box) ib.emplace_back(*box);
    ib.emplace_back(ExplicitSet{members});
    in.initial = ib.size() == 1 ? ib.front() : DgpFamily::make_union(std::move(ib));

    // Updated: a random subset of members, and the box kept, shrunk or dropped.
    const bool keep_truth = rng.below(2) == 1;
    std::vector<IndependentDgp> kept;
    for (const auto& P : members) {
        const bool is_truth = same_dgp(P, in.truth);
        if ((is_truth && keep_truth) || (!is_truth && rng.below(2) == 1)) kept.push_back(P);
    }
    std::vector<DgpFamily> ub;
    if (box) {
        const std::size_t mode = (truth_in_box && keep_truth) ? 0 : rng.below(3);
        if (mode == 0) ub.emplace_back(*box);
        else if (mode == 1) {
            std::vector<MarginalBox> cyc;
            for (const auto& b : box->cycle) cyc.push_back(shrink_box(rng, b));
            ub.emplace_back(BoxFamily({}, std::move(cyc)));
        }
    }
    if (!kept.empty()) ub.emplace_back(ExplicitSet{std::move(kept)});
    if (ub.empty()) ub.emplace_back(ExplicitSet{{members[rng.below(members.size())]}});
    in.updated = ub.size() == 1 ? ub.front() : DgpFamily::make_union(std::move(ub));
    return in;
}

inline Act random_act(Rng& rng, std::size_t d, bool constant) {
    if (constant) return Act::constant(rng.uniform01(), d);
    std::vector<double> u(d);
    for (double& x : u) x = rng.uniform01();
    return Act(d, 1, std::move(u));
}

struct DominanceCounts {
    std::uint64_t basic = 0;
    std::uint64_t general = 0;
};

/// Objective-dominance violations of the data-driven choice on random basic
/// problems and of the certainty-equivalent bound on random general problems.
inline DominanceCounts count_violations(Rng& rng, std::size_t d, const MarginalHull& Hi, const MarginalHull& Hu,
                                        const IndependentDgp& truth, std::size_t N, std::size_t basic,
                                        std::size_t general) {
    DominanceCounts out;
    const std::vector<double> pstar = joint_window(truth, N + 1, 1);
    for (std::size_t t = 0; t < basic; ++t) {
        const DecisionProblem D({random_act(rng, d, false), random_act(rng, d, true)}, N);
        const Choices ch = choose(D, Hi, Hu);
        if (D.acts[ch.data_driven].expectation(pstar) < D.acts[ch.data_free].expectation(pstar) - kPayoffTol)
            ++out.basic;
    }
    for (std::size_t t = 0; t < general; ++t) {
        const std::size_t k = 2 + rng.below(4);
        std::vector<Act> acts;
        for (std::size_t a = 0; a < k; ++a) acts.push_back(random_act(rng, d, rng.below(4) == 0));
        const DecisionProblem D(std::move(acts), N);
        const Choices ch = choose(D, Hi, Hu);
        const double ce = min_expected_utility(D.acts[ch.data_free], Hi);
        if (D.acts[ch.data_driven].expectation(pstar) < ce - kPayoffTol) ++out.general;
    }
    return out;
}

} // namespace detail

inline Report run_dominance(const ExperimentConfig& cfg) {
    Report rep = new_report(cfg);
    const std::size_t instances = param_count(cfg, "instances", 100);
    const std::size_t basic = param_count(cfg, "basic_problems", 10000);
    const std::size_t general = param_count(cfg, "general_problems", 10000);
    const std::size_t mix_instances = param_count(cfg, "mixture_instances", 25);
    const std::size_t mix_problems = param_count(cfg, "mixture_problems", 1000);
    const std::size_t max_attempts = param_count(cfg, "max_attempts", 10000);
    const auto alphas = param_doubles(cfg, "mixture_alphas", {0.0, 0.3, 0.7, 1.0});
    const auto dims = param_doubles(cfg, "dims", {2.0, 3.0});
    for (double dd : dims)
        if (dd < 2 || dd > 6 || dd != std::floor(dd)) detail::fail_field(cfg, "dims", "entries must be integers in [2,6]");
    const std::size_t N = cfg.N;

    // Kind 0: accommodating; 1: not accommodating; 2: alpha-mixture hulls.
    const std::size_t n_mix = mix_instances * alphas.size();
    const std::size_t total = 2 * instances + n_mix;
    std::vector<Record> out(total);
    parallel_for(total, [&](std::size_t idx) {
        Record rec;
        rec.n = N;
        rec.seed = derive_seed(cfg.seed, idx);
        Rng rng(rec.seed);
        if (idx < 2 * instances) {
            const bool want_acc = idx < instances;
            rec.truth_index = want_acc ? 0 : 1;
            rec.rep = want_acc ? idx : idx - instances;
            for (std::size_t attempt = 0;; ++attempt) {
                require(attempt < max_attempts, Errc::Unsupported, "no instance of the requested kind within max_attempts");
                const auto in = detail::random_instance(rng, dims);
                require(family_contains(in.initial, in.truth), Errc::InvalidArgument, "generated truth outside the initial family");
                const MarginalHull Hi = future_hull(in.initial, N, 1);
                const MarginalHull Hu = future_hull(in.updated, N, 1);
                const Tri acc = hull_accommodates(Hu, in.truth, N);
                if ((acc == Tri::Yes) != want_acc) continue;
                rec.accommodates = acc;
                rec.statistic = static_cast<double>(in.d);
                if (want_acc) {
                    const auto v = detail::count_violations(rng, in.d, Hi, Hu, in.truth, N, basic, general);
                    rec.violations = v.basic;
                    rec.violations_ce = v.general;
                } else {
                    const auto D = separating_basic_problem(Hu, in.truth, N);
                    bool found = false;
                    if (D) {
                        const Choices ch = choose(*D, Hi, Hu);
                        const double w_free = objective_payoff(D->acts[ch.data_free], in.truth, N);
                        const double w_driven = objective_payoff(D->acts[ch.data_driven], in.truth, N);
                        const double ce = min_expected_utility(D->acts[ch.data_free], Hi);
                        rec.data_free_act = ch.data_free;
                        rec.data_driven_act = ch.data_driven;
                        rec.payoff_data_free = w_free;
                        rec.payoff_data_driven = w_driven;
                        rec.certainty_equivalent = ce;
                        found = w_driven < w_free - kPayoffTol && w_driven < ce - kPayoffTol;
                    }
                    rec.witness_found = found;
                }
                break;
            }
        } else {
            const std::size_t j = idx - 2 * instances;
            const double alpha = alphas[j % alphas.size()];
            rec.truth_index = 2;
            rec.rep = j;
            rec.statistic = alpha;
            const auto in = detail::random_instance(rng, dims);
            const MarginalHull Hi = future_hull(in.initial, N, 1);
            const std::vector<double> pstar = joint_window(in.truth, N + 1, 1);
            MarginalHull Hu;
            Hu.form = MarginalHull::Form::Cloud;
            Hu.d = in.d;
            Hu.K = 1;
            for (const auto& v : robust::detail::extreme_points(Hi)) {
                std::vector<double> p(v.size());
                for (std::size_t k = 0; k < v.size(); ++k) p[k] = alpha * pstar[k] + (1.0 - alpha) * v[k];
                Hu.points.push_back(std::move(p));
            }
            rec.accommodates = hull_accommodates(Hu, in.truth, N);
            std::uint64_t viol = 0;
            for (std::size_t t = 0; t < mix_problems; ++t) {
                const std::size_t k = 3 + rng.below(3);
                std::vector<Act> acts;
                for (std::size_t a = 0; a < k; ++a) acts.push_back(detail::random_act(rng, in.d, rng.below(4) == 0));
                const DecisionProblem D(std::move(acts), N);
                const Choices ch = choose(D, Hi, Hu);
                if (D.acts[ch.data_driven].expectation(pstar) < D.acts[ch.data_free].expectation(pstar) - kPayoffTol)
                    ++viol;
            }
            rec.violations = viol;
        }
        out[idx] = std::move(rec);
    });
    rep.records = std::move(out);
    rep.constants["instances"] = instances;
    rep.constants["basic_problems"] = basic;
    rep.constants["general_problems"] = general;
    rep.constants["mixture_problems"] = mix_problems;
    finish(rep, cfg);
    return rep;
}

// --- Bayesian counterexample ---------------------------------------------------

inline Report run_bayes_counterexample(const ExperimentConfig& cfg) {
    Report rep = new_report(cfg);
    const DgpFamily initial =
        cfg.initial ? *cfg.initial
                    : DgpFamily::make_union({DgpFamily(VertexFamily{{Marginal::bernoulli(0.4), Marginal::bernoulli(0.5)}}),
                                             DgpFamily(VertexFamily{{Marginal::bernoulli(0.6), Marginal::bernoulli(1.0)}})});
    const std::vector<IndependentDgp> truths =
        cfg.truths.empty() ? std::vector<IndependentDgp>{IndependentDgp::iid(Marginal::bernoulli(0.6))} : cfg.truths;
    const DecisionProblem D(param_acts(cfg, "acts", {bet_on_one(), Act::constant(0.55, 2)}), cfg.N);
    const std::size_t tracked = param_count(cfg, "tracked_branch", 0);
    const double threshold = param_double(cfg, "mass_threshold", 0.99);

    const Posterior prior = bayesian_posterior(initial, SampleData{});
    require(tracked < prior.weights.mass.size(), Errc::Config, "tracked_branch out of range");
    const std::size_t c = bayes_choice(D, prior);
    for (std::size_t i = 0; i < D.acts.size(); ++i)
        rep.constants["prior_expected_payoff_act_" + std::to_string(i)] =
            posterior_expected_utility(prior, D.acts[i], cfg.N);
    rep.constants["data_free_act"] = c;
    rep.constants["mass_threshold"] = threshold;

    rep.records = replicate(cfg, truths.size(), [&](Record& rec) {
        const IndependentDgp& truth = truths[rec.truth_index];
        Rng rng(rec.seed);
        const SampleData data = sample(truth, cfg.N, rng);
        const Posterior post = bayesian_posterior(initial, data);
        const std::size_t c2 = bayes_choice(D, post);
        rec.statistic = post.weights.mass[tracked];
        rec.event = *rec.statistic >= threshold;
        rec.data_free_act = c;
        rec.data_driven_act = c2;
        rec.payoff_data_free = objective_payoff(D.acts[c], truth, cfg.N);
        rec.payoff_data_driven = objective_payoff(D.acts[c2], truth, cfg.N);
    });
    finish(rep, cfg);
    return rep;
}

// --- minimax regret ------------------------------------------------------------

inline Report run_regret_example(const ExperimentConfig& cfg) {
    Report rep = new_report(cfg);
    const DgpFamily initial = cfg.initial ? *cfg.initial : DgpFamily(BoxFamily::iid(MarginalBox::binary(0.0, 1.0)));
    const DgpFamily updated = cfg.updated ? *cfg.updated : DgpFamily(BoxFamily::iid(MarginalBox::binary(0.6, 1.0)));
    const DecisionProblem D(param_acts(cfg, "acts", {bet_on_one(), Act::constant(2.0 / 3.0, 2)}), 0);
    const auto grid = param_doubles(cfg, "pstar_grid", {0.6, 0.62, 0.64, 0.66, 2.0 / 3.0});
    const MarginalHull Hi = future_hull(initial, 0, D.horizon());
    const MarginalHull Hu = future_hull(updated, 0, D.horizon());
    const auto r0 = max_regrets(D, Hi);
    const auto r1 = max_regrets(D, Hu);
    const std::size_t c = minimax_regret_choice(D, Hi);
    const std::size_t c2 = minimax_regret_choice(D, Hu);
    for (std::size_t i = 0; i < D.acts.size(); ++i) {
        rep.constants["regret_initial_act_" + std::to_string(i)] = r0[i];
        rep.constants["regret_updated_act_" + std::to_string(i)] = r1[i];
    }
    for (std::size_t g = 0; g < grid.size(); ++g) {
        if (!(grid[g] >= 0.0 && grid[g] <= 1.0)) detail::fail_field(cfg, "pstar_grid", "entries must lie in [0,1]");
        const IndependentDgp truth = IndependentDgp::iid(Marginal::bernoulli(grid[g]));
        Record rec;
        rec.rep = g;
        rec.seed = cfg.seed;
        rec.statistic = grid[g];
        rec.accommodates = hull_accommodates(Hu, truth, 0);
        rec.data_free_act = c;
        rec.data_driven_act = c2;
        rec.payoff_data_free = objective_payoff(D.acts[c], truth, 0);
        rec.payoff_data_driven = objective_payoff(D.acts[c2], truth, 0);
        rep.records.push_back(rec);
    }
    rep.reps = grid.size();
    finish(rep, cfg);
    return rep;
}

// --- Bernoulli model with a nuisance component ---------------------------------

inline Report run_bernoulli_model(const ExperimentConfig& cfg) {
    Report rep = new_report(cfg);
    const double theta = param_double(cfg, "theta", 0.5);
    const double delta = param_double(cfg, "delta", 0.2);
    const auto psi = param_doubles(cfg, "psi", {0.0, 1.0});
    const double alpha = cfg.params.alpha;
    if (!(theta >= 0.0 && theta <= 1.0)) detail::fail_field(cfg, "theta", "must lie in [0,1]");
    if (!(delta >= 0.0 && delta < 1.0)) detail::fail_field(cfg, "delta", "must lie in [0,1)");
    if (psi.empty()) detail::fail_field(cfg, "psi", "needs at least one value");
    const BernoulliNuisanceModel model{delta};
    std::vector<Marginal> cyc;
    for (double s : psi) {
        if (!(s >= 0.0 && s <= 1.0)) detail::fail_field(cfg, "psi", "entries must lie in [0,1]");
        cyc.push_back(Marginal::bernoulli(model.success_probability(theta, s)));
    }
    const IndependentDgp truth = IndependentDgp::periodic(std::move(cyc));
    const double next = truth.marginal_at(cfg.N + 1)[1];

    rep.records = replicate(cfg, 1, [&](Record& rec) {
        Rng rng(rec.seed);
        const SampleData data = sample(truth, cfg.N, rng);
        const double phi = empirical_distribution(data, 2)[1];
        const BernoulliFinite fin = bern_finite(phi, cfg.N, delta, alpha);
        rec.statistic = phi;
        rec.retained_truth = fin.theta.contains(theta, kPayoffTol);
        rec.retained_truth_alt = bern_prediction_ml(phi, delta).contains(next, kPayoffTol);
        rec.accommodates = tri(fin.prediction.contains(next, kPayoffTol));
        rec.event = bern_prediction_asymptotic(phi, delta).contains(next, kPayoffTol);
    });
    const double pbar = average_sample_marginals(truth, cfg.N)[1];
    const Interval ta = bern_theta_asymptotic(pbar, delta);
    const Interval pa = bern_prediction_asymptotic(pbar, delta);
    const Interval pm = bern_prediction_ml(pbar, delta);
    rep.constants["next_marginal"] = next;
    rep.constants["average_marginal"] = pbar;
    rep.constants["theta_asymptotic_lo"] = ta.lo;
    rep.constants["theta_asymptotic_hi"] = ta.hi;
    rep.constants["prediction_asymptotic_lo"] = pa.lo;
    rep.constants["prediction_asymptotic_hi"] = pa.hi;
    rep.constants["prediction_ml_lo"] = pm.lo;
    rep.constants["prediction_ml_hi"] = pm.hi;
    finish(rep, cfg);
    return rep;
}

// --- Gaussian signals ------------------------------------------------------------

inline Report run_gaussian_model(const ExperimentConfig& cfg) {
    Report rep = new_report(cfg);
    const double theta = param_double(cfg, "theta", 0.0);
    const auto sigmas = param_doubles(cfg, "sigmas", {0.5, 2.0});
    if (sigmas.empty()) detail::fail_field(cfg, "sigmas", "needs at least one value");
    GaussianSignalsModel model;
    model.sigma_lo = param_double(cfg, "sigma_lo", *std::min_element(sigmas.begin(), sigmas.end()));
    model.sigma_hi = param_double(cfg, "sigma_hi", *std::max_element(sigmas.begin(), sigmas.end()));
    model.epsilon = cfg.params.epsilon;
    try {
        model.validate();
        for (double s : sigmas) require(s >= model.sigma_lo && s <= model.sigma_hi, Errc::InvalidArgument, "outside bounds");
    } catch (const Error& e) {
        detail::fail_field(cfg, "sigmas", e.what());
    }
    rep.records = replicate(cfg, 1, [&](Record& rec) {
        const auto x = gauss_sample(model, theta, sigmas, cfg.N, rec.seed);
        const double m = mean(x);
        rec.statistic = m;
        rec.retained_truth = gauss_atu_states(m, cfg.N, model.epsilon).contains(theta);
    });
    double var = 0.0;
    for (std::size_t i = 0; i < sigmas.size(); ++i) var += sigmas[i] * sigmas[i];
    var /= static_cast<double>(sigmas.size());
    rep.constants["sample_mean_sd"] = std::sqrt(var / static_cast<double>(cfg.N));
    finish(rep, cfg);
    return rep;
}

// --- non-dominance demonstration -------------------------------------------------

struct Theorem2Witness {
    bool found = false;
    std::size_t trials = 0;
    DecisionProblem problem;
    Choices choices;
    double payoff_data_free = 0.0;
    double payoff_data_driven = 0.0;
};

/// Random two-act problems until the data-free choice is strictly better
/// than the data-driven one under P.
inline Theorem2Witness find_non_dominance(const MarginalHull& Hi, const MarginalHull& Hu, const IndependentDgp& P,
                                          std::size_t N, std::size_t budget, Rng& rng) {
    Theorem2Witness w;
    for (w.trials = 1; w.trials <= budget; ++w.trials) {
        const DecisionProblem D({detail::random_act(rng, Hi.d, false), detail::random_act(rng, Hi.d, false)}, N);
        const Choices ch = choose(D, Hi, Hu);
        const double wf = objective_payoff(D.acts[ch.data_free], P, N);
        const double wd = objective_payoff(D.acts[ch.data_driven], P, N);
        if (wf > wd + kPayoffTol) {
            w.found = true;
            w.problem = D;
            w.choices = ch;
            w.payoff_data_free = wf;
            w.payoff_data_driven = wd;
            return w;
        }
    }
    w.trials = budget;
    return w;
}

inline Report run_theorem2_demo(const ExperimentConfig& cfg) {
    Report rep = new_report(cfg);
    const DgpFamily initial = cfg.initial ? *cfg.initial : DgpFamily(BoxFamily::iid(MarginalBox::binary(0.1, 0.9)));
    const DgpFamily updated = cfg.updated ? *cfg.updated : DgpFamily(BoxFamily::iid(MarginalBox::binary(0.3, 0.8)));
    const IndependentDgp truth = cfg.truths.empty() ? IndependentDgp::iid(Marginal::bernoulli(0.5)) : cfg.truths.front();
    const std::size_t budget = param_count(cfg, "search_budget", 100000);
    const bool required = param_bool(cfg, "require_witness", true);
    const std::size_t N = cfg.N;

    const MarginalHull Hi = future_hull(initial, N, 1);
    const MarginalHull Hu = future_hull(updated, N, 1);
    rep.constants["refines"] = hull_refines(Hu, Hi);
    rep.constants["accommodates"] = std::string(to_string(hull_accommodates(Hu, truth, N)));
    Rng rng(derive_seed(cfg.seed, 0));
    const Theorem2Witness w = find_non_dominance(Hi, Hu, truth, N, budget, rng);
    Record rec;
    rec.seed = cfg.seed;
    rec.n = N;
    rec.statistic = static_cast<double>(w.trials);
    rec.witness_found = w.found;
    if (w.found) {
        rec.data_free_act = w.choices.data_free;
        rec.data_driven_act = w.choices.data_driven;
        rec.payoff_data_free = w.payoff_data_free;
        rec.payoff_data_driven = w.payoff_data_driven;
        rep.extras["witness"] = {{"problem", io::to_json(w.problem)}, {"dgp", io::to_json(truth)}};
    }
    rep.records.push_back(rec);
    rep.reps = 1;
    finish(rep, cfg);
    if (required && !w.found)
        throw Error(Errc::WitnessNotFound, "no data-free-better problem within " + std::to_string(budget) + " trials");
    return rep;
}

// --- dispatch --------------------------------------------------------------------

inline Report run_scenario(const ExperimentConfig& cfg) {
    validate_config(cfg);
    const std::string& s = cfg.scenario;
    if (s == "illustrative") return run_illustrative(cfg);
    if (s == "coverage") return run_coverage(cfg);
    if (s == "dominance") return run_dominance(cfg);
    if (s == "bayes_counterexample") return run_bayes_counterexample(cfg);
    if (s == "regret_example") return run_regret_example(cfg);
    if (s == "bernoulli_model") return run_bernoulli_model(cfg);
    if (s == "gaussian_model") return run_gaussian_model(cfg);
    if (s == "theorem2_demo") return run_theorem2_demo(cfg);
    throw Error(Errc::Config, "unknown scenario '" + s + "'");
}

} // namespace robust::harness
