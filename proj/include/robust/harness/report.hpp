#pragma once

// Per-replication records, aggregates recomputable from them, expectation
// checks, and CSV / JSON writers.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "robust/decision.hpp"
#include "robust/error.hpp"

namespace robust::harness {

using json = nlohmann::json;

struct Record {
    std::uint64_t rep = 0;
    std::uint64_t seed = 0;
    std::size_t truth_index = 0;
    std::size_t n = 0;
    std::optional<double> statistic;
    std::optional<bool> event;
    std::optional<bool> retained_truth;
    std::optional<bool> retained_truth_alt;
    std::optional<Tri> accommodates;
    std::optional<std::size_t> data_free_act;
    std::optional<std::size_t> data_driven_act;
    std::optional<double> payoff_data_free;
    std::optional<double> payoff_data_driven;
    std::optional<double> certainty_equivalent;
    std::optional<std::uint64_t> violations;
    std::optional<std::uint64_t> violations_ce;
    std::optional<bool> witness_found;
};

inline const std::vector<std::string>& record_columns() {
    static const std::vector<std::string> cols = {
        "rep",           "seed",           "truth_index",        "n",
        "statistic",     "event",          "retained_truth",     "retained_truth_alt",
        "accommodates",  "data_free_act",  "data_driven_act",    "payoff_data_free",
        "payoff_data_driven", "certainty_equivalent", "violations", "violations_ce",
        "witness_found"};
    return cols;
}

struct Check {
    std::string metric;
    std::string op;
    double value = 0.0;
    double se_band = 0.0;
    double tol = 1e-12;
    double threshold = 0.0;
    std::optional<double> observed;
    bool pass = false;
};

struct Report {
    std::string scenario;
    std::string name;
    std::uint64_t seed = 0;
    std::size_t reps = 0;
    std::vector<Record> records;
    std::map<std::string, double> summary;
    json constants = json::object();
    json extras = json::object();
    std::vector<Check> checks;

    bool all_checks_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

namespace detail {

inline void add_frequency(std::map<std::string, double>& out, const std::string& prefix, const std::string& name,
                          std::size_t hits, std::size_t total) {
    if (total == 0) return;
    const double p = static_cast<double>(hits) / static_cast<double>(total);
    out[prefix + "freq_" + name] = p;
    out[prefix + "se_" + name] = std::sqrt(p * (1.0 - p) / static_cast<double>(total));
}

inline void summarize_into(std::map<std::string, double>& out, const std::vector<const Record*>& rs,
                           const std::string& prefix) {
    out[prefix + "count"] = static_cast<double>(rs.size());
    struct Flag {
        const char* name;
        std::optional<bool> Record::*field;
    };
    const Flag flags[] = {{"event", &Record::event},
                          {"retained_truth", &Record::retained_truth},
                          {"retained_truth_alt", &Record::retained_truth_alt},
                          {"witness_found", &Record::witness_found}};
    for (const auto& f : flags) {
        std::size_t hits = 0, total = 0;
        for (const Record* r : rs)
            if ((r->*f.field).has_value()) {
                ++total;
                hits += *(r->*f.field) ? 1 : 0;
            }
        add_frequency(out, prefix, f.name, hits, total);
    }
    {
        std::size_t yes = 0, unknown = 0, total = 0;
        for (const Record* r : rs)
            if (r->accommodates) {
                ++total;
                yes += *r->accommodates == Tri::Yes ? 1 : 0;
                unknown += *r->accommodates == Tri::Unknown ? 1 : 0;
            }
        add_frequency(out, prefix, "accommodates", yes, total);
        add_frequency(out, prefix, "accommodates_unknown", unknown, total);
    }
    struct Num {
        const char* name;
        std::optional<double> Record::*field;
    };
    const Num nums[] = {{"statistic", &Record::statistic},
                        {"payoff_data_free", &Record::payoff_data_free},
                        {"payoff_data_driven", &Record::payoff_data_driven},
                        {"certainty_equivalent", &Record::certainty_equivalent}};
    for (const auto& f : nums) {
        double s = 0.0;
        std::size_t total = 0;
        for (const Record* r : rs)
            if ((r->*f.field).has_value()) {
                s += *(r->*f.field);
                ++total;
            }
        if (total > 0) out[prefix + "mean_" + f.name] = s / static_cast<double>(total);
    }
    {
        std::size_t worse = 0, better = 0, below_ce = 0, total = 0, total_ce = 0;
        for (const Record* r : rs) {
            if (r->payoff_data_free && r->payoff_data_driven) {
                ++total;
                worse += *r->payoff_data_driven < *r->payoff_data_free - kPayoffTol ? 1 : 0;
                better += *r->payoff_data_driven > *r->payoff_data_free + kPayoffTol ? 1 : 0;
            }
            if (r->certainty_equivalent && r->payoff_data_driven) {
                ++total_ce;
                below_ce += *r->payoff_data_driven < *r->certainty_equivalent - kPayoffTol ? 1 : 0;
            }
        }
        add_frequency(out, prefix, "driven_worse", worse, total);
        add_frequency(out, prefix, "driven_not_worse", total - worse, total);
        add_frequency(out, prefix, "driven_better", better, total);
        add_frequency(out, prefix, "driven_below_ce", below_ce, total_ce);
    }
    {
        bool any = false, any_ce = false;
        double v = 0.0, vce = 0.0;
        for (const Record* r : rs) {
            if (r->violations) {
                any = true;
                v += static_cast<double>(*r->violations);
            }
            if (r->violations_ce) {
                any_ce = true;
                vce += static_cast<double>(*r->violations_ce);
            }
        }
        if (any) out[prefix + "sum_violations"] = v;
        if (any_ce) out[prefix + "sum_violations_ce"] = vce;
    }
    {
        std::map<std::size_t, std::size_t> free_counts, driven_counts;
        std::size_t nf = 0, nd = 0;
        for (const Record* r : rs) {
            if (r->data_free_act) {
                ++free_counts[*r->data_free_act];
                ++nf;
            }
            if (r->data_driven_act) {
                ++driven_counts[*r->data_driven_act];
                ++nd;
            }
        }
        for (const auto& [k, c] : free_counts) add_frequency(out, prefix, "data_free_act_" + std::to_string(k), c, nf);
        for (const auto& [k, c] : driven_counts)
            add_frequency(out, prefix, "data_driven_act_" + std::to_string(k), c, nd);
    }
}

} // namespace detail

/// Aggregates over all records, then per truth_index as "truth_<k>/...".
inline std::map<std::string, double> summarize(const std::vector<Record>& records) {
    std::map<std::string, double> out;
    std::vector<const Record*> all;
    std::map<std::size_t, std::vector<const Record*>> groups;
    for (const auto& r : records) {
        all.push_back(&r);
        groups[r.truth_index].push_back(&r);
    }
    detail::summarize_into(out, all, "");
    if (groups.size() > 1)
        for (const auto& [k, rs] : groups) detail::summarize_into(out, rs, "truth_" + std::to_string(k) + "/");
    return out;
}

inline std::optional<double> lookup_metric(const Report& r, const std::string& metric) {
    if (auto it = r.summary.find(metric); it != r.summary.end()) return it->second;
    if (r.constants.contains(metric) && r.constants[metric].is_number()) return r.constants[metric].get<double>();
    return std::nullopt;
}

/// Name of the standard-error metric paired with a frequency metric.
inline std::string se_metric(const std::string& metric) {
    const auto slash = metric.rfind('/');
    const std::string group = slash == std::string::npos ? "" : metric.substr(0, slash + 1);
    std::string base = slash == std::string::npos ? metric : metric.substr(slash + 1);
    if (base.rfind("freq_", 0) == 0) base = "se_" + base.substr(5);
    return group + base;
}

inline void evaluate_check(const Report& r, Check& c) {
    c.observed = lookup_metric(r, c.metric);
    double se = 0.0;
    if (c.se_band != 0.0) se = lookup_metric(r, se_metric(c.metric)).value_or(0.0);
    if (c.op == ">=" || c.op == ">") c.threshold = c.value - c.se_band * se;
    else if (c.op == "<=" || c.op == "<") c.threshold = c.value + c.se_band * se;
    else c.threshold = c.value;
    if (!c.observed) {
        c.pass = false;
        return;
    }
    const double x = *c.observed;
    if (c.op == ">=") c.pass = x >= c.threshold;
    else if (c.op == ">") c.pass = x > c.threshold;
    else if (c.op == "<=") c.pass = x <= c.threshold;
    else if (c.op == "<") c.pass = x < c.threshold;
    else if (c.op == "==") c.pass = std::abs(x - c.threshold) <= c.tol;
    else throw Error(Errc::Config, "unknown check operator '" + c.op + "'");
}

// --- writers -------------------------------------------------------------

inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline json record_to_json(const Record& r) {
    json j;
    auto opt = [](const auto& o) -> json { return o ? json(*o) : json(nullptr); };
    j["rep"] = r.rep;
    j["seed"] = r.seed;
    j["truth_index"] = r.truth_index;
    j["n"] = r.n;
    j["statistic"] = opt(r.statistic);
    j["event"] = opt(r.event);
    j["retained_truth"] = opt(r.retained_truth);
    j["retained_truth_alt"] = opt(r.retained_truth_alt);
    j["accommodates"] = r.accommodates ? json(std::string(to_string(*r.accommodates))) : json(nullptr);
    j["data_free_act"] = opt(r.data_free_act);
    j["data_driven_act"] = opt(r.data_driven_act);
    j["payoff_data_free"] = opt(r.payoff_data_free);
    j["payoff_data_driven"] = opt(r.payoff_data_driven);
    j["certainty_equivalent"] = opt(r.certainty_equivalent);
    j["violations"] = opt(r.violations);
    j["violations_ce"] = opt(r.violations_ce);
    j["witness_found"] = opt(r.witness_found);
    return j;
}

inline json check_to_json(const Check& c) {
    return {{"metric", c.metric},
            {"op", c.op},
            {"value", c.value},
            {"se_band", c.se_band},
            {"threshold", c.threshold},
            {"observed", c.observed ? json(*c.observed) : json(nullptr)},
            {"pass", c.pass}};
}

inline json report_to_json(const Report& r) {
    json j;
    j["scenario"] = r.scenario;
    j["name"] = r.name;
    j["seed"] = r.seed;
    j["reps"] = r.reps;
    j["columns"] = record_columns();
    json recs = json::array();
    for (const auto& rec : r.records) recs.push_back(record_to_json(rec));
    j["records"] = recs;
    j["summary"] = r.summary;
    j["constants"] = r.constants;
    j["extras"] = r.extras;
    json checks = json::array();
    for (const auto& c : r.checks) checks.push_back(check_to_json(c));
    j["checks"] = checks;
    return j;
}

inline std::string report_to_csv(const Report& r) {
    std::ostringstream os;
    const auto& cols = record_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << '\n';
    for (const auto& rec : r.records) {
        const json j = record_to_json(rec);
        for (std::size_t i = 0; i < cols.size(); ++i) {
            if (i) os << ',';
            const json& v = j[cols[i]];
            if (v.is_null()) continue;
            if (v.is_boolean()) os << (v.get<bool>() ? 1 : 0);
            else if (v.is_number_float()) os << format_double(v.get<double>());
            else if (v.is_number()) os << v.dump();
            else os << v.get<std::string>();
        }
        os << '\n';
    }
    return os.str();
}

} // namespace robust::harness
