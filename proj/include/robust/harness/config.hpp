#pragma once

// Experiment configuration: parsing, validation, and line-precise errors.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "robust/dgp.hpp"
#include "robust/error.hpp"
#include "robust/family.hpp"
#include "robust/harness/report.hpp"
#include "robust/io.hpp"
#include "robust/updating.hpp"

namespace robust::harness {

inline const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names = {"illustrative",         "coverage",       "dominance",
                                                   "bayes_counterexample", "regret_example", "bernoulli_model",
                                                   "gaussian_model",       "theorem2_demo"};
    return names;
}

enum class Format { Json, Csv };

inline Format parse_format(std::string_view s) {
    if (s == "json") return Format::Json;
    if (s == "csv") return Format::Csv;
    throw Error(Errc::Config, "format must be csv or json (got '" + std::string(s) + "')");
}

struct ExperimentConfig {
    std::string scenario;
    std::string name;
    OutcomeSpace space = OutcomeSpace::binary();
    Rule rule = Rule::Atu;
    UpdateParams params;
    std::vector<IndependentDgp> truths;
    std::optional<DgpFamily> initial;
    std::optional<DgpFamily> updated;
    std::size_t N = 100;
    std::size_t reps = 100;
    std::uint64_t seed = 1;
    std::string output_path;
    Format format = Format::Json;
    std::vector<Check> expects;
    /// Whole document, for scenario-specific parameters.
    nlohmann::json raw;
    /// Source text, for mapping fields back to line numbers.
    std::string text;
    std::string source = "<config>";

    std::size_t d() const { return space.size(); }
};

/// Config error carrying "source:line: message".
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(Errc::Config, what) {}
};

namespace detail {

inline std::size_t line_of_offset(const std::string& text, std::size_t offset) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

/// Line of the first occurrence of the last key named in a dotted path.
inline std::size_t line_of_field(const std::string& text, const std::string& path) {
    std::string key = path;
    if (auto dot = key.rfind('.'); dot != std::string::npos) key = key.substr(dot + 1);
    if (auto br = key.find('['); br != std::string::npos) key = key.substr(0, br);
    // Fall back to the outermost key when the innermost one is an index.
    if (key.empty()) {
        key = path.substr(0, path.find_first_of(".["));
    }
    const auto pos = text.find("\"" + key + "\"");
    if (pos == std::string::npos) return 1;
    return line_of_offset(text, pos);
}

[[noreturn]] inline void fail_field(const ExperimentConfig& c, const std::string& path, const std::string& msg) {
    throw ConfigError(c.source + ":" + std::to_string(line_of_field(c.text, path)) + ": field '" + path + "': " + msg);
}

} // namespace detail

// --- typed accessors for scenario parameters -------------------------------

inline double param_double(const ExperimentConfig& c, const std::string& key, double fallback) {
    if (!c.raw.contains(key)) return fallback;
    if (!c.raw[key].is_number()) detail::fail_field(c, key, "expected a number");
    return c.raw[key].get<double>();
}

inline std::size_t param_count(const ExperimentConfig& c, const std::string& key, std::size_t fallback) {
    if (!c.raw.contains(key)) return fallback;
    const auto& v = c.raw[key];
    if (!v.is_number_integer() || v.get<long long>() < 0) detail::fail_field(c, key, "expected a nonnegative integer");
    return v.get<std::size_t>();
}

inline bool param_bool(const ExperimentConfig& c, const std::string& key, bool fallback) {
    if (!c.raw.contains(key)) return fallback;
    if (!c.raw[key].is_boolean()) detail::fail_field(c, key, "expected true or false");
    return c.raw[key].get<bool>();
}

inline std::vector<double> param_doubles(const ExperimentConfig& c, const std::string& key, std::vector<double> fallback) {
    if (!c.raw.contains(key)) return fallback;
    const auto& v = c.raw[key];
    if (!v.is_array()) detail::fail_field(c, key, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) detail::fail_field(c, key, "expected an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

inline Marginal param_marginal(const ExperimentConfig& c, const std::string& key) {
    if (!c.raw.contains(key)) detail::fail_field(c, key, "missing");
    try {
        return io::marginal_from_json(c.raw[key], c.d(), key);
    } catch (const io::FieldError& e) {
        detail::fail_field(c, e.path(), e.what());
    }
}

inline std::vector<Act> param_acts(const ExperimentConfig& c, const std::string& key, std::vector<Act> fallback) {
    if (!c.raw.contains(key)) return fallback;
    const auto& v = c.raw[key];
    if (!v.is_array() || v.empty()) detail::fail_field(c, key, "expected a nonempty array of acts");
    std::vector<Act> out;
    try {
        for (std::size_t i = 0; i < v.size(); ++i)
            out.push_back(io::act_from_json(v[i], c.d(), key + "[" + std::to_string(i) + "]"));
    } catch (const io::FieldError& e) {
        detail::fail_field(c, e.path(), e.what());
    }
    return out;
}

/// Scenarios that simulate data need a truth.
inline bool scenario_needs_truth(std::string_view s) {
    return s == "illustrative" || s == "coverage";
}

inline ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>") {
    ExperimentConfig c;
    c.text = text;
    c.source = source;
    try {
        c.raw = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(source + ":" + std::to_string(detail::line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0)) +
                          ": invalid JSON: " + e.what());
    }
    if (!c.raw.is_object()) throw ConfigError(source + ":1: the config must be a JSON object");
    const auto& j = c.raw;

    auto get_string = [&](const std::string& key, const std::string& fallback) {
        if (!j.contains(key)) return fallback;
        if (!j[key].is_string()) detail::fail_field(c, key, "expected a string");
        return j[key].get<std::string>();
    };
    auto get_u64 = [&](const std::string& key, std::uint64_t fallback) -> std::uint64_t {
        if (!j.contains(key)) return fallback;
        const auto& v = j[key];
        if (!v.is_number_integer()) detail::fail_field(c, key, "expected an integer");
        if (v.is_number_unsigned()) return v.get<std::uint64_t>();
        const long long x = v.get<long long>();
        if (x < 0) detail::fail_field(c, key, "must be >= 0");
        return static_cast<std::uint64_t>(x);
    };

    if (!j.contains("scenario")) detail::fail_field(c, "scenario", "missing");
    c.scenario = get_string("scenario", "");
    bool known = false;
    for (const auto& s : scenario_names()) known = known || s == c.scenario;
    if (!known) detail::fail_field(c, "scenario", "unknown scenario '" + c.scenario + "'");
    c.name = get_string("name", c.scenario);

    if (j.contains("outcomes")) {
        try {
            c.space = OutcomeSpace(j["outcomes"].get<std::vector<std::string>>());
        } catch (const std::exception& e) {
            detail::fail_field(c, "outcomes", e.what());
        }
    }
    try {
        c.rule = parse_rule(get_string("rule", "atu"));
    } catch (const Error& e) {
        detail::fail_field(c, "rule", e.what());
    }
    c.params.epsilon = param_double(c, "epsilon", 0.05);
    c.params.alpha = param_double(c, "alpha", 0.05);
    c.params.bonferroni = param_bool(c, "bonferroni", false);
    if (!(c.params.epsilon > 0.0)) detail::fail_field(c, "epsilon", "must be > 0");
    if (!(c.params.alpha > 0.0 && c.params.alpha < 1.0)) detail::fail_field(c, "alpha", "must lie in (0,1)");

    c.N = get_u64("N", 100);
    c.reps = get_u64("reps", 100);
    c.seed = get_u64("seed", 1);

    try {
        if (j.contains("truth")) c.truths.push_back(io::dgp_from_json(j["truth"], c.d(), "truth"));
        if (j.contains("truths")) {
            if (!j["truths"].is_array()) detail::fail_field(c, "truths", "expected an array of DGPs");
            for (std::size_t k = 0; k < j["truths"].size(); ++k)
                c.truths.push_back(io::dgp_from_json(j["truths"][k], c.d(), "truths[" + std::to_string(k) + "]"));
        }
        if (j.contains("initial")) c.initial = io::family_from_json(j["initial"], c.d(), "initial");
        if (j.contains("updated")) c.updated = io::family_from_json(j["updated"], c.d(), "updated");
    } catch (const io::FieldError& e) {
        detail::fail_field(c, e.path(), e.what());
    }

    if (j.contains("output")) {
        const auto& o = j["output"];
        if (!o.is_object()) detail::fail_field(c, "output", "expected {\"path\": ..., \"format\": ...}");
        if (o.contains("path")) {
            if (!o["path"].is_string()) detail::fail_field(c, "output.path", "expected a string");
            c.output_path = o["path"].get<std::string>();
        }
        if (o.contains("format")) {
            try {
                c.format = parse_format(o["format"].get<std::string>());
            } catch (const std::exception& e) {
                detail::fail_field(c, "output.format", e.what());
            }
        }
    }

    if (j.contains("expect")) {
        const auto& ex = j["expect"];
        if (!ex.is_array()) detail::fail_field(c, "expect", "expected an array of checks");
        for (std::size_t k = 0; k < ex.size(); ++k) {
            const std::string p = "expect[" + std::to_string(k) + "]";
            const auto& e = ex[k];
            if (!e.is_object() || !e.contains("metric") || !e.contains("op") || !e.contains("value"))
                detail::fail_field(c, "expect", p + " needs metric, op and value");
            Check ch;
            ch.metric = e["metric"].get<std::string>();
            ch.op = e["op"].get<std::string>();
            if (ch.op != ">=" && ch.op != ">" && ch.op != "<=" && ch.op != "<" && ch.op != "==")
                detail::fail_field(c, "op", p + ": unknown operator '" + ch.op + "'");
            if (!e["value"].is_number()) detail::fail_field(c, "value", p + ": expected a number");
            ch.value = e["value"].get<double>();
            if (e.contains("se_band")) ch.se_band = e["se_band"].get<double>();
            if (e.contains("tol")) ch.tol = e["tol"].get<double>();
            c.expects.push_back(ch);
        }
    }
    return c;
}

/// Semantic checks beyond the JSON shape.
inline void validate_config(const ExperimentConfig& c) {
    if (c.reps < 1) detail::fail_field(c, "reps", "must be >= 1");
    if (scenario_needs_truth(c.scenario) && c.truths.empty())
        detail::fail_field(c, "truth", "this scenario needs a truth (\"truth\" or \"truths\")");
    const bool sampled = c.scenario == "illustrative" || c.scenario == "coverage" ||
                         c.scenario == "bayes_counterexample" || c.scenario == "bernoulli_model" ||
                         c.scenario == "gaussian_model";
    if (sampled && c.N < 1) detail::fail_field(c, "N", "must be >= 1");
    if (c.scenario == "illustrative" && c.rule == Rule::Bayes)
        detail::fail_field(c, "rule", "the illustrative scenario takes family-valued rules (atu, ml, fb, riid, bonferroni)");
    if ((c.scenario == "bernoulli_model" || c.scenario == "regret_example" || c.scenario == "theorem2_demo") &&
        c.d() != 2)
        detail::fail_field(c, "outcomes", "this scenario is binary");
}

} // namespace robust::harness
