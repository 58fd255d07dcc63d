#pragma once

// Command line front end.
//
//   robust_update run <config.json> [--seed S] [--reps R] [--out PATH] [--format csv|json]
//   robust_update validate <config.json> [--seed S] [--reps R]
//   robust_update list-scenarios
//
// Exit codes: 0 ok, 1 config or usage error, 2 failed expectation check or
// missing witness.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "robust/error.hpp"
#include "robust/harness/config.hpp"
#include "robust/harness/report.hpp"
#include "robust/harness/scenarios.hpp"

namespace robust::harness {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitAssertion = 2;

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> reps;
    std::optional<std::string> out;
    std::optional<std::string> format;
};

inline ExperimentConfig load_config(const std::string& path, const Overrides& o) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path + ":0: cannot open config file");
    std::ostringstream ss;
    ss << in.rdbuf();
    ExperimentConfig c = parse_config(ss.str(), path);
    if (o.seed) c.seed = *o.seed;
    if (o.reps) c.reps = *o.reps;
    if (o.out) c.output_path = *o.out;
    if (o.format) c.format = parse_format(*o.format);
    validate_config(c);
    return c;
}

inline std::string render(const Report& r, Format f) {
    return f == Format::Csv ? report_to_csv(r) : report_to_json(r).dump(2) + "\n";
}

inline void write_report(const Report& r, const ExperimentConfig& c) {
    const std::string text = render(r, c.format);
    if (c.output_path.empty() || c.output_path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(c.output_path, std::ios::binary);
    if (!out) throw ConfigError(c.source + ":0: cannot write '" + c.output_path + "'");
    out << text;
}

inline void print_checks(const Report& r, std::ostream& os) {
    for (const auto& c : r.checks) {
        os << (c.pass ? "PASS " : "FAIL ") << c.metric << ' ' << c.op << ' ' << format_double(c.threshold)
           << " observed=" << (c.observed ? format_double(*c.observed) : std::string("missing")) << '\n';
    }
}

inline int cli_main(int argc, const char* const* argv) {
    CLI::App app{"Robust updating experiments"};
    app.require_subcommand(1);
    Overrides o;
    std::string path;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", path, "experiment config (JSON)")->required();
        sub->add_option("--seed", o.seed, "master seed override");
        sub->add_option("--reps", o.reps, "replication count override");
    };
    CLI::App* run = app.add_subcommand("run", "run a scenario and write its report");
    add_common(run);
    run->add_option("--out", o.out, "report path ('-' for stdout)");
    run->add_option("--format", o.format, "report format")->check(CLI::IsMember({"csv", "json"}));
    CLI::App* validate = app.add_subcommand("validate", "check a config without running it");
    add_common(validate);
    CLI::App* list = app.add_subcommand("list-scenarios", "print the scenario names");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    if (list->parsed()) {
        for (const auto& s : scenario_names()) std::cout << s << '\n';
        return kExitOk;
    }
    try {
        const ExperimentConfig c = load_config(path, o);
        if (validate->parsed()) {
            std::cout << "ok: " << c.scenario << " (" << c.name << ")\n";
            return kExitOk;
        }
        const Report r = run_scenario(c);
        write_report(r, c);
        print_checks(r, std::cerr);
        return r.all_checks_pass() ? kExitOk : kExitAssertion;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.code() == Errc::WitnessNotFound ? kExitAssertion : kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
}

} // namespace robust::harness
