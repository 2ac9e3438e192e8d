// fdal command-line runner: solve, verify, sweep.

#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fdal/runner/config.hpp"
#include "fdal/runner/output.hpp"
#include "fdal/runner/scenarios.hpp"
#include "fdal/runner/suites.hpp"

namespace {

using namespace fdal::runner;

enum Exit { ok = 0, verify_failed = 1, config_error = 2, solver_error = 3 };

int cmd_solve(const std::string& path)
{
    const auto cfg = load_config(path);
    const auto dir = output_dir(cfg.output.dir);
    fs::create_directories(dir);
    const auto result = run_scenario(cfg);
    CsvWriter csv(dir / cfg.output.csv, {}, result.complex);
    csv.write(result);
    write_json(dir / cfg.output.report, solve_report(cfg, result));
    std::cout << "wrote " << (dir / cfg.output.csv).string() << " and " << (dir / cfg.output.report).string()
              << '\n';
    return ok;
}

int cmd_verify(const std::string& suite, std::uint64_t seed, const std::optional<std::string>& out_dir)
{
    if (!is_suite(suite)) throw ConfigError("unknown suite '" + suite + "'");
    SuiteOptions opts;
    opts.seed = seed;
    const auto report = run_suite(suite, opts, [](const Criterion& c) {
        std::cout << "criterion " << c.id << " (" << c.name << "): " << (c.pass ? "PASS" : "FAIL");
        if (!c.detail.empty()) std::cout << " - " << c.detail;
        std::cout << std::endl;
    });
    const auto dir = output_dir(out_dir);
    fs::create_directories(dir);
    const auto path = dir / ("verify-" + suite + ".json");
    write_json(path, report);
    std::cout << "report: " << path.string() << '\n';
    return report.at("pass").get<bool>() ? ok : verify_failed;
}

std::vector<double> parse_values(const std::string& list)
{
    std::vector<double> v;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.find_first_not_of(" \t") == std::string::npos) continue;
        try {
            std::size_t used = 0;
            v.push_back(std::stod(item, &used));
            if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("--values: cannot parse '" + item + "'");
        }
    }
    if (v.empty()) throw ConfigError("--values: empty value list");
    return v;
}

/// Sets one parameter of the source document and re-validates it.
ExperimentConfig with_param(const ExperimentConfig& base, const std::string& name, double value)
{
    json j = base.source;
    if (name == "alpha" || name == "beta" || name == "h" || name == "c") {
        j["params"][name] = value;
    } else if (name == "t_end") {
        j["time"]["t_end"] = value;
    } else if (name == "n_steps" || name == "n_points" || name == "samples" || name == "seed") {
        if (value != std::floor(value) || value < 0) throw ConfigError("--param " + name + ": needs integer values");
        const auto iv = static_cast<std::uint64_t>(value);
        if (name == "n_steps") j["time"]["n_steps"] = iv;
        else if (name == "n_points") j["space"]["n_points"] = iv;
        else j[name] = iv;
    } else {
        throw ConfigError("--param: unknown parameter '" + name +
                          "' (alpha, beta, h, c, t_end, n_steps, n_points, samples, seed)");
    }
    return parse_config(j);
}

int cmd_sweep(const std::string& path, const std::string& param, const std::string& values)
{
    const auto base = load_config(path);
    const auto list = parse_values(values);
    std::vector<ExperimentConfig> runs;
    for (double v : list) runs.push_back(with_param(base, param, v));

    const auto dir = output_dir(base.output.dir);
    fs::create_directories(dir);
    const bool complex = base.scenario == "subordinated_cosine";
    CsvWriter csv(dir / base.output.csv, {param}, complex);
    json manifest;
    manifest["schema"] = report_schema;
    manifest["kind"] = "sweep";
    manifest["scenario"] = base.scenario;
    manifest["param"] = param;
    manifest["config"] = base.source;
    manifest["runs"] = json::array();
    bool all = true;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        json entry{{"value", list[i]}};
        try {
            const auto r = run_scenario(runs[i]);
            csv.write(r, {format_double(list[i])});
            entry["status"] = "ok";
            entry["metrics"] = r.metrics;
        } catch (const ScenarioError& e) {
            all = false;
            entry["status"] = "error";
            entry["error"] = e.what();
            std::cerr << "fdal sweep: " << param << " = " << list[i] << ": " << e.what() << '\n';
        }
        manifest["runs"].push_back(entry);
    }
    csv.flush();
    manifest["complete"] = all;
    write_json(dir / base.output.report, manifest);
    std::cout << "wrote " << (dir / base.output.csv).string() << " and " << (dir / base.output.report).string()
              << '\n';
    return all ? ok : solver_error;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Fractional d'Alembert solvers"};
    app.require_subcommand(1);

    std::string config_path, suite, param, values;
    std::uint64_t seed = SuiteOptions{}.seed;
    std::optional<std::string> out_dir;

    auto* solve = app.add_subcommand("solve", "Run one configured scenario");
    solve->add_option("--config", config_path, "JSON config file")->required();

    auto* verify = app.add_subcommand("verify", "Run a verification suite");
    verify->add_option("--suite", suite, "classical-limits, oracle-equivalence, probabilistic, lattice, "
                                         "telegraph, special-functions, determinism or all")
        ->required();
    verify->add_option("--seed", seed, "RNG seed");
    verify->add_option("--output-dir", out_dir, "Report directory (default $FDAL_OUTPUT_DIR or .)");

    auto* sweep = app.add_subcommand("sweep", "Run a scenario over a list of parameter values");
    sweep->add_option("--config", config_path, "JSON config file")->required();
    sweep->add_option("--param", param, "Parameter to vary")->required();
    sweep->add_option("--values", values, "Comma-separated values")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : config_error;
    }

    try {
        if (*solve) return cmd_solve(config_path);
        if (*verify) return cmd_verify(suite, seed, out_dir);
        return cmd_sweep(config_path, param, values);
    } catch (const ConfigError& e) {
        std::cerr << "fdal: config error: " << e.what() << '\n';
        return config_error;
    } catch (const ScenarioError& e) {
        std::cerr << "fdal: solver error: " << e.what() << '\n';
        return solver_error;
    } catch (const std::exception& e) {
        std::cerr << "fdal: error: " << e.what() << '\n';
        return solver_error;
    }
}
