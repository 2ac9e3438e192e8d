#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fdal/kernelcalc.hpp"
#include "fdal/space.hpp"

namespace fdal::runner {

using json = nlohmann::json;

inline constexpr const char* config_schema = "fdal.config/1";
inline constexpr const char* report_schema = "fdal.report/1";

/// Invalid configuration (exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Named initial datum.
struct InitialData {
    std::string kind = "zero";
    double amplitude = 1.0;
    double center = 0.0;
    double width = 1.0;
    double k = 1.0;
    double a = 0.0;
    double b = 0.0;

    double operator()(double x) const
    {
        if (kind == "gaussian") {
            const double s = (x - center) / width;
            return amplitude * std::exp(-s * s);
        }
        if (kind == "sin") return amplitude * std::sin(k * x);
        if (kind == "cos") return amplitude * std::cos(k * x);
        if (kind == "indicator") return x >= a && x <= b ? amplitude : 0.0;
        return 0.0;
    }

    bool is_zero() const { return kind == "zero" || amplitude == 0.0; }
};

struct OutputSpec {
    std::optional<std::string> dir;
    std::string csv = "u.csv";
    std::string report = "report.json";
};

struct ExperimentConfig {
    std::string scenario;
    double alpha = 2.0;
    std::optional<double> beta;
    double h = 0.0;
    double c = 1.0;
    double t_end = 1.0;
    std::size_t n_steps = 64;
    std::optional<std::size_t> output_stride;
    std::optional<SpaceGrid> space;
    InitialData phi;
    InitialData psi;
    std::string backend = "quadrature";
    std::size_t samples = 100000;
    std::uint64_t seed = 1;
    OutputSpec output;
    /// Source document, echoed into reports.
    json source;

    FracParams params() const { return FracParams{alpha, beta.value_or(0.5 * alpha), h, c}; }
    TimeGrid time_grid() const { return TimeGrid(t_end, n_steps); }
    std::size_t stride() const { return output_stride.value_or(n_steps); }
};

inline const std::set<std::string>& scenarios()
{
    static const std::set<std::string> s{"fujita",
                                         "general_beta",
                                         "rl_problem",
                                         "volterra",
                                         "sequential",
                                         "telegraph_spectral",
                                         "telegraph_subordinated",
                                         "kac",
                                         "subordinated_cosine",
                                         "wave_fpp"};
    return s;
}

namespace detail {

inline void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed)
{
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) throw ConfigError(where + ": unknown key '" + it.key() + "'");
}

inline double number(const json& j, const std::string& key, const std::string& where)
{
    if (!j.contains(key)) throw ConfigError(where + ": missing '" + key + "'");
    const auto& v = j.at(key);
    if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(where + "." + key + ": must be finite");
    return d;
}

inline double number_or(const json& j, const std::string& key, const std::string& where, double fallback)
{
    return j.contains(key) ? number(j, key, where) : fallback;
}

inline std::size_t count(const json& j, const std::string& key, const std::string& where)
{
    if (!j.contains(key)) throw ConfigError(where + ": missing '" + key + "'");
    const auto& v = j.at(key);
    if (!v.is_number_integer() || v.get<long long>() <= 0)
        throw ConfigError(where + "." + key + ": expected a positive integer");
    return static_cast<std::size_t>(v.get<long long>());
}

inline InitialData parse_data(const json& j, const std::string& where)
{
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
        throw ConfigError(where + ": expected an object with a string 'kind'");
    InitialData d;
    d.kind = j.at("kind").get<std::string>();
    if (d.kind == "zero") {
        check_keys(j, where, {"kind"});
    } else if (d.kind == "gaussian") {
        check_keys(j, where, {"kind", "center", "width", "amplitude"});
        d.center = number_or(j, "center", where, 0.0);
        d.width = number_or(j, "width", where, 1.0);
        if (!(d.width > 0.0)) throw ConfigError(where + ".width: must be positive");
    } else if (d.kind == "sin" || d.kind == "cos") {
        check_keys(j, where, {"kind", "k", "amplitude"});
        d.k = number_or(j, "k", where, 1.0);
    } else if (d.kind == "indicator") {
        check_keys(j, where, {"kind", "a", "b", "amplitude"});
        d.a = number(j, "a", where);
        d.b = number(j, "b", where);
        if (!(d.a < d.b)) throw ConfigError(where + ": indicator needs a < b");
    } else {
        throw ConfigError(where + ".kind: unknown initial datum '" + d.kind + "'");
    }
    d.amplitude = number_or(j, "amplitude", where, 1.0);
    return d;
}

} // namespace detail

/// Parses and validates a configuration document.
inline ExperimentConfig parse_config(const json& j)
{
    using namespace detail;
    check_keys(j, "config",
               {"schema", "scenario", "params", "time", "space", "phi", "psi", "backend", "samples", "seed", "output"});
    if (!j.contains("schema") || j.at("schema") != config_schema)
        throw ConfigError(std::string("config.schema: expected \"") + config_schema + "\"");
    ExperimentConfig c;
    c.source = j;
    if (!j.contains("scenario") || !j.at("scenario").is_string()) throw ConfigError("config: missing 'scenario'");
    c.scenario = j.at("scenario").get<std::string>();
    if (!scenarios().count(c.scenario)) throw ConfigError("config.scenario: unknown scenario '" + c.scenario + "'");

    if (!j.contains("params")) throw ConfigError("config: missing 'params'");
    const auto& p = j.at("params");
    check_keys(p, "params", {"alpha", "beta", "h", "c"});
    c.alpha = number(p, "alpha", "params");
    if (p.contains("beta")) c.beta = number(p, "beta", "params");
    c.h = number_or(p, "h", "params", 0.0);
    c.c = number_or(p, "c", "params", 1.0);
    try {
        c.params().validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("params: ") + e.what());
    }

    if (!j.contains("time")) throw ConfigError("config: missing 'time'");
    const auto& t = j.at("time");
    check_keys(t, "time", {"t_end", "n_steps", "output_stride"});
    c.t_end = number(t, "t_end", "time");
    c.n_steps = count(t, "n_steps", "time");
    if (!(c.t_end > 0.0)) throw ConfigError("time.t_end: must be positive");
    if (c.n_steps < 2 || c.n_steps > 65536) throw ConfigError("time.n_steps: must lie in [2, 65536]");
    if (t.contains("output_stride")) {
        c.output_stride = count(t, "output_stride", "time");
        if (*c.output_stride > c.n_steps) throw ConfigError("time.output_stride: larger than n_steps");
    }

    if (j.contains("space")) {
        const auto& s = j.at("space");
        check_keys(s, "space", {"x_min", "x_max", "n_points", "periodic"});
        const double lo = number(s, "x_min", "space");
        const double hi = number(s, "x_max", "space");
        const auto n = count(s, "n_points", "space");
        bool periodic = false;
        if (s.contains("periodic")) {
            if (!s.at("periodic").is_boolean()) throw ConfigError("space.periodic: expected a boolean");
            periodic = s.at("periodic").get<bool>();
        }
        if (!(hi > lo)) throw ConfigError("space: x_max must exceed x_min");
        if (n < 8 || n > (1u << 20)) throw ConfigError("space.n_points: must lie in [8, 2^20]");
        c.space = SpaceGrid(lo, hi, n, periodic);
    } else if (c.scenario != "wave_fpp") {
        throw ConfigError("config: missing 'space'");
    }

    if (j.contains("phi")) c.phi = parse_data(j.at("phi"), "phi");
    if (j.contains("psi")) c.psi = parse_data(j.at("psi"), "psi");

    if (j.contains("backend")) {
        if (!j.at("backend").is_string()) throw ConfigError("config.backend: expected a string");
        c.backend = j.at("backend").get<std::string>();
        if (c.backend != "quadrature" && c.backend != "montecarlo" && c.backend != "spectral")
            throw ConfigError("config.backend: expected quadrature, montecarlo or spectral");
    }
    if (j.contains("samples")) c.samples = count(j, "samples", "config");
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned()) throw ConfigError("config.seed: expected a nonnegative integer");
        c.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("output")) {
        const auto& o = j.at("output");
        check_keys(o, "output", {"dir", "csv", "report"});
        for (const char* key : {"dir", "csv", "report"})
            if (o.contains(key) && !o.at(key).is_string())
                throw ConfigError(std::string("output.") + key + ": expected a string");
        if (o.contains("dir")) c.output.dir = o.at("dir").get<std::string>();
        if (o.contains("csv")) c.output.csv = o.at("csv").get<std::string>();
        if (o.contains("report")) c.output.report = o.at("report").get<std::string>();
    }

    // scenario-specific requirements
    const bool half_beta = !c.beta || std::abs(*c.beta - 0.5 * c.alpha) <= 1e-12;
    const std::set<std::string> needs_half{"fujita", "telegraph_spectral", "telegraph_subordinated", "kac",
                                           "subordinated_cosine", "wave_fpp"};
    if (needs_half.count(c.scenario) && !half_beta)
        throw ConfigError("params.beta: scenario '" + c.scenario + "' requires beta = alpha/2");
    if (c.h != 0.0 && !(c.scenario == "telegraph_spectral" || c.scenario == "telegraph_subordinated" ||
                        c.scenario == "kac" || c.scenario == "sequential"))
        throw ConfigError("params.h: damping is only used by telegraph scenarios and 'sequential'");
    if (c.scenario == "kac" && c.alpha != 2.0) throw ConfigError("params.alpha: scenario 'kac' requires alpha = 2");
    if ((c.scenario == "telegraph_subordinated" || c.scenario == "kac" || c.scenario == "subordinated_cosine") &&
        !c.psi.is_zero())
        throw ConfigError("psi: scenario '" + c.scenario + "' requires psi = zero");
    if (c.scenario == "rl_problem" && !c.phi.is_zero()) throw ConfigError("phi: scenario 'rl_problem' uses psi only");
    if (c.scenario == "wave_fpp" && !(c.alpha > 1.0)) throw ConfigError("params.alpha: must exceed 1");
    const bool periodic = c.space && c.space->periodic();
    if ((c.backend == "spectral" || c.scenario == "telegraph_spectral" || c.scenario == "subordinated_cosine") &&
        c.scenario != "wave_fpp" && !periodic)
        throw ConfigError("space.periodic: spectral evaluation requires a periodic grid");
    return c;
}

inline ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

} // namespace fdal::runner
