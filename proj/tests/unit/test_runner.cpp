#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include "fdal/runner/config.hpp"
#include "fdal/runner/output.hpp"
#include "fdal/runner/scenarios.hpp"

using namespace fdal;
using namespace fdal::runner;
constexpr double pi = std::numbers::pi;

namespace {

json base_config(const std::string& scenario)
{
    return json::parse(R"({
      "schema": "fdal.config/1",
      "scenario": ")" + scenario + R"(",
      "params": {"alpha": 1.6},
      "time": {"t_end": 1.0, "n_steps": 4},
      "space": {"x_min": -10.0, "x_max": 10.0, "n_points": 128, "periodic": true},
      "phi": {"kind": "gaussian", "width": 1.5},
      "backend": "spectral"
    })");
}

double max_diff(const ScenarioResult& a, const ScenarioResult& b)
{
    EXPECT_EQ(a.frames.size(), b.frames.size());
    double d = 0.0;
    for (std::size_t f = 0; f < a.frames.size(); ++f)
        for (std::size_t i = 0; i < a.frames[f].u.size(); ++i)
            d = std::max(d, std::abs(a.frames[f].u[i] - b.frames[f].u[i]));
    return d;
}

} // namespace

TEST(Config, ParsesSample)
{
    const auto c = parse_config(base_config("fujita"));
    EXPECT_EQ(c.scenario, "fujita");
    EXPECT_DOUBLE_EQ(c.params().beta, 0.8);
    EXPECT_EQ(c.space->size(), 128u);
    EXPECT_EQ(c.stride(), 4u);
}

TEST(Config, Errors)
{
    const auto bad = [](auto edit) {
        auto j = base_config("fujita");
        edit(j);
        EXPECT_THROW(parse_config(j), ConfigError) << j.dump();
    };
    bad([](json& j) { j["schema"] = "other/1"; });
    bad([](json& j) { j["scenario"] = "nope"; });
    bad([](json& j) { j["params"]["alpha"] = 2.5; });
    bad([](json& j) { j["params"]["beta"] = 1.2; });
    bad([](json& j) { j["params"]["h"] = 0.5; });
    bad([](json& j) { j["time"]["n_steps"] = 1; });
    bad([](json& j) { j["time"]["output_stride"] = 9; });
    bad([](json& j) { j["space"]["periodic"] = false; });
    bad([](json& j) { j["phi"]["kind"] = "triangle"; });
    bad([](json& j) { j["extra"] = 1; });
    bad([](json& j) { j.erase("space"); });
    bad([](json& j) { j["backend"] = "gpu"; });
}

TEST(Output, CsvFormat)
{
    auto j = base_config("fujita");
    j["space"] = {{"x_min", 0.0}, {"x_max", 8.0}, {"n_points", 8}, {"periodic", true}};
    j["time"]["output_stride"] = 2;
    const auto c = parse_config(j);
    const auto r = run_scenario(c);
    ASSERT_EQ(r.frames.size(), 3u);
    const auto path = fs::temp_directory_path() / "fdal_runner_csv_test.csv";
    {
        CsvWriter w(path, {"h"}, false);
        w.write(r, {"0.5"});
    }
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "h,t,x,u_real");
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        EXPECT_EQ(std::count(line.begin(), line.end(), ','), 3);
        EXPECT_EQ(line.rfind("0.5,", 0), 0u);
    }
    EXPECT_EQ(rows, 3u * 8u);
    fs::remove(path);
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_EQ(std::stod(format_double(pi)), pi);
}

TEST(Output, DirectoryPrecedence)
{
    ::setenv(output_dir_env, "/tmp/fdal_env_dir", 1);
    EXPECT_EQ(output_dir(std::string("/tmp/explicit")), fs::path("/tmp/explicit"));
    EXPECT_EQ(output_dir(std::nullopt), fs::path("/tmp/fdal_env_dir"));
    ::unsetenv(output_dir_env);
    EXPECT_EQ(output_dir(std::nullopt), fs::current_path());
}

TEST(Scenarios, FujitaSineNode)
{
    // alpha = 2, c = 1: u = cos(t) sin(x) vanishes at t = pi/2
    auto j = base_config("fujita");
    j["params"] = {{"alpha", 2.0}};
    j["time"] = {{"t_end", pi / 2}, {"n_steps", 4}};
    j["space"] = {{"x_min", 0.0}, {"x_max", 2 * pi}, {"n_points", 64}, {"periodic", true}};
    j["phi"] = {{"kind", "sin"}};
    const auto r = run_scenario(parse_config(j));
    for (const auto& v : r.frames.back().u) EXPECT_NEAR(std::abs(v), 0.0, 1e-10);
}

TEST(Scenarios, UndampedTelegraphIsFujita)
{
    auto f = base_config("fujita");
    auto t = base_config("telegraph_spectral");
    t.erase("backend");
    t["params"]["h"] = 0.0;
    EXPECT_LE(max_diff(run_scenario(parse_config(f)), run_scenario(parse_config(t))), 1e-10);
}

TEST(Scenarios, SweepRowAtZeroDamping)
{
    auto t = base_config("telegraph_spectral");
    t.erase("backend");
    const auto fujita = run_scenario(parse_config(base_config("fujita")));
    for (double h : {0.0, 0.5}) {
        t["params"]["h"] = h;
        const double d = max_diff(run_scenario(parse_config(t)), fujita);
        if (h == 0.0)
            EXPECT_LE(d, 1e-10);
        else
            EXPECT_GT(d, 1e-3);
    }
}

TEST(Scenarios, AllSamplesRun)
{
    for (const auto& e : fs::directory_iterator(FDAL_SAMPLES_DIR)) {
        if (e.path().extension() != ".json") continue;
        const auto c = load_config(e.path().string());
        const auto r = run_scenario(c);
        EXPECT_FALSE(r.frames.empty()) << e.path();
        for (const auto& f : r.frames)
            for (const auto& v : f.u) ASSERT_TRUE(std::isfinite(v.real()) && std::isfinite(v.imag())) << e.path();
    }
}
