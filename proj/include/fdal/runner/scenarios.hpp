#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "fdal/lattice.hpp"
#include "fdal/resolvent.hpp"
#include "fdal/runner/config.hpp"
#include "fdal/telegraph.hpp"
#include "fdal/volterra.hpp"

namespace fdal::runner {

/// One output time.
struct Frame {
    double t = 0.0;
    std::vector<double> x;
    std::vector<std::complex<double>> u;
};

struct ScenarioResult {
    std::vector<Frame> frames;
    bool complex = false;
    json metrics = json::object();
};

/// Solver failure inside a scenario (exit code 3).
class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<std::size_t> output_nodes(const ExperimentConfig& c)
{
    std::vector<std::size_t> idx;
    for (std::size_t j = 0; j < c.n_steps; j += c.stride()) idx.push_back(j);
    idx.push_back(c.n_steps);
    return idx;
}

template <class T>
Frame frame(double t, const BasicField<T>& f)
{
    Frame fr;
    fr.t = t;
    fr.x.resize(f.size());
    fr.u.resize(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        fr.x[i] = f.grid.node(i);
        fr.u[i] = std::complex<double>(f[i]);
    }
    return fr;
}

inline Backend backend_of(const ExperimentConfig& c)
{
    if (c.backend == "montecarlo") return MonteCarloBackend{c.samples, RngSeed{c.seed, 0}};
    if (c.backend == "spectral") return SpectralBackend{};
    return QuadratureBackend{};
}

template <class F>
ScenarioResult at_outputs(const ExperimentConfig& c, F&& eval)
{
    ScenarioResult r;
    const auto tg = c.time_grid();
    for (std::size_t j : output_nodes(c)) r.frames.push_back(frame(tg.node(j), eval(tg.node(j))));
    return r;
}

template <class T>
ScenarioResult from_trajectory(const ExperimentConfig& c, const std::vector<BasicField<T>>& traj)
{
    ScenarioResult r;
    const auto tg = c.time_grid();
    for (std::size_t j : output_nodes(c)) r.frames.push_back(frame(tg.node(j), traj[j]));
    return r;
}

inline ScenarioResult dispatch(const ExperimentConfig& c)
{
    const auto p = c.params();
    if (c.scenario == "wave_fpp") {
        const double b = p.half();
        const auto window = fdal::detail::auto_window(FppKind::plus_literal, b, c.t_end);
        const auto big = wave_fpp_pmf(b, c.t_end, window);
        ScenarioResult r;
        const auto tg = c.time_grid();
        for (std::size_t j : output_nodes(c)) {
            const double t = tg.node(j);
            Frame fr;
            fr.t = t;
            LatticeMass m;
            if (t == 0.0) {
                m.k_min = big.k_min;
                m.values.assign(big.size(), 0.0);
                m.values[static_cast<std::size_t>(-big.k_min)] = 1.0;
            } else {
                m = wave_fpp_pmf(b, t, LatticeWindow{big.k_min, big.k_max()});
            }
            for (std::size_t i = 0; i < m.size(); ++i) {
                fr.x.push_back(static_cast<double>(m.k_min + static_cast<long>(i)));
                fr.u.emplace_back(m.values[i]);
            }
            r.frames.push_back(std::move(fr));
        }
        r.metrics["window_k_min"] = big.k_min;
        r.metrics["window_k_max"] = big.k_max();
        r.metrics["final_mass"] = big.mass();
        return r;
    }

    const SpaceGrid g = *c.space;
    const Field phi = Field::sample(g, c.phi);
    const Field psi = Field::sample(g, c.psi);
    const Backend backend = backend_of(c);

    if (c.scenario == "fujita")
        return at_outputs(c, [&](double t) { return fujita_solution(p, t, phi, psi, backend); });
    if (c.scenario == "general_beta")
        return from_trajectory(c, general_beta_trajectory(p, c.time_grid(), phi, psi, backend));
    if (c.scenario == "rl_problem") return from_trajectory(c, rl_problem_trajectory(p, c.time_grid(), psi, backend));
    if (c.scenario == "volterra") {
        const auto A = DiscreteOperator::second_derivative(g, p.c);
        const auto f = initial_data_source(p.beta, c.time_grid(), phi, psi);
        const auto tr = solve_volterra(p.alpha, A, c.time_grid(), f);
        auto r = from_trajectory(c, tr.u);
        r.metrics["volterra_residual"] = volterra_residual(p.alpha, A, tr, f);
        return r;
    }
    if (c.scenario == "sequential") {
        const auto A2 = DiscreteOperator::second_derivative(g, p.c);
        const auto tr = solve_sequential(p, A2, c.time_grid(), phi, psi);
        auto r = from_trajectory(c, tr.u);
        r.metrics["sequential_residual"] = sequential_residual(p, A2, tr);
        r.metrics["energy_final"] = tr.energy.back();
        return r;
    }
    if (c.scenario == "telegraph_spectral")
        return at_outputs(c, [&](double t) { return telegraph_spectral(p, t, phi, psi); });
    if (c.scenario == "telegraph_subordinated") {
        if (c.backend == "montecarlo")
            return at_outputs(c, [&](double t) {
                return telegraph_subordinated(p, t, phi, TelegraphMonteCarlo{c.samples, RngSeed{c.seed, 0}});
            });
        return at_outputs(c, [&](double t) { return telegraph_subordinated(p, t, phi); });
    }
    if (c.scenario == "kac")
        return at_outputs(c, [&](double t) {
            if (t == 0.0) return phi;
            return kac_simulate(p, t, phi, c.samples, RngSeed{c.seed, 0});
        });
    // subordinated_cosine
    auto r = at_outputs(c, [&](double t) { return subordinated_cosine(p, t, phi); });
    r.complex = true;
    return r;
}

} // namespace detail

/// Runs a configured scenario. Numerical failures surface as ScenarioError.
inline ScenarioResult run_scenario(const ExperimentConfig& c)
{
    ScenarioResult r;
    try {
        r = detail::dispatch(c);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ScenarioError(c.scenario + ": " + e.what());
    }
    const Frame& last = r.frames.back();
    double max_abs = 0.0, sum = 0.0, sq = 0.0, max_imag = 0.0;
    for (const auto& v : last.u) {
        max_abs = std::max(max_abs, std::abs(v));
        sum += v.real();
        sq += std::norm(v);
        max_imag = std::max(max_imag, std::abs(v.imag()));
    }
    for (const auto& f : r.frames)
        for (const auto& v : f.u)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw ScenarioError(c.scenario + ": non-finite value at t = " + std::to_string(f.t));
    const double dx = last.x.size() > 1 ? last.x[1] - last.x[0] : 1.0;
    r.metrics["final_time"] = last.t;
    r.metrics["final_max_abs"] = max_abs;
    r.metrics["final_l2_norm"] = std::sqrt(sq * dx);
    r.metrics["final_integral"] = sum * dx;
    if (r.complex) r.metrics["final_max_imag"] = max_imag;
    r.metrics["frames"] = r.frames.size();
    r.metrics["points_per_frame"] = last.x.size();
    return r;
}

} // namespace fdal::runner
