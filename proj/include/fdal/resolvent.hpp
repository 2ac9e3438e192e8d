#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string>
#include <variant>
#include <vector>


#include "fdal/core/error.hpp"
#include "fdal/core/parallel.hpp"
#include "fdal/core/rng.hpp"
#include "fdal/kernelcalc.hpp"
#include "fdal/mittag_leffler.hpp"
#include "fdal/space.hpp"
#include "fdal/subordinator.hpp"

namespace fdal {

enum class Sign { plus, minus };

inline double sign_value(Sign s) { return s == Sign::plus ? 1.0 : -1.0; }

/// Expectation over the inverse subordinator by Gauss-Legendre panels on its density.
struct QuadratureBackend {};

/// Expectation by averaging over `samples` inverse-subordinator draws.
struct MonteCarloBackend {
    std::size_t samples = 100000;
    RngSeed seed{};
};

/// Exact Fourier multiplier E_{alpha/2}(+-i c xi t^(alpha/2)) (periodic grids only).
struct SpectralBackend {};

using Backend = std::variant<QuadratureBackend, MonteCarloBackend, SpectralBackend>;

inline std::string backend_name(const Backend& b)
{
    switch (b.index()) {
    case 0: return "quadrature";
    case 1: return "montecarlo";
    default: return "spectral";
    }
}

namespace detail {

/// Multiplier sum_q w_q exp(i xi d_q) on every bin, by rotation recurrences in k.
inline std::vector<std::complex<double>> displacement_multiplier(const SpaceGrid& g, const std::vector<double>& d,
                                                                 const std::vector<double>& w)
{
    using cplx = std::complex<double>;
    const std::size_t n = g.size();
    const std::size_t half = n / 2;
    const double dxi = 2.0 * std::numbers::pi / g.length();
    const std::size_t count = d.size();
    // positive bins 0..half by recurrence; chunked so the sum order is fixed
    const auto pos = parallel_reduce(
        count, std::vector<cplx>(half + 1, cplx(0.0)),
        [&](std::vector<cplx>& acc, std::size_t q) {
            const cplx step = std::polar(1.0, dxi * d[q]);
            cplx r(w[q], 0.0);
            for (std::size_t k = 0; k <= half; ++k) {
                acc[k] += r;
                r *= step;
                // restart the recurrence every 64 bins against rounding drift
                if ((k & 63) == 63) r = w[q] * std::polar(1.0, dxi * d[q] * static_cast<double>(k + 1));
            }
        },
        [](std::vector<cplx>& tot, const std::vector<cplx>& part) {
            for (std::size_t k = 0; k < tot.size(); ++k) tot[k] += part[k];
        });
    std::vector<cplx> out(n);
    for (std::size_t k = 0; k <= half && k < n; ++k) out[k] = pos[k];
    // negative bins are conjugates
    for (std::size_t k = half + 1; k < n; ++k) out[k] = std::conj(pos[n - k]);
    if (auto nyq = g.nyquist()) out[*nyq] = pos[*nyq].real();
    return out;
}

inline void validate_resolvent_args(const FracParams& p, double t)
{
    p.validate();
    require(std::isfinite(t) && t >= 0.0, "half resolvent: t must be nonnegative");
}

/// Draws of c*Y(t) for the Monte-Carlo backend.
inline std::vector<double> inverse_draws(const FracParams& p, double t, const MonteCarloBackend& mc)
{
    require(mc.samples > 0, "montecarlo backend: sample count must be positive");
    StableModel m{p.half()};
    std::vector<double> y(mc.samples);
    parallel_chunks(mc.samples, [&](std::size_t b, std::size_t e, std::size_t) {
        for (std::size_t i = b; i < e; ++i) y[i] = p.c * sample_inverse(m, t, mc.seed, i).y;
    });
    return y;
}

/// Applies E[phi(x + sgn * d)] with displacements d_q and weights w_q.
template <class T>
BasicField<T> average_shifts(const BasicField<T>& phi, const std::vector<double>& d, const std::vector<double>& w,
                             double sgn)
{
    std::vector<double> sd(d.size());
    for (std::size_t q = 0; q < d.size(); ++q) sd[q] = sgn * d[q];
    if (phi.grid.periodic()) return spectral::apply_bins(phi, displacement_multiplier(phi.grid, sd, w));
    LagKernel k;
    const double dx = phi.grid.dx();
    double lo = 0.0, hi = 0.0;
    for (double v : sd) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    k.reserve_range(static_cast<long>(std::floor(lo / dx)) - 1, static_cast<long>(std::floor(hi / dx)) + 2);
    for (std::size_t q = 0; q < sd.size(); ++q) k.add_displacement(sd[q] / dx, w[q]);
    return apply_lag_kernel(phi, k);
}

} // namespace detail

namespace detail {

/// Displacements c Y and their weights for the quadrature and Monte-Carlo backends.
inline void displacements(const FracParams& p, double t, const Backend& backend, std::vector<double>& d,
                          std::vector<double>& w)
{
    if (const auto* mc = std::get_if<MonteCarloBackend>(&backend)) {
        d = inverse_draws(p, t, *mc);
        w.assign(d.size(), 1.0 / static_cast<double>(d.size()));
        return;
    }
    const auto quad = stable_quadrature(p.half());
    const double scale = p.c * std::pow(t, p.half());
    d.resize(quad->size());
    for (std::size_t q = 0; q < d.size(); ++q) d[q] = scale * quad->nodes()[q];
    w = quad->weights();
}

/// Fourier multiplier of S^+(t) on a periodic grid; S^- has the conjugate multiplier.
inline std::vector<std::complex<double>> plus_multiplier(const FracParams& p, double t, const SpaceGrid& g,
                                                         const Backend& backend)
{
    if (std::holds_alternative<SpectralBackend>(backend)) {
        const double ctb = p.c * std::pow(t, p.half());
        return spectral::bin_values(g, [&](double xi) { return fdal::ml(p.half(), 1.0, {0.0, xi * ctb}); });
    }
    std::vector<double> d, w;
    displacements(p, t, backend, d, w);
    return displacement_multiplier(g, d, w);
}

} // namespace detail

/// S^+-_{alpha/2}(t) phi = E[phi(x +- c Y_{alpha/2}(t))].
template <class T>
BasicField<T> apply_half_resolvent(Sign sign, const FracParams& params, double t, const BasicField<T>& phi,
                                   const Backend& backend = QuadratureBackend{})
{
    detail::validate_resolvent_args(params, t);
    const double sgn = sign_value(sign);
    if (t == 0.0) return phi;
    if (params.alpha == 2.0) return shift(phi, sgn * params.c * t);
    if (std::holds_alternative<SpectralBackend>(backend)) spectral::require_periodic(phi.grid, "spectral backend");
    if (phi.grid.periodic()) {
        auto m = detail::plus_multiplier(params, t, phi.grid, backend);
        if (sign == Sign::minus)
            for (auto& v : m) v = std::conj(v);
        return spectral::apply_bins(phi, m);
    }
    std::vector<double> d, w;
    detail::displacements(params, t, backend, d, w);
    return detail::average_shifts(phi, d, w, sgn);
}

/// Monte-Carlo mean and standard error at one probe point.
struct ProbeStat {
    double x = 0.0;
    double mean = 0.0;
    double std_error = 0.0;
};

/// Pointwise Monte-Carlo estimates of S^+-(t) phi at the probe points.
inline std::vector<ProbeStat> half_resolvent_probes(Sign sign, const FracParams& params, double t, const Field& phi,
                                                    const std::vector<double>& probes, const MonteCarloBackend& mc)
{
    detail::validate_resolvent_args(params, t);
    const double sgn = sign_value(sign);
    std::vector<double> y;
    if (params.alpha == 2.0)
        y.assign(mc.samples, params.c * t);
    else
        y = detail::inverse_draws(params, t, mc);
    std::vector<ProbeStat> out;
    for (double x : probes) {
        struct Acc {
            double s = 0.0, s2 = 0.0;
        };
        const auto acc = parallel_reduce(
            y.size(), Acc{},
            [&](Acc& a, std::size_t i) {
                const double v = interpolate(phi, x + sgn * y[i]);
                a.s += v;
                a.s2 += v * v;
            },
            [](Acc& a, const Acc& b) {
                a.s += b.s;
                a.s2 += b.s2;
            });
        const double n = static_cast<double>(y.size());
        const double mean = acc.s / n;
        const double var = std::max(0.0, acc.s2 / n - mean * mean);
        out.push_back({x, mean, std::sqrt(var / std::max(1.0, n - 1.0))});
    }
    return out;
}

// ---------------------------------------------------------------------------
// d'Alembert-type solution formulas

/// Options for formulas that integrate in time.
struct SolveOptions {
    Backend backend = QuadratureBackend{};
    std::size_t n_steps = 256;
};

/// 1/2 (S^+ + S^-) phi.
template <class T>
BasicField<T> half_sum(const FracParams& p, double t, const BasicField<T>& phi, const Backend& backend)
{
    if (phi.grid.periodic() && t > 0.0 && p.alpha < 2.0) {
        detail::validate_resolvent_args(p, t);
        auto m = detail::plus_multiplier(p, t, phi.grid, backend);
        for (auto& v : m) v = v.real();
        return spectral::apply_bins(phi, m);
    }
    auto u = apply_half_resolvent(Sign::plus, p, t, phi, backend);
    u += apply_half_resolvent(Sign::minus, p, t, phi, backend);
    u *= 0.5;
    return u;
}

/// Psi = (1/c) * integral of psi, so that A Psi = c Psi' = psi.
template <class T>
BasicField<T> velocity_potential(const FracParams& p, const BasicField<T>& psi)
{
    auto big = antiderivative(psi);
    big *= 1.0 / p.c;
    return big;
}

/// Fujita's formula u = 1/2 (S^+ + S^-) phi + 1/2 (S^+ - S^-) Psi.
template <class T>
BasicField<T> fujita_solution(const FracParams& params, double t, const BasicField<T>& phi,
                              const BasicField<T>& psi, const Backend& backend = QuadratureBackend{})
{
    detail::validate_resolvent_args(params, t);
    require_same_grid(phi, psi);
    const auto big = velocity_potential(params, psi);
    auto plus = phi + big;
    auto minus = phi - big;
    auto u = apply_half_resolvent(Sign::plus, params, t, plus, backend);
    u += apply_half_resolvent(Sign::minus, params, t, minus, backend);
    u *= 0.5;
    u.time = t;
    return u;
}

/// Trajectory of u = 1/2 (S^+ + S^-) phi + 1/2 J^beta[(S^+ + S^-) psi] on a time grid.
template <class T>
std::vector<BasicField<T>> general_beta_trajectory(const FracParams& params, const TimeGrid& grid,
                                                   const BasicField<T>& phi, const BasicField<T>& psi,
                                                   const Backend& backend = QuadratureBackend{})
{
    params.validate();
    require_same_grid(phi, psi);
    const std::size_t N = grid.n_steps();
    std::vector<BasicField<T>> out;
    out.reserve(N + 1);
    const bool zero_psi = psi.max_abs() == 0.0;
    std::vector<BasicField<T>> s_psi;
    if (!zero_psi) {
        s_psi.reserve(N + 1);
        for (std::size_t j = 0; j <= N; ++j) {
            auto v = half_sum(params, grid.node(j), psi, backend);
            v *= 2.0;
            s_psi.push_back(std::move(v));
        }
    }
    ProductTrapezoid rule(params.beta, grid.dt());
    for (std::size_t n = 0; n <= N; ++n) {
        auto u = half_sum(params, grid.node(n), phi, backend);
        if (!zero_psi && n > 0) {
            BasicField<T> acc(phi.grid);
            const auto add = [&](double w, const BasicField<T>& f) {
                for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w * f[i];
            };
            add(rule.start(n), s_psi[0]);
            for (std::size_t j = 1; j < n; ++j) add(rule.interior(n - j), s_psi[j]);
            add(rule.diagonal(), s_psi[n]);
            for (std::size_t i = 0; i < u.size(); ++i) u[i] += 0.5 * acc[i];
        }
        u.time = grid.node(n);
        out.push_back(std::move(u));
    }
    return out;
}

template <class T>
BasicField<T> general_beta_solution(const FracParams& params, double t, const BasicField<T>& phi,
                                    const BasicField<T>& psi, const SolveOptions& opts = {})
{
    detail::validate_resolvent_args(params, t);
    if (t == 0.0) return phi;
    if (psi.max_abs() == 0.0) {
        auto u = half_sum(params, t, phi, opts.backend);
        u.time = t;
        return u;
    }
    return general_beta_trajectory(params, TimeGrid(t, opts.n_steps), phi, psi, opts.backend).back();
}

/// Trajectory of u = J^(alpha-1)[1/2 (S^+ + S^-) psi].
template <class T>
std::vector<BasicField<T>> rl_problem_trajectory(const FracParams& params, const TimeGrid& grid,
                                                 const BasicField<T>& psi,
                                                 const Backend& backend = QuadratureBackend{})
{
    params.validate();
    const std::size_t N = grid.n_steps();
    std::vector<BasicField<T>> s_psi;
    s_psi.reserve(N + 1);
    for (std::size_t j = 0; j <= N; ++j) s_psi.push_back(half_sum(params, grid.node(j), psi, backend));
    ProductTrapezoid rule(params.alpha - 1.0, grid.dt());
    std::vector<BasicField<T>> out;
    out.reserve(N + 1);
    for (std::size_t n = 0; n <= N; ++n) {
        BasicField<T> u(psi.grid);
        if (n > 0) {
            const auto add = [&](double w, const BasicField<T>& f) {
                for (std::size_t i = 0; i < u.size(); ++i) u[i] += w * f[i];
            };
            add(rule.start(n), s_psi[0]);
            for (std::size_t j = 1; j < n; ++j) add(rule.interior(n - j), s_psi[j]);
            add(rule.diagonal(), s_psi[n]);
        }
        u.time = grid.node(n);
        out.push_back(std::move(u));
    }
    return out;
}

template <class T>
BasicField<T> rl_problem_solution(const FracParams& params, double t, const BasicField<T>& psi,
                                  const SolveOptions& opts = {})
{
    detail::validate_resolvent_args(params, t);
    if (t == 0.0) return BasicField<T>(psi.grid);
    return rl_problem_trajectory(params, TimeGrid(t, opts.n_steps), psi, opts.backend).back();
}

/// Normalised weight density of H_beta(t) at level y:
/// (g_{beta-alpha/2} * f_{alpha/2})(t, y) / g_{1+beta-alpha/2}(t).
inline double h_beta_weight(const FracParams& params, double t, double y)
{
    params.validate();
    detail::require(t > 0.0, "h_beta_weight: t must be positive");
    if (y < 0.0) return 0.0;
    const double b = params.half();
    const double gam = params.beta - b;
    if (gam <= 1e-14) return inverse_density(StableModel{b}, t, y);
    if (b == 1.0) {
        // Y(s) = s: the convolution reduces to g_gam(t - y)
        return y < t ? g_kernel(gam, t - y) / g_kernel(1.0 + gam, t) : 0.0;
    }
    // (g_gam * f)(t, y) has transform l^(b-1-gam) exp(-y l^b); invert at t = 1 after
    // rescaling and divide by g_{1+gam}(t) = t^gam / Gamma(1+gam).
    const double s = y / std::pow(t, b);
    const double v = fdal::detail::invert_order(
        [b, gam, s](std::complex<double> l) { return (b - 1.0 - gam) * std::log(l) - s * std::pow(l, b); }, 1.0, b,
        TalbotConfig{});
    return std::max(0.0, v) * gamma_fn(1.0 + gam) / std::pow(t, b);
}

// ---------------------------------------------------------------------------
// Half-wave groups (one space dimension)

/// U(+-t) phi: Fourier multiplier exp(-+ i |xi| t).
template <class T>
ComplexField halfwave_group(Sign sign, double t, const BasicField<T>& phi)
{
    spectral::require_periodic(phi.grid, "halfwave_group");
    const double s = sign_value(sign);
    return spectral::apply_bins_complex(
        phi, spectral::bin_values(phi.grid, [&](double xi) { return std::polar(1.0, -s * std::abs(xi) * t); }));
}

/// 1/2 (U(t) + U(-t)) phi.
template <class T>
ComplexField cosine_group(double t, const BasicField<T>& phi)
{
    auto u = halfwave_group(Sign::plus, t, phi);
    u += halfwave_group(Sign::minus, t, phi);
    u *= 0.5;
    return u;
}

/// Subordinated cosine family: integral of f_{alpha/2}(t, s) 1/2 (U(cs) + U(-cs)) phi ds.
template <class T>
ComplexField subordinated_cosine(const FracParams& params, double t, const BasicField<T>& phi)
{
    detail::validate_resolvent_args(params, t);
    if (t == 0.0) {
        ComplexField out(phi.grid);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::complex<double>(phi[i]);
        return out;
    }
    if (params.alpha == 2.0) return cosine_group(params.c * t, phi);
    const auto quad = stable_quadrature(params.half());
    const double tb = std::pow(t, params.half());
    ComplexField acc(phi.grid);
    for (std::size_t q = 0; q < quad->size(); ++q) {
        const auto cq = cosine_group(params.c * tb * quad->nodes()[q], phi);
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += quad->weights()[q] * cq[i];
    }
    return acc;
}

} // namespace fdal
