#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <sstream>
#include <vector>

#include "fdal/core/error.hpp"
#include "fdal/core/parallel.hpp"
#include "fdal/core/rng.hpp"
#include "fdal/kernelcalc.hpp"
#include "fdal/mittag_leffler.hpp"
#include "fdal/resolvent.hpp"
#include "fdal/space.hpp"
#include "fdal/subordinator.hpp"

namespace fdal {

/// Fourier symbols of the damped problem at one frequency, for A = c^2 d^2/dx^2.
struct TelegraphSymbols {
    double xi = 0.0;
    /// sqrt(h^2 - c^2 xi^2), principal branch; b_sym^2 = h^2 - c^2 xi^2.
    std::complex<double> root;
    /// i sqrt(c^2 xi^2 - h^2), principal branch (equals +-root).
    std::complex<double> b_sym;
    std::complex<double> eta1;
    std::complex<double> eta2;

    TelegraphSymbols(const FracParams& p, double xi_) : xi(xi_)
    {
        const double d = p.h * p.h - p.c * p.c * xi * xi;
        root = std::sqrt(std::complex<double>(d, 0.0));
        b_sym = std::complex<double>(0.0, 1.0) * std::sqrt(std::complex<double>(-d, 0.0));
        eta1 = -p.h + root;
        eta2 = -p.h - root;
    }

    /// |c xi| within `tol` of h.
    bool singular(const FracParams& p, double tol = 1e-9) const { return std::abs(p.c * std::abs(xi) - p.h) <= tol; }
};

/// Multiplier of u(t) per unit phi-hat (psi = 0):
/// 1/2 [(1 + h/r) E_{alpha/2}(eta1 t^(alpha/2)) + (1 - h/r) E_{alpha/2}(eta2 t^(alpha/2))], r = sqrt(h^2 - c^2 xi^2).
inline std::complex<double> orsingher_beghin_ft(const FracParams& params, double xi, double t)
{
    params.validate();
    detail::require(std::isfinite(xi) && std::isfinite(t) && t >= 0.0, "orsingher_beghin_ft: bad arguments");
    const TelegraphSymbols s(params, xi);
    if (params.h > 0.0 && s.singular(params)) {
        std::ostringstream os;
        os << "orsingher_beghin_ft: singular frequency c|xi| = h at xi = " << xi;
        throw DomainError(os.str());
    }
    if (t == 0.0) return 1.0;
    const double b = params.half();
    const double tau = std::pow(t, b);
    const auto e1 = ml(b, 1.0, s.eta1 * tau);
    const auto e2 = ml(b, 1.0, s.eta2 * tau);
    if (params.h == 0.0) return 0.5 * (e1 + e2);
    const auto q = params.h / s.root;
    return 0.5 * ((1.0 + q) * e1 + (1.0 - q) * e2);
}

/// u and v = D^(alpha/2) u of the spectral solution at one time.
template <class T>
struct TelegraphState {
    BasicField<T> u;
    BasicField<T> v;
};

namespace detail {

/// Range condition tolerance on excluded bins, relative to the largest coefficient.
inline constexpr double range_tol = 1e-10;

template <class T>
BasicField<T> from_spectrum(const BasicField<T>& like, const std::vector<std::complex<double>>& spec, double t)
{
    const auto back = spectral::inverse(spec);
    std::vector<T> v(back.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if constexpr (std::is_same_v<T, double>)
            v[i] = back[i].real();
        else
            v[i] = back[i];
    }
    return BasicField<T>(like.grid, std::move(v), t);
}

} // namespace detail

/// u = 1/2 [S^+ phi + S^- phi] + 1/2 [S^+ - S^-] B^{-1} (psi + h phi), S^+- generated by +-B - h,
/// applied bin-wise with S^+-(t) -> E_{alpha/2}((+-b - h) t^(alpha/2)) and B^{-1} -> 1/b.
/// Also returns v = D^(alpha/2) u.
template <class T>
TelegraphState<T> telegraph_spectral_state(const FracParams& params, double t, const BasicField<T>& phi,
                                           const BasicField<T>& psi)
{
    params.validate();
    require_same_grid(phi, psi);
    spectral::require_periodic(phi.grid, "telegraph_spectral");
    detail::require(std::isfinite(t) && t >= 0.0, "telegraph_spectral: t must be nonnegative");
    const auto& g = phi.grid;
    const auto ph = spectral::forward(phi.values);
    const auto ps = spectral::forward(psi.values);
    const std::size_t n = g.size();
    std::vector<std::complex<double>> rhs(n);
    double scale = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        rhs[k] = ps[k] + params.h * ph[k];
        scale = std::max(scale, std::abs(rhs[k]));
    }
    const double b = params.half();
    const double tau = std::pow(t, b);
    std::vector<std::complex<double>> u(n), v(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double xi = g.wavenumber(k);
        const TelegraphSymbols s(params, xi);
        const auto bs = s.root;
        const auto lp = bs - params.h;  // symbol of B - h
        const auto lm = -bs - params.h; // symbol of -B - h
        const auto ep = t == 0.0 ? std::complex<double>(1.0) : ml(b, 1.0, lp * tau);
        const auto em = t == 0.0 ? std::complex<double>(1.0) : ml(b, 1.0, lm * tau);
        std::complex<double> uk = 0.5 * (ep + em) * ph[k];
        // D^b E_b(l t^b) = l E_b(l t^b)
        std::complex<double> vk = 0.5 * (lp * ep + lm * em) * ph[k];
        if (s.singular(params)) {
            if (std::abs(rhs[k]) > detail::range_tol * std::max(scale, 1e-300)) {
                std::ostringstream os;
                os << "telegraph_spectral: psi + h phi has a component on the excluded bin " << k << " (xi = " << xi
                   << ", |c xi| = h)";
                throw RangeConditionError(os.str());
            }
        } else {
            uk += 0.5 * (ep - em) / bs * rhs[k];
            vk += 0.5 * (lp * ep - lm * em) / bs * rhs[k];
        }
        u[k] = uk;
        v[k] = vk;
    }
    TelegraphState<T> out{detail::from_spectrum(phi, u, t), detail::from_spectrum(phi, v, t)};
    if (t == 0.0) {
        out.u = phi;
        out.u.time = 0.0;
        out.v = psi;
        out.v.time = 0.0;
    }
    return out;
}

template <class T>
BasicField<T> telegraph_spectral(const FracParams& params, double t, const BasicField<T>& phi,
                                 const BasicField<T>& psi)
{
    return telegraph_spectral_state(params, t, phi, psi).u;
}

/// Largest imaginary part of the assembled field for real data (should be roundoff).
inline double telegraph_spectral_imag(const FracParams& params, double t, const Field& phi, const Field& psi)
{
    return max_imag(telegraph_spectral(params, t, to_complex(phi), to_complex(psi)));
}

// ---------------------------------------------------------------------------
// Kac's telegraph process

/// xi_h(t) = int_0^t (-1)^{N_h(s)} ds for one path; N_h has rate h.
inline double telegraph_position(double h, double t, CounterRng& rng)
{
    if (h == 0.0) return t;
    double pos = 0.0, s = 0.0, dir = 1.0;
    for (;;) {
        const double e = rng.exponential(h);
        if (s + e >= t) return pos + dir * (t - s);
        pos += dir * e;
        s += e;
        dir = -dir;
    }
}

/// n draws of xi_h(t).
inline std::vector<double> kac_positions(double h, double t, std::size_t n, RngSeed seed)
{
    detail::require(h >= 0.0 && t >= 0.0, "kac: h and t must be nonnegative");
    std::vector<double> x(n);
    parallel_chunks(n, [&](std::size_t b, std::size_t e, std::size_t) {
        for (std::size_t i = b; i < e; ++i) {
            CounterRng rng(seed, i);
            x[i] = telegraph_position(h, t, rng);
        }
    });
    return x;
}

namespace detail {

/// 1/2 E[phi(x + d) + phi(x - d)] for displacements d with weights w.
template <class T>
BasicField<T> symmetric_average(const BasicField<T>& phi, const std::vector<double>& d, const std::vector<double>& w)
{
    if (phi.grid.periodic()) {
        auto m = displacement_multiplier(phi.grid, d, w);
        for (auto& v : m) v = v.real();
        return spectral::apply_bins(phi, m);
    }
    auto u = average_shifts(phi, d, w, 1.0);
    u += average_shifts(phi, d, w, -1.0);
    u *= 0.5;
    return u;
}

} // namespace detail

/// 1/2 E[phi(x + c xi_h(t)) + phi(x - c xi_h(t))] over n paths (alpha = 2, psi = 0).
template <class T>
BasicField<T> kac_simulate(const FracParams& params, double t, const BasicField<T>& phi, std::size_t n,
                           RngSeed seed)
{
    params.validate();
    detail::require(params.alpha == 2.0, "kac_simulate: requires alpha = 2");
    detail::require(n > 0, "kac_simulate: sample count must be positive");
    auto x = kac_positions(params.h, t, n, seed);
    for (auto& v : x) v *= params.c;
    const std::vector<double> w(n, 1.0 / static_cast<double>(n));
    auto u = detail::symmetric_average(phi, x, w);
    u.time = t;
    return u;
}

/// Pointwise Kac estimates with standard errors.
inline std::vector<ProbeStat> kac_probes(const FracParams& params, double t, const Field& phi,
                                         const std::vector<double>& probes, std::size_t n, RngSeed seed)
{
    params.validate();
    detail::require(params.alpha == 2.0, "kac_probes: requires alpha = 2");
    const auto x = kac_positions(params.h, t, n, seed);
    std::vector<ProbeStat> out;
    for (double p : probes) {
        double s = 0.0, s2 = 0.0;
        for (double xi : x) {
            const double v = 0.5 * (interpolate(phi, p + params.c * xi) + interpolate(phi, p - params.c * xi));
            s += v;
            s2 += v * v;
        }
        const double dn = static_cast<double>(n);
        const double mean = s / dn;
        out.push_back({p, mean, std::sqrt(std::max(0.0, s2 / dn - mean * mean) / std::max(1.0, dn - 1.0))});
    }
    return out;
}

/// Empirical characteristic function E cos(xi * c * xi_h(t)) with its standard error.
inline std::pair<double, double> kac_characteristic(const FracParams& params, double t, double xi, std::size_t n,
                                                    RngSeed seed)
{
    const auto x = kac_positions(params.h, t, n, seed);
    double s = 0.0, s2 = 0.0;
    for (double v : x) {
        const double c = std::cos(xi * params.c * v);
        s += c;
        s2 += c * c;
    }
    const double dn = static_cast<double>(n);
    const double mean = s / dn;
    return {mean, std::sqrt(std::max(0.0, s2 / dn - mean * mean) / std::max(1.0, dn - 1.0))};
}

// ---------------------------------------------------------------------------
// Subordination by Y_z

struct TelegraphQuadrature {};
struct TelegraphMonteCarlo {
    std::size_t samples = 100000;
    RngSeed seed{};
};

/// u = 1/2 E[phi(x + c Y_z(t)) + phi(x - c Y_z(t))] (psi = 0).
template <class T, class Mode = TelegraphQuadrature>
BasicField<T> telegraph_subordinated(const FracParams& params, double t, const BasicField<T>& phi, Mode mode = {})
{
    params.validate();
    detail::require(std::isfinite(t) && t >= 0.0, "telegraph_subordinated: t must be nonnegative");
    if (t == 0.0) return phi;
    if (params.alpha == 2.0 && params.h == 0.0) {
        auto u = shift(phi, params.c * t);
        u += shift(phi, -params.c * t);
        u *= 0.5;
        u.time = t;
        return u;
    }
    const TelegraphInverseLaw law(params, t);
    std::vector<double> d, w;
    if constexpr (std::is_same_v<Mode, TelegraphMonteCarlo>) {
        detail::require(mode.samples > 0, "telegraph_subordinated: sample count must be positive");
        d.resize(mode.samples);
        parallel_chunks(mode.samples, [&](std::size_t b, std::size_t e, std::size_t) {
            for (std::size_t i = b; i < e; ++i) d[i] = params.c * law.sample(mode.seed, i).y;
        });
        w.assign(mode.samples, 1.0 / static_cast<double>(mode.samples));
    } else {
        const auto& r = law.rule();
        for (std::size_t q = 0; q < r.size(); ++q) {
            d.push_back(params.c * r.nodes[q]);
            w.push_back(r.weights[q]);
        }
        if (law.atom() > 0.0) {
            d.push_back(params.c * t);
            w.push_back(law.atom());
        }
    }
    auto u = detail::symmetric_average(phi, d, w);
    u.time = t;
    return u;
}

/// Density of |xi_h(t)| on [0, t) (continuous part, c = 1). The atom e^{-ht} at r = t is telegraph_atom.
inline double w_density(double h, double t, double r, TalbotConfig cfg = {})
{
    detail::require(h >= 0.0 && t > 0.0 && r >= 0.0, "w_density: bad arguments");
    if (h == 0.0 || r >= t) return 0.0;
    return telegraph_inverse_density(TelegraphModel{2.0, h}, t, r, cfg);
}

/// P(|xi_h(t)| <= r).
inline double w_cdf(double h, double t, double r)
{
    detail::require(h >= 0.0 && t > 0.0, "w_cdf: bad arguments");
    if (r >= t) return 1.0;
    if (r < 0.0) return 0.0;
    if (h == 0.0) return 0.0;
    return std::clamp(telegraph_inverse_cdf(FracParams{2.0, 1.0, h, 1.0}, t, r), 0.0, 1.0);
}

} // namespace fdal
