#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include <boost/math/distributions/poisson.hpp>

#include "fdal/core/error.hpp"
#include "fdal/core/parallel.hpp"
#include "fdal/core/rng.hpp"
#include "fdal/mittag_leffler.hpp"
#include "fdal/resolvent.hpp"
#include "fdal/subordinator.hpp"
#include "fdal/volterra.hpp"

namespace fdal {

/// Signed mass on the integer sites k_min .. k_min + size - 1.
struct LatticeMass {
    long k_min = 0;
    std::vector<double> values;
    double time = 0.0;
    /// Bound on the mass outside the window.
    double tail_bound = 0.0;

    long k_max() const { return k_min + static_cast<long>(values.size()) - 1; }
    std::size_t size() const { return values.size(); }
    double at(long k) const
    {
        return k < k_min || k > k_max() ? 0.0 : values[static_cast<std::size_t>(k - k_min)];
    }
    double mass() const
    {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    SpaceGrid grid() const
    {
        detail::require(values.size() >= 2, "lattice window needs at least two sites");
        return SpaceGrid(static_cast<double>(k_min), static_cast<double>(k_max()), values.size(), false);
    }
};

/// Probability mass function: nonnegative entries, unit mass up to 1e-6.
struct LatticePMF : LatticeMass {
    static LatticePMF from(LatticeMass m)
    {
        for (double& v : m.values) {
            if (v < -1e-12) throw DomainError("LatticePMF: negative probability");
            v = std::max(v, 0.0);
        }
        if (std::abs(m.mass() - 1.0) > 1e-6)
            throw MassDeficit("LatticePMF: window holds mass " + std::to_string(m.mass()) + ", widen it");
        LatticePMF p;
        static_cast<LatticeMass&>(p) = std::move(m);
        return p;
    }
};

/// Integer window [k_min, k_max].
struct LatticeWindow {
    long k_min = 0;
    long k_max = 0;
    std::size_t size() const { return static_cast<std::size_t>(k_max - k_min + 1); }
};

/// Empirical pmf with per-site standard errors.
struct EmpiricalPMF {
    LatticePMF pmf;
    std::vector<double> std_error;
    std::size_t samples = 0;
};

inline double total_variation(const LatticeMass& a, const LatticeMass& b)
{
    const long lo = std::min(a.k_min, b.k_min);
    const long hi = std::max(a.k_max(), b.k_max());
    double s = 0.0;
    for (long k = lo; k <= hi; ++k) s += std::abs(a.at(k) - b.at(k));
    return 0.5 * s;
}

// ---------------------------------------------------------------------------
// Backward-difference operator (A phi)(x) = phi(x) - phi(x-1)

/// e^{+-tA} phi as the truncated series e^{+-t} sum_k (-+t)^k/k! phi(x-k).
/// Periodic grids wrap, otherwise sites left of the window read 0.
inline Field backward_diff_semigroup(Sign sign, double t, const Field& phi)
{
    detail::require(std::isfinite(t) && t >= 0.0, "backward_diff_semigroup: t must be nonnegative");
    detail::require(std::abs(phi.grid.dx() - 1.0) < 1e-12, "backward_diff_semigroup: lattice spacing must be 1");
    if (t == 0.0) return phi;
    // coefficient magnitudes are e^{+-t} t^k/k!, so the tail is e^{2t} (resp. 1) times a Poisson tail
    const double amp = sign == Sign::plus ? std::exp(2.0 * t) : 1.0;
    const boost::math::poisson_distribution<double> pois(t);
    constexpr long max_terms = 512;
    long K = 0;
    while (amp * boost::math::cdf(boost::math::complement(pois, static_cast<double>(K))) > 1e-12) {
        if (++K > max_terms)
            throw SolverError("backward_diff_semigroup: series tail above 1e-12 after 512 terms");
    }
    const double s = sign == Sign::plus ? -1.0 : 1.0;
    std::vector<double> coef(static_cast<std::size_t>(K) + 1);
    // log-space coefficients avoid overflow of t^k
    for (long k = 0; k <= K; ++k) {
        const double mag = std::exp(-s * t + k * std::log(t) - log_gamma(k + 1.0));
        coef[static_cast<std::size_t>(k)] = (s < 0.0 && (k & 1)) ? -mag : mag;
    }
    const auto n = static_cast<long>(phi.size());
    Field out(phi.grid);
    out.time = phi.time;
    for (long i = 0; i < n; ++i) {
        double acc = 0.0;
        for (long k = 0; k <= K; ++k) {
            long j = i - k;
            if (phi.grid.periodic())
                j = detail::wrap_index(j, n);
            else if (j < 0)
                break;
            acc += coef[static_cast<std::size_t>(k)] * phi[static_cast<std::size_t>(j)];
        }
        out[static_cast<std::size_t>(i)] = acc;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Fractional Poisson pmfs

/// Which solution of D^b p = +-(p(k) - p(k-1)), p(0, .) = delta_0.
enum class FppKind {
    /// D^b p = -(p(k) - p(k-1)): the counting pmf on k >= 0.
    minus,
    /// Counting pmf of -N, on k <= 0: D^b q = -(q(k) - q(k+1)).
    plus_reflected,
    /// D^b p = +(p(k) - p(k-1)) taken literally: signed, unit mass, on k >= 0.
    plus_literal,
};

/// Coarsest time-step count of the Volterra route. Solutions at n, 2n and 4n
/// steps are combined by two Richardson steps, with exponents 1+b and min(2, 1+2b).
inline constexpr std::size_t lattice_steps = 512;

namespace detail {

/// Two-level Richardson extrapolation of a solver run at n, 2n and 4n steps.
template <class Solve>
std::vector<double> extrapolated(double b, double t, Solve&& solve)
{
    const auto u1 = solve(TimeGrid(t, lattice_steps));
    const auto u2 = solve(TimeGrid(t, 2 * lattice_steps));
    const auto u4 = solve(TimeGrid(t, 4 * lattice_steps));
    const auto r12 = richardson(u1, u2, 1.0 + b);
    const auto r24 = richardson(u2, u4, 1.0 + b);
    return richardson(r12, r24, std::min(2.0, 1.0 + 2.0 * b)).values;
}

inline double fpp_window_mean(double b, double t) { return std::max({t, std::pow(t, b), 1.0}); }

/// Window holding a Poisson(2 * max(t, t^b, 1)) law up to 1e-12.
inline LatticeWindow auto_window(FppKind kind, double b, double t)
{
    const boost::math::poisson_distribution<double> pois(2.0 * fpp_window_mean(b, t));
    const auto k = static_cast<long>(boost::math::quantile(boost::math::complement(pois, 1e-12))) + 8;
    if (kind == FppKind::plus_reflected) return {-k, 0};
    return {0, k};
}

inline void validate_fpp(double b, double t)
{
    require(std::isfinite(b) && b > 0.0 && b <= 1.0, "fpp: order must lie in (0, 1]");
    require(std::isfinite(t) && t >= 0.0, "fpp: t must be nonnegative");
}

inline SparseMatrix lattice_generator(FppKind kind, std::size_t n)
{
    // rows of D^b p = G p
    std::vector<Eigen::Triplet<double>> trip;
    const auto m = static_cast<int>(n);
    for (int i = 0; i < m; ++i) {
        switch (kind) {
        case FppKind::minus:
            trip.emplace_back(i, i, -1.0);
            if (i > 0) trip.emplace_back(i, i - 1, 1.0);
            break;
        case FppKind::plus_literal:
            trip.emplace_back(i, i, 1.0);
            if (i > 0) trip.emplace_back(i, i - 1, -1.0);
            break;
        case FppKind::plus_reflected:
            trip.emplace_back(i, i, -1.0);
            if (i + 1 < m) trip.emplace_back(i, i + 1, 1.0);
            break;
        }
    }
    SparseMatrix g(m, m);
    g.setFromTriplets(trip.begin(), trip.end());
    return g;
}

} // namespace detail

/// Solution of the fractional Poisson difference system on `window` by the
/// Volterra solver, p = delta_0 + J^b G p, Richardson-extrapolated.
inline LatticeMass fpp_solve(FppKind kind, double b, double t, std::optional<LatticeWindow> window = std::nullopt)
{
    detail::validate_fpp(b, t);
    if (!window && kind == FppKind::plus_literal) {
        // signed weights reach further than the counting pmf; widen until the window keeps unit mass
        LatticeWindow w = detail::auto_window(kind, b, t);
        for (;;) {
            auto m = fpp_solve(kind, b, t, w);
            if (std::abs(1.0 - m.mass()) <= 1e-10) return m;
            if (w.k_max >= 4096) throw MassDeficit("fpp_solve: literal solution does not fit in 4096 sites");
            w.k_max = 2 * w.k_max;
        }
    }
    const LatticeWindow w = window.value_or(detail::auto_window(kind, b, t));
    detail::require(w.k_min <= 0 && w.k_max >= 0 && w.size() >= 2, "fpp: window must contain 0 and two sites");
    if (kind == FppKind::plus_reflected)
        detail::require(w.k_max == 0, "fpp: the reflected pmf lives on k <= 0");
    else
        detail::require(w.k_min == 0, "fpp: the pmf lives on k >= 0");
    LatticeMass out;
    out.k_min = w.k_min;
    out.time = t;
    const SpaceGrid g(static_cast<double>(w.k_min), static_cast<double>(w.k_max), w.size(), false);
    Field delta(g);
    delta[static_cast<std::size_t>(-w.k_min)] = 1.0;
    if (t == 0.0) {
        out.values = delta.values;
        return out;
    }
    const auto G = DiscreteOperator::custom(g, detail::lattice_generator(kind, w.size()));
    out.values =
        detail::extrapolated(b, t, [&](const TimeGrid& tg) { return solve_volterra(b, G, tg, delta).final(); });
    // the system is triangular, so sites inside the window are exact; only the outside mass is lost
    out.tail_bound = std::abs(1.0 - out.mass());
    return out;
}

/// fpp pmf from the Volterra route. FppKind::plus_literal is not a pmf; use fpp_solve.
inline LatticePMF fpp_pmf(FppKind kind, double b, double t, std::optional<LatticeWindow> window = std::nullopt)
{
    detail::require(kind != FppKind::plus_literal, "fpp_pmf: the literal + system is signed, use fpp_solve");
    return LatticePMF::from(fpp_solve(kind, b, t, window));
}

/// P(N(t) = k) = (t^b)^k E_b^(k)(-t^b) / k! and its reflected and literal variants.
inline LatticeMass fpp_closed_form(FppKind kind, double b, double t, std::optional<LatticeWindow> window = std::nullopt)
{
    detail::validate_fpp(b, t);
    const LatticeWindow w = window.value_or(detail::auto_window(kind, b, t));
    LatticeMass out;
    out.k_min = w.k_min;
    out.time = t;
    out.values.assign(w.size(), 0.0);
    const double tb = std::pow(t, b);
    const double z = kind == FppKind::plus_literal ? tb : -tb;
    for (long site = w.k_min; site <= w.k_max; ++site) {
        const long k = kind == FppKind::plus_reflected ? -site : site;
        if (k < 0) continue;
        double v = 0.0;
        if (t == 0.0)
            v = k == 0 ? 1.0 : 0.0;
        else {
            const double d = ml_derivative({b, 1.0, {z, 0.0}}, static_cast<int>(k)).real();
            v = std::exp(k * std::log(tb) - log_gamma(k + 1.0)) * d;
            if (kind == FppKind::plus_literal && (k & 1)) v = -v;
        }
        out.values[static_cast<std::size_t>(site - w.k_min)] = v;
    }
    out.tail_bound = std::abs(1.0 - out.mass());
    return out;
}

/// p = 1/2 (p^+ + p^-) with p^+ the literal solution; signed, on k >= 0.
inline LatticeMass wave_fpp_pmf(double b, double t, std::optional<LatticeWindow> window = std::nullopt)
{
    detail::validate_fpp(b, t);
    const auto plus = fpp_solve(FppKind::plus_literal, b, t, window);
    const auto minus = fpp_solve(FppKind::minus, b, t, LatticeWindow{plus.k_min, plus.k_max()});
    LatticeMass out = minus;
    for (std::size_t i = 0; i < out.size(); ++i) out.values[i] = 0.5 * (plus.values[i] + minus.values[i]);
    out.tail_bound = 0.5 * (plus.tail_bound + minus.tail_bound);
    if (std::abs(out.mass() - 1.0) > 1e-6)
        throw MassDeficit("wave_fpp_pmf: window holds mass " + std::to_string(out.mass()) + ", widen it");
    return out;
}

/// The same mixture from the sequential solver: D^b D^b p = p(k) - 2p(k-1) + p(k-2),
/// p(0) = delta_0, D^b p(0) = 0, Richardson-extrapolated.
inline LatticeMass wave_fpp_sequential(double b, double t, std::optional<LatticeWindow> window = std::nullopt)
{
    detail::validate_fpp(b, t);
    detail::require(b > 0.5, "wave_fpp_sequential: needs alpha = 2b > 1");
    LatticeWindow w;
    if (window)
        w = *window;
    else {
        const auto probe = fpp_solve(FppKind::plus_literal, b, t);
        w = {probe.k_min, probe.k_max()};
    }
    const SpaceGrid g(static_cast<double>(w.k_min), static_cast<double>(w.k_max), w.size(), false);
    const auto A = DiscreteOperator::lattice_backward_difference(g);
    const auto A2 = A.squared();
    Field delta(g);
    delta[static_cast<std::size_t>(-w.k_min)] = 1.0;
    const Field zero(g);
    LatticeMass out;
    out.k_min = w.k_min;
    out.time = t;
    if (t == 0.0) {
        out.values = delta.values;
        return out;
    }
    const FracParams p{2.0 * b, b, 0.0, 1.0};
    out.values = detail::extrapolated(
        b, t, [&](const TimeGrid& tg) { return solve_sequential(p, A2, tg, delta, zero).final(); });
    out.tail_bound = std::abs(1.0 - out.mass());
    return out;
}

// ---------------------------------------------------------------------------
// Simulation: N(Y_b(t)) with a unit-rate Poisson process N

namespace detail {

/// Stream for the Poisson clock, distinct from the subordinator stream.
inline RngSeed poisson_stream(RngSeed s) { return {s.seed, s.stream ^ 0x5851f42d4c957f2dULL}; }

inline long poisson_count(double level, CounterRng& rng)
{
    long k = 0;
    double s = rng.exponential();
    while (s <= level) {
        ++k;
        s += rng.exponential();
    }
    return k;
}

} // namespace detail

/// One draw of N(Y_b(t)).
inline long sample_fpp(double b, double t, RngSeed seed, std::uint64_t index)
{
    detail::validate_fpp(b, t);
    const double y = sample_inverse(StableModel{b}, t, seed, index).y;
    CounterRng rng(detail::poisson_stream(seed), index);
    return detail::poisson_count(y, rng);
}

/// Counts N(Y_b(t_j)) along one path of S and one path of N.
inline std::vector<long> sample_fpp_path(double b, const std::vector<double>& times, RngSeed seed,
                                         std::uint64_t index, double du = 1e-3)
{
    const auto y = sample_inverse_path(StableModel{b}, times, seed, index, du);
    CounterRng rng(detail::poisson_stream(seed), index);
    std::vector<long> out(times.size());
    long k = 0;
    double next = rng.exponential();
    for (std::size_t j = 0; j < times.size(); ++j) {
        while (next <= y[j]) {
            ++k;
            next += rng.exponential();
        }
        out[j] = k;
    }
    return out;
}

/// Empirical pmf of N(Y_b(t)) over n draws.
inline EmpiricalPMF simulate_fpp(double b, double t, std::size_t n, RngSeed seed)
{
    detail::require(n > 0, "simulate_fpp: sample count must be positive");
    std::vector<long> k(n);
    parallel_chunks(n, [&](std::size_t lo, std::size_t hi, std::size_t) {
        for (std::size_t i = lo; i < hi; ++i) k[i] = sample_fpp(b, t, seed, i);
    });
    const long k_max = std::max(1L, *std::max_element(k.begin(), k.end()));
    LatticeMass m;
    m.time = t;
    m.values.assign(static_cast<std::size_t>(k_max) + 1, 0.0);
    for (long v : k) m.values[static_cast<std::size_t>(v)] += 1.0;
    EmpiricalPMF out;
    out.samples = n;
    const double dn = static_cast<double>(n);
    for (double& v : m.values) {
        v /= dn;
        out.std_error.push_back(std::sqrt(v * (1.0 - v) / dn));
    }
    out.pmf = LatticePMF::from(std::move(m));
    return out;
}

} // namespace fdal
