#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <string>

#include "fdal/core/error.hpp"

namespace fdal {

/// Default and maximal node counts of the fixed Talbot rule.
struct TalbotConfig {
    int nodes = 32;
    int max_nodes = 128;
};

namespace detail {

/// One evaluation of the fixed Talbot rule (Abate-Valko parameters). Returns
/// false and fills `where` when the symbol is not finite on the contour.
template <bool LogSymbol, class F>
bool talbot_once(F& symbol, double t, int m, double& out, std::string& where)
{
    using cplx = std::complex<double>;
    const double r = 2.0 * m / (5.0 * t);
    const auto weighted = [&](cplx s) {
        if constexpr (LogSymbol)
            return std::exp(t * s + symbol(s));
        else
            return std::exp(t * s) * symbol(s);
    };
    const cplx f0 = weighted(cplx(r, 0.0));
    if (!std::isfinite(f0.real()) || !std::isfinite(f0.imag())) {
        std::ostringstream os;
        os << "node 0 (lambda = " << r << ")";
        where = os.str();
        return false;
    }
    double sum = 0.5 * f0.real();
    for (int k = 1; k < m; ++k) {
        const double theta = k * std::numbers::pi / m;
        const double cot = std::cos(theta) / std::sin(theta);
        const cplx s(r * theta * cot, r * theta);
        const double sigma = theta + (theta * cot - 1.0) * cot;
        const cplx term = weighted(s) * cplx(1.0, sigma);
        if (!std::isfinite(term.real()) || !std::isfinite(term.imag())) {
            std::ostringstream os;
            os << "node " << k << " (lambda = " << s.real() << (s.imag() < 0 ? "" : "+") << s.imag() << "i)";
            where = os.str();
            return false;
        }
        sum += term.real();
    }
    out = r / m * sum;
    return std::isfinite(out);
}

} // namespace detail

/// Inverse Laplace transform of `symbol` at t > 0 by the fixed Talbot
/// contour. The node count is doubled on non-finite evaluations up to
/// cfg.max_nodes.
template <class F>
double talbot_invert(F&& symbol, double t, TalbotConfig cfg = {})
{
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("talbot_invert: t must be positive");
    if (cfg.nodes < 2) throw DomainError("talbot_invert: at least two nodes are required");
    std::string where;
    for (int m = cfg.nodes; m <= std::max(cfg.nodes, cfg.max_nodes); m *= 2) {
        double out = 0.0;
        if (detail::talbot_once<false>(symbol, t, m, out, where)) return out;
    }
    std::ostringstream os;
    os << "talbot_invert: non-finite symbol at t = " << t << ", " << where;
    throw InversionError(os.str());
}

/// As talbot_invert, for a symbol given through its logarithm. Exponential
/// factors of the symbol are then combined with exp(t l) before
/// exponentiation, which avoids overflow of either factor alone.
template <class F>
double talbot_invert_log(F&& log_symbol, double t, TalbotConfig cfg = {})
{
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("talbot_invert: t must be positive");
    if (cfg.nodes < 2) throw DomainError("talbot_invert: at least two nodes are required");
    std::string where;
    for (int m = cfg.nodes; m <= std::max(cfg.nodes, cfg.max_nodes); m *= 2) {
        double out = 0.0;
        if (detail::talbot_once<true>(log_symbol, t, m, out, where)) return out;
    }
    std::ostringstream os;
    os << "talbot_invert: non-finite symbol at t = " << t << ", " << where;
    throw InversionError(os.str());
}

template <class F>
double talbot_invert(F&& symbol, double t, int nodes)
{
    TalbotConfig cfg;
    cfg.nodes = nodes;
    cfg.max_nodes = std::max(nodes, cfg.max_nodes);
    return talbot_invert(std::forward<F>(symbol), t, cfg);
}

/// Inverse Laplace transform along a hyperbola l(u) = mu (1 + sin(iu - a)) whose
/// asymptotes stay inside the sector |arg l| < max_angle. Used for symbols
/// that decay only inside such a sector (exp(-s l^b) with b close to 1),
/// where the fixed Talbot contour meets exponential growth. The symbol is
/// given through its logarithm. Requires pi/2 < max_angle.
template <class F>
double sector_invert_log(F&& log_symbol, double t, double max_angle)
{
    using cplx = std::complex<double>;
    using std::numbers::pi;
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("sector_invert: t must be positive");
    if (!(max_angle > 0.5 * pi)) throw DomainError("sector_invert: sector must be wider than pi/2");
    const double a = 0.5 * (std::min(max_angle, pi - 0.1) - 0.5 * pi);
    constexpr double mu_t = 8.0;
    constexpr double log_tol = 27.6; // -log(1e-12)
    const double mu = mu_t / t;
    const double h = 2.0 * pi * a / (log_tol + mu_t);
    const double u_max = std::acosh((1.0 + log_tol / mu_t) / std::sin(a));
    const auto n = static_cast<long>(std::ceil(u_max / h));
    double sum = 0.0;
    for (long k = 0; k <= n; ++k) {
        const double u = k * h;
        const cplx l = mu * cplx(1.0 - std::sin(a) * std::cosh(u), std::cos(a) * std::sinh(u));
        const cplx dl = mu * cplx(-std::sin(a) * std::sinh(u), std::cos(a) * std::cosh(u));
        const cplx term = std::exp(t * l + log_symbol(l)) * dl;
        if (!std::isfinite(term.real()) || !std::isfinite(term.imag())) {
            std::ostringstream os;
            os << "sector_invert: non-finite symbol at t = " << t << ", node " << k;
            throw InversionError(os.str());
        }
        sum += (k == 0 ? 0.5 : 1.0) * term.imag();
    }
    return h / pi * sum;
}

} // namespace fdal
