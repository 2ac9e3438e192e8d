#pragma once

#include <array>
#include <cmath>
#include <numbers>

namespace fdal {

namespace detail {

// Lanczos approximation, g = 7, n = 9.
inline constexpr double lanczos_g = 7.0;
inline constexpr std::array<double, 9> lanczos_coef = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

inline double lanczos_sum(double x)
{
    double a = lanczos_coef[0];
    for (int i = 1; i < 9; ++i) a += lanczos_coef[i] / (x + i);
    return a;
}

inline bool is_nonpositive_integer(double x)
{
    return x <= 0.0 && x == std::floor(x);
}

} // namespace detail

/// Gamma function. Poles return NaN.
inline double gamma_fn(double x)
{
    using std::numbers::pi;
    if (!std::isfinite(x)) return x > 0 ? x : std::nan("");
    if (detail::is_nonpositive_integer(x)) return std::nan("");
    if (x < 0.5) return pi / (std::sin(pi * x) * gamma_fn(1.0 - x));
    if (x > 171.7) return INFINITY;
    if (x == std::floor(x)) {
        double f = 1.0;
        for (double k = 2.0; k < x; k += 1.0) f *= k;
        return f;
    }
    if (x > 2.5) {
        // downward recurrence keeps the Lanczos evaluation in [1.5, 2.5]
        double r = x, prod = 1.0;
        while (r > 2.5) {
            r -= 1.0;
            prod *= r;
        }
        return prod * gamma_fn(r);
    }
    const double xm = x - 1.0;
    const double t = xm + detail::lanczos_g + 0.5;
    // split the power so that t^(x-1/2) does not overflow before e^-t is applied
    const double half = std::pow(t, 0.5 * (xm + 0.5));
    return std::sqrt(2.0 * pi) * half * (half * std::exp(-t)) * detail::lanczos_sum(xm);
}

/// log|Gamma(x)|.
inline double log_gamma(double x)
{
    using std::numbers::pi;
    if (detail::is_nonpositive_integer(x)) return INFINITY;
    if (x < 0.5) return std::log(pi / std::abs(std::sin(pi * x))) - log_gamma(1.0 - x);
    const double xm = x - 1.0;
    const double t = xm + detail::lanczos_g + 0.5;
    return 0.5 * std::log(2.0 * pi) + (xm + 0.5) * std::log(t) - t +
           std::log(detail::lanczos_sum(xm));
}

/// 1/Gamma(x); zero at the poles.
inline double rgamma(double x)
{
    if (detail::is_nonpositive_integer(x)) return 0.0;
    if (x > 171.0) return std::exp(-log_gamma(x));
    return 1.0 / gamma_fn(x);
}

} // namespace fdal
