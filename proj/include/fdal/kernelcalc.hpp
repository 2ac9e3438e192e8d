#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "fdal/core/error.hpp"
#include "fdal/core/gamma.hpp"

namespace fdal {

/// Uniform time grid t_j = j*dt, j = 0..n_steps.
class TimeGrid {
public:
    TimeGrid(double t_end, std::size_t n_steps) : t_end_(t_end), n_steps_(n_steps)
    {
        detail::require(std::isfinite(t_end) && t_end > 0.0, "TimeGrid: t_end must be positive");
        detail::require(n_steps >= 2, "TimeGrid: n_steps must be at least 2");
    }

    double t_end() const { return t_end_; }
    std::size_t n_steps() const { return n_steps_; }
    std::size_t size() const { return n_steps_ + 1; }
    double dt() const { return t_end_ / static_cast<double>(n_steps_); }
    double node(std::size_t j) const
    {
        return j == n_steps_ ? t_end_ : static_cast<double>(j) * dt();
    }
    TimeGrid refined() const { return TimeGrid(t_end_, 2 * n_steps_); }

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

private:
    double t_end_;
    std::size_t n_steps_;
};

/// Orders and coefficients of the fractional wave/telegraph problems.
struct FracParams {
    double alpha = 2.0;
    double beta = 1.0;
    double h = 0.0;
    double c = 1.0;

    double half() const { return 0.5 * alpha; }

    void validate() const
    {
        detail::require(std::isfinite(alpha) && alpha > 1.0 && alpha <= 2.0,
                        "FracParams: alpha must lie in (1, 2]");
        detail::require(std::isfinite(beta) && beta >= 0.5 * alpha - 1e-14 && beta <= alpha + 1e-14,
                        "FracParams: beta must lie in [alpha/2, alpha]");
        detail::require(std::isfinite(h) && h >= 0.0, "FracParams: h must be nonnegative");
        detail::require(std::isfinite(c) && c > 0.0, "FracParams: c must be positive");
    }

    /// alpha with beta = alpha/2 (the setting of Fujita's equation).
    static FracParams fujita(double alpha, double c = 1.0, double h = 0.0)
    {
        FracParams p{alpha, 0.5 * alpha, h, c};
        p.validate();
        return p;
    }
};

template <class T>
struct TimeSeries {
    TimeGrid grid;
    std::vector<T> values;

    TimeSeries(TimeGrid g, std::vector<T> v) : grid(g), values(std::move(v))
    {
        detail::require(values.size() == grid.size(), "TimeSeries: length must be n_steps + 1");
        for (const auto& x : values)
            detail::require(std::isfinite(std::abs(x)), "TimeSeries: non-finite entry");
    }

    /// Samples f at every node.
    template <class F>
    static TimeSeries sample(TimeGrid g, F&& f)
    {
        std::vector<T> v(g.size());
        for (std::size_t j = 0; j < g.size(); ++j) v[j] = f(g.node(j));
        return TimeSeries(g, std::move(v));
    }

    double max_abs_diff(const TimeSeries& o, std::size_t from = 0) const
    {
        double e = 0.0;
        for (std::size_t j = from; j < values.size(); ++j)
            e = std::max(e, static_cast<double>(std::abs(values[j] - o.values[j])));
        return e;
    }
};

/// g_alpha(t) = t^(alpha-1)/Gamma(alpha) for t > 0 and 0 otherwise.
inline double g_kernel(double alpha, double t)
{
    if (!std::isfinite(alpha) || !std::isfinite(t)) throw DomainError("g_kernel: non-finite input");
    if (alpha <= 0.0) throw DomainError("g_kernel: alpha must be positive");
    if (t <= 0.0) return 0.0;
    if (alpha == 1.0) return 1.0;
    if (alpha < 170.0) return std::pow(t, alpha - 1.0) * rgamma(alpha);
    return std::exp((alpha - 1.0) * std::log(t) - log_gamma(alpha));
}

/// Product-trapezoid weights for (g_alpha * f)(t_n) = sum_j w[j] f_j,
/// obtained by integrating the kernel against the piecewise-linear
/// interpolant of f. Reusable across target nodes.
class ProductTrapezoid {
public:
    ProductTrapezoid(double alpha, double dt) : alpha_(alpha), dt_(dt)
    {
        detail::require(std::isfinite(alpha) && alpha > 0.0, "rl weights: alpha must be positive");
        detail::require(dt > 0.0, "rl weights: dt must be positive");
        scale_ = std::exp(alpha * std::log(dt) - log_gamma(alpha + 2.0));
    }

    double alpha() const { return alpha_; }
    double scale() const { return scale_; }

    /// Weight of f_n itself (target node, n >= 1).
    double diagonal() const { return scale_; }

    /// Weight of f_j for 1 <= j < n, m = n - j >= 1.
    double interior(std::size_t m)
    {
        grow(m);
        return interior_[m];
    }

    /// Weight of f_0 for target node n >= 1.
    double start(std::size_t n) const
    {
        const double p = alpha_;
        if (n == 1) return scale_ * p;
        const double nn = static_cast<double>(n);
        // (n-1)^(p+1) - (n-1-p) n^p, rewritten to avoid cancellation
        const double inner = (nn - 1.0) * std::expm1(p * std::log1p(-1.0 / nn)) + p;
        return scale_ * std::pow(nn, p) * inner;
    }

    /// All weights for target node n.
    std::vector<double> weights(std::size_t n)
    {
        std::vector<double> w(n + 1, 0.0);
        if (n == 0) return w;
        w[0] = start(n);
        for (std::size_t j = 1; j < n; ++j) w[j] = interior(n - j);
        w[n] = diagonal();
        return w;
    }

private:
    void grow(std::size_t m)
    {
        if (interior_.empty()) interior_.push_back(0.0);
        const double q = alpha_ + 1.0;
        while (interior_.size() <= m) {
            const double k = static_cast<double>(interior_.size());
            // (k+1)^q - 2k^q + (k-1)^q
            const double d = std::expm1(q * std::log1p(1.0 / k)) + std::expm1(q * std::log1p(-1.0 / k));
            interior_.push_back(scale_ * std::pow(k, q) * d);
        }
    }

    double alpha_;
    double dt_;
    double scale_;
    std::vector<double> interior_;
};

/// Riemann-Liouville integral J^alpha f at every node (node 0 maps to 0).
template <class T>
TimeSeries<T> rl_integral(double alpha, const TimeSeries<T>& f)
{
    if (!(alpha > 0.0)) throw DomainError("rl_integral: alpha must be positive");
    ProductTrapezoid rule(alpha, f.grid.dt());
    const std::size_t N = f.grid.n_steps();
    std::vector<T> out(N + 1, T{});
    for (std::size_t n = 1; n <= N; ++n) {
        T s = rule.start(n) * f.values[0] + rule.diagonal() * f.values[n];
        for (std::size_t j = 1; j < n; ++j) s += rule.interior(n - j) * f.values[j];
        out[n] = s;
    }
    return TimeSeries<T>(f.grid, std::move(out));
}

namespace detail {

inline void check_derivative_order(double alpha, const char* who)
{
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw DomainError(std::string(who) + ": order must lie in (0, 1]");
}

/// L1 coefficients b_k = (k+1)^(1-a) - k^(1-a), with b_0 = 1.
inline std::vector<double> l1_coefficients(double alpha, std::size_t n)
{
    std::vector<double> b(n, 0.0);
    const double p = 1.0 - alpha;
    if (n > 0) b[0] = 1.0;
    for (std::size_t k = 1; k < n; ++k) {
        const double kk = static_cast<double>(k);
        b[k] = std::pow(kk, p) * std::expm1(p * std::log1p(1.0 / kk));
    }
    return b;
}

} // namespace detail

/// Caputo derivative of order alpha in (0,1] by the L1 scheme. Node 0 is
/// extrapolated linearly from nodes 1 and 2.
template <class T>
TimeSeries<T> caputo_derivative(double alpha, const TimeSeries<T>& f)
{
    detail::check_derivative_order(alpha, "caputo_derivative");
    const std::size_t N = f.grid.n_steps();
    const double dt = f.grid.dt();
    const auto b = detail::l1_coefficients(alpha, N);
    const double scale = std::exp(-alpha * std::log(dt)) * rgamma(2.0 - alpha);
    std::vector<T> out(N + 1, T{});
    for (std::size_t n = 1; n <= N; ++n) {
        T s{};
        for (std::size_t k = 0; k < n; ++k) s += b[k] * (f.values[n - k] - f.values[n - k - 1]);
        out[n] = scale * s;
    }
    out[0] = 2.0 * out[1] - out[2];
    return TimeSeries<T>(f.grid, std::move(out));
}

/// Riemann-Liouville derivative of order alpha in (0,1]: the L1 Caputo value
/// plus the contribution f(0) g_(1-alpha)(t) of the initial value.
template <class T>
TimeSeries<T> rl_derivative(double alpha, const TimeSeries<T>& f)
{
    detail::check_derivative_order(alpha, "rl_derivative");
    auto d = caputo_derivative(alpha, f);
    if (alpha < 1.0) {
        for (std::size_t n = 1; n < d.values.size(); ++n)
            d.values[n] += f.values[0] * g_kernel(1.0 - alpha, f.grid.node(n));
        d.values[0] = 2.0 * d.values[1] - d.values[2];
    }
    return d;
}

} // namespace fdal
