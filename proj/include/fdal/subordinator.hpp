#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

// pchip in Boost 1.74 needs isnan declared before it is included
#include <boost/math/special_functions/fpclassify.hpp>
#include <boost/math/interpolators/pchip.hpp>

#include "fdal/core/error.hpp"
#include "fdal/core/quadrature.hpp"
#include "fdal/core/rng.hpp"
#include "fdal/kernelcalc.hpp"
#include "fdal/talbot.hpp"

namespace fdal {

/// Standard one-sided stable subordinator of order b, E exp(-l S_t) = exp(-t l^b).
/// Order 1 is the deterministic drift S_t = t.
struct StableModel {
    double order = 0.5;

    bool degenerate() const { return order == 1.0; }
    void validate() const
    {
        detail::require(std::isfinite(order) && order > 0.0 && order <= 1.0,
                        "StableModel: order must lie in (0, 1]");
    }
};

/// Subordinator with Laplace exponent z(l) = (l^alpha + 2h l^(alpha/2))^(1/2).
struct TelegraphModel {
    double alpha = 2.0;
    double h = 0.0;

    bool degenerate() const { return alpha == 2.0 && h == 0.0; }
    void validate() const
    {
        detail::require(std::isfinite(alpha) && alpha > 1.0 && alpha <= 2.0,
                        "TelegraphModel: alpha must lie in (1, 2]");
        detail::require(std::isfinite(h) && h >= 0.0, "TelegraphModel: h must be nonnegative");
    }
};

using SubordinatorModel = std::variant<StableModel, TelegraphModel>;

/// One draw of an inverse subordinator at time t.
struct InverseSample {
    double t = 0.0;
    double y = 0.0;
    std::uint64_t index = 0;
};

/// S_1 of the standard one-sided b-stable law, 0 < b < 1 (Kanter's
/// representation of the Chambers-Mallows-Stuck transform).
inline double sample_stable_one_sided(double b, CounterRng& rng)
{
    if (b == 1.0) throw DegenerateModel("sample_stable_one_sided: order 1 is deterministic, use S_t = t");
    detail::require(b > 0.0 && b < 1.0, "sample_stable_one_sided: order must lie in (0, 1)");
    const double u = std::numbers::pi * rng.uniform();
    const double w = rng.exponential();
    const double a = std::sin(b * u) / std::pow(std::sin(u), 1.0 / b);
    const double c = std::pow(std::sin((1.0 - b) * u) / w, (1.0 - b) / b);
    return a * c;
}

inline double sample_stable_one_sided(double b, RngSeed seed, std::uint64_t index)
{
    CounterRng rng(seed, index);
    return sample_stable_one_sided(b, rng);
}

/// Y(t) = inf{u : S_u > t} from the scaling identity Y(t) = (t/S_1)^b.
inline InverseSample sample_inverse(const StableModel& m, double t, RngSeed seed, std::uint64_t index)
{
    m.validate();
    detail::require(std::isfinite(t) && t >= 0.0, "sample_inverse: t must be nonnegative");
    if (m.degenerate() || t == 0.0) return {t, t == 0.0 ? 0.0 : t, index};
    const double s = sample_stable_one_sided(m.order, seed, index);
    return {t, std::pow(t / s, m.order), index};
}

/// First passage of a discretised path of S (increments du^(1/b) S_1) over
/// each of the increasing `times`. All levels come from one path.
inline std::vector<double> sample_inverse_path(const StableModel& m, const std::vector<double>& times,
                                               RngSeed seed, std::uint64_t index, double du = 1e-3)
{
    m.validate();
    detail::require(du > 0.0, "sample_inverse_path: du must be positive");
    for (std::size_t i = 1; i < times.size(); ++i)
        detail::require(times[i] >= times[i - 1], "sample_inverse_path: times must be sorted");
    std::vector<double> out(times.size(), 0.0);
    if (m.degenerate()) return times;
    CounterRng rng(seed, index);
    const double scale = std::pow(du, 1.0 / m.order);
    double s = 0.0, u = 0.0;
    std::size_t next = 0;
    while (next < times.size()) {
        while (next < times.size() && s > times[next]) out[next++] = u;
        if (next == times.size()) break;
        s += scale * sample_stable_one_sided(m.order, rng);
        u += du;
        if (u > 1e9) throw SolverError("sample_inverse_path: path did not pass the requested level");
    }
    return out;
}

namespace detail {

inline constexpr double max_density_order = 0.96;

/// Inverts a transform whose exponential factor behaves like exp(-s l^b).
/// For b <= 1/2 that factor is bounded on the fixed Talbot contour; above
/// 1/2 it grows there, and a hyperbola kept inside |arg l| < pi/(2b) is used.
template <class F>
double invert_order(F&& log_symbol, double t, double b, TalbotConfig cfg)
{
    if (b > max_density_order)
        throw UnsupportedRegion("inversion: orders above 0.96 (alpha above 1.92) are not supported; "
                                "use alpha = 2 for the exact shift");
    if (b <= 0.5) return talbot_invert_log(log_symbol, t, cfg);
    return sector_invert_log(log_symbol, t, 0.5 * std::numbers::pi / b);
}

inline void reject_degenerate(const StableModel& m, const char* who)
{
    m.validate();
    if (m.degenerate())
        throw DegenerateModel(std::string(who) +
                              ": order 1 has no density; Y(t) = t, use the exact shift instead");
}

} // namespace detail

/// Density f_b(t, y) of the inverse b-stable subordinator, by numerical
/// inversion of l^(b-1) exp(-y l^b) (fixed Talbot for b <= 1/2).
inline double inverse_density(const StableModel& m, double t, double y, TalbotConfig cfg = {})
{
    detail::reject_degenerate(m, "inverse_density");
    detail::require(t > 0.0, "inverse_density: t must be positive");
    if (y < 0.0) return 0.0;
    const double b = m.order;
    const double tb = std::pow(t, b);
    const double s = y / tb;
    const double v = detail::invert_order(
        [b, s](std::complex<double> l) { return (b - 1.0) * std::log(l) - s * std::pow(l, b); }, 1.0, b, cfg);
    return std::max(0.0, v) / tb;
}

/// P(Y(t) > y) = P(S_y < t), by Talbot inversion of exp(-y l^b)/l.
inline double inverse_tail(const StableModel& m, double t, double y, TalbotConfig cfg = {})
{
    m.validate();
    detail::require(t >= 0.0, "inverse_tail: t must be nonnegative");
    if (y <= 0.0) return 1.0;
    if (m.degenerate() || t == 0.0) return y < t ? 1.0 : 0.0;
    const double b = m.order;
    const double s = y / std::pow(t, b);
    const double v = detail::invert_order(
        [b, s](std::complex<double> l) { return -s * std::pow(l, b) - std::log(l); }, 1.0, b, cfg);
    return std::clamp(v, 0.0, 1.0);
}

/// Quadrature for expectations E g(Y(t)) = sum_q w_q g(t^b s_q), built once per order:
/// composite Gauss-Legendre panels over [0, s_max] on the density of Y(1),
/// s_max chosen so that P(Y(1) > s_max) <= tail_tol, weights renormalised
/// to unit mass.
class StableQuadrature {
public:
    static constexpr double tail_tol = 1e-6;
    static constexpr double panel_width = 0.05;
    static constexpr double max_level = 1e4;

    explicit StableQuadrature(double order) : order_(order)
    {
        StableModel m{order};
        detail::reject_degenerate(m, "StableQuadrature");
        double hi = 1.0;
        while (inverse_tail(m, 1.0, hi) > tail_tol) {
            hi *= 2.0;
            if (hi > max_level)
                throw QuadratureError("StableQuadrature: tail bound not reached below level 1e4; "
                                      "extend the panel or raise the order");
        }
        double lo = 0.0;
        for (int it = 0; it < 60 && hi - lo > 1e-6 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (inverse_tail(m, 1.0, mid) > tail_tol ? lo : hi) = mid;
        }
        s_max_ = hi;
        const auto panels = static_cast<std::size_t>(std::ceil(s_max_ / panel_width));
        rule_ = gauss_legendre_panels(0.0, s_max_, panels);
        double mass = 0.0;
        for (std::size_t q = 0; q < rule_.size(); ++q) {
            rule_.weights[q] *= inverse_density(m, 1.0, rule_.nodes[q]);
            mass += rule_.weights[q];
        }
        raw_mass_ = mass;
        for (auto& w : rule_.weights) w /= mass;
    }

    double order() const { return order_; }
    double s_max() const { return s_max_; }
    /// Mass captured before renormalisation.
    double raw_mass() const { return raw_mass_; }
    const std::vector<double>& nodes() const { return rule_.nodes; }
    const std::vector<double>& weights() const { return rule_.weights; }
    std::size_t size() const { return rule_.size(); }

private:
    double order_;
    double s_max_ = 0.0;
    double raw_mass_ = 0.0;
    QuadratureRule rule_;
};

/// Shared, immutable quadrature for the given order.
inline std::shared_ptr<const StableQuadrature> stable_quadrature(double order)
{
    static std::mutex mtx;
    static std::map<double, std::shared_ptr<const StableQuadrature>> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(order);
    if (it != cache.end()) return it->second;
    auto q = std::make_shared<const StableQuadrature>(order);
    cache.emplace(order, q);
    return q;
}

// ---------------------------------------------------------------------------
// Telegraph subordinator

namespace detail {

inline std::complex<double> expm1(std::complex<double> b)
{
    if (std::abs(b) < 1e-3) return b * (1.0 + b * (0.5 + b * (1.0 / 6.0 + b / 24.0)));
    return std::exp(b) - 1.0;
}

/// z(l) = l^(alpha/4) (l^(alpha/2) + 2h)^(1/2), built from principal powers.
inline std::complex<double> telegraph_exponent(double alpha, double h, std::complex<double> l)
{
    return std::pow(l, 0.25 * alpha) * std::sqrt(std::pow(l, 0.5 * alpha) + 2.0 * h);
}

} // namespace detail

/// Tail P(Y_z(t) > x). For alpha = 2 the delay exp(-x l) is factored out and
/// applied as a shift, which leaves a smooth transform to invert.
inline double telegraph_inverse_tail(const TelegraphModel& m, double t, double x, TalbotConfig cfg = {})
{
    m.validate();
    detail::require(t > 0.0, "telegraph_inverse_tail: t must be positive");
    if (x <= 0.0) return 1.0;
    const double a = m.alpha, h = m.h;
    if (a == 2.0) {
        if (x >= t) return 0.0;
        if (h == 0.0) return 1.0;
        if (t - x < 1e-9 * t) return std::exp(-h * x); // initial value of the shifted transform
        const double v = talbot_invert(
            [h, x](std::complex<double> l) {
                const auto z = detail::telegraph_exponent(2.0, h, l);
                return std::exp(-x * 2.0 * h * l / (z + l)) / l;
            },
            t - x, cfg);
        return std::clamp(v, 0.0, 1.0);
    }
    const double v = detail::invert_order(
        [a, h, x](std::complex<double> l) { return -x * detail::telegraph_exponent(a, h, l) - std::log(l); },
        t, 0.5 * a, cfg);
    return std::clamp(v, 0.0, 1.0);
}

/// F(t, x) = P(Y_z(t) <= x) for the telegraph subordinator of `params`.
inline double telegraph_inverse_cdf(const FracParams& params, double t, double x, TalbotConfig cfg = {})
{
    TelegraphModel m{params.alpha, params.h};
    if (x < 0.0) return 0.0;
    return 1.0 - telegraph_inverse_tail(m, t, x, cfg);
}

/// Absolutely continuous part of the density of Y_z(t) at x. For alpha = 2
/// this is the density of |xi_h(t)| on [0, t); the atom exp(-h t) at x = t
/// is reported by telegraph_atom.
inline double telegraph_inverse_density(const TelegraphModel& m, double t, double x, TalbotConfig cfg = {})
{
    m.validate();
    detail::require(t > 0.0, "telegraph_inverse_density: t must be positive");
    if (x < 0.0) return 0.0;
    const double a = m.alpha, h = m.h;
    if (a == 2.0) {
        if (x >= t || h == 0.0) return 0.0;
        if (t - x < 1e-9 * t) return std::exp(-h * x) * (h + 0.5 * x * h * h);
        // (z/l) exp(-x(z - l)) - exp(-xh) = exp(-xh) [(1 + A) e^B - 1] with
        // A = 2h/(z + l), B = 2x h^2 l/(z + l)^2, from z^2 - l^2 = 2hl
        const double v = talbot_invert(
            [h, x](std::complex<double> l) {
                const auto z = detail::telegraph_exponent(2.0, h, l);
                const auto a = 2.0 * h / (z + l);
                const auto b = 2.0 * x * h * h * l / ((z + l) * (z + l));
                return std::exp(-x * h) * (detail::expm1(b) + a * std::exp(b));
            },
            t - x, cfg);
        return std::max(0.0, v);
    }
    const double v = detail::invert_order(
        [a, h, x](std::complex<double> l) {
            const auto z = detail::telegraph_exponent(a, h, l);
            return std::log(z / l) - x * z;
        },
        t, 0.5 * a, cfg);
    return std::max(0.0, v);
}

/// Probability of the point mass of Y_z(t) (only alpha = 2 has one, at x = t).
inline double telegraph_atom(const TelegraphModel& m, double t)
{
    m.validate();
    return m.alpha == 2.0 ? std::exp(-m.h * t) : 0.0;
}

/// Law of Y_z(t) at a fixed t: a monotone PCHIP spline of the CDF for
/// sampling, and a Gauss-Legendre rule on the density for expectations.
class TelegraphInverseLaw {
public:
    static constexpr double tail_tol = 1e-7;
    static constexpr std::size_t cdf_points = 401;
    static constexpr double panel_width = 0.025;

    TelegraphInverseLaw(const FracParams& params, double t) : model_{params.alpha, params.h}, t_(t)
    {
        model_.validate();
        detail::require(t > 0.0, "TelegraphInverseLaw: t must be positive");
        atom_ = telegraph_atom(model_, t);
        if (model_.degenerate()) {
            x_max_ = t;
            return;
        }
        if (model_.alpha == 2.0) {
            x_max_ = t;
        } else {
            double hi = std::max(1.0, t);
            while (telegraph_inverse_tail(model_, t, hi) > tail_tol) {
                hi *= 2.0;
                if (hi > 1e4) throw QuadratureError("TelegraphInverseLaw: tail bound not reached");
            }
            x_max_ = hi;
        }
        build_cdf();
        build_rule();
    }

    double t() const { return t_; }
    double atom() const { return atom_; }
    double x_max() const { return x_max_; }
    bool degenerate() const { return model_.degenerate(); }
    const QuadratureRule& rule() const { return rule_; }

    double cdf(double x) const
    {
        if (x < 0.0) return 0.0;
        if (degenerate()) return x >= t_ ? 1.0 : 0.0;
        if (x >= x_max_) return 1.0;
        return std::clamp((*spline_)(x), 0.0, 1.0 - atom_);
    }

    /// Inverse-CDF draw; the atom is returned exactly.
    InverseSample sample(RngSeed seed, std::uint64_t index) const
    {
        if (degenerate()) return {t_, t_, index};
        CounterRng rng(seed, index);
        const double u = rng.uniform();
        return {t_, quantile(u), index};
    }

    double quantile(double u) const
    {
        if (degenerate()) return t_;
        if (u >= 1.0 - atom_) return t_;
        auto it = std::upper_bound(f_.begin(), f_.end(), u);
        std::size_t i = it == f_.begin() ? 0 : static_cast<std::size_t>(it - f_.begin()) - 1;
        if (i + 1 >= x_.size()) return x_.back();
        double lo = x_[i], hi = x_[i + 1];
        for (int k = 0; k < 60; ++k) {
            const double mid = 0.5 * (lo + hi);
            ((*spline_)(mid) < u ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }

    /// E g(Y_z(t)).
    template <class G>
    auto expectation(G&& g) const
    {
        using R = decltype(g(0.0));
        if (degenerate()) return R(g(t_));
        R s = R(atom_) * (atom_ > 0.0 ? g(t_) : R{});
        for (std::size_t q = 0; q < rule_.size(); ++q) s += rule_.weights[q] * g(rule_.nodes[q]);
        return s;
    }

private:
    void build_cdf()
    {
        for (int nodes = 32; nodes <= 128; nodes *= 2) {
            TalbotConfig cfg;
            cfg.nodes = nodes;
            x_.assign(cdf_points, 0.0);
            f_.assign(cdf_points, 0.0);
            bool monotone = true;
            for (std::size_t i = 0; i < cdf_points; ++i) {
                x_[i] = x_max_ * static_cast<double>(i) / static_cast<double>(cdf_points - 1);
                f_[i] = 1.0 - telegraph_inverse_tail(model_, t_, x_[i], cfg);
                if (model_.alpha == 2.0 && i + 1 == cdf_points) {
                    // left limit at the atom
                    f_[i] = 1.0 - atom_;
                }
                if (i > 0 && f_[i] < f_[i - 1]) {
                    if (f_[i - 1] - f_[i] > 1e-9) monotone = false;
                    f_[i] = f_[i - 1];
                }
            }
            if (monotone) {
                spline_ = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(
                    std::vector<double>(x_), std::vector<double>(f_));
                return;
            }
        }
        throw InversionError("TelegraphInverseLaw: CDF is not monotone at 128 Talbot nodes");
    }

    void build_rule()
    {
        const auto panels = static_cast<std::size_t>(std::ceil(x_max_ / panel_width));
        rule_ = gauss_legendre_panels(0.0, x_max_, std::max<std::size_t>(panels, 8));
        double mass = 0.0;
        for (std::size_t q = 0; q < rule_.size(); ++q) {
            rule_.weights[q] *= telegraph_inverse_density(model_, t_, rule_.nodes[q]);
            mass += rule_.weights[q];
        }
        // continuous part carries 1 - atom
        if (mass > 0.0)
            for (auto& w : rule_.weights) w *= (1.0 - atom_) / mass;
    }

    TelegraphModel model_;
    double t_;
    double atom_ = 0.0;
    double x_max_ = 0.0;
    std::vector<double> x_, f_;
    std::shared_ptr<boost::math::interpolators::pchip<std::vector<double>>> spline_;
    QuadratureRule rule_;
};

/// One draw of Y_z(t) (builds the CDF cache; reuse TelegraphInverseLaw for many draws).
inline InverseSample sample_telegraph_inverse(const FracParams& params, double t, RngSeed seed,
                                              std::uint64_t index)
{
    if (params.alpha == 2.0 && params.h == 0.0) return {t, t, index};
    return TelegraphInverseLaw(params, t).sample(seed, index);
}

} // namespace fdal
