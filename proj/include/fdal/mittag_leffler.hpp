#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "fdal/core/error.hpp"
#include "fdal/core/gamma.hpp"

namespace fdal {

/// Argument of the two-parameter Mittag-Leffler function E_{a,b}(z).
struct MLQuery {
    double a = 1.0;
    double b = 1.0;
    std::complex<double> z{};
};

/// Limits of the region where the evaluation below has been validated.
struct MLLimits {
    static constexpr double min_a = 0.1;
    static constexpr double max_a = 2.0;
    static constexpr double max_b = 20.0;
    static constexpr double max_abs_z = 1.0e4;
    static constexpr int max_derivative = 60;
    /// Largest real part of a pole exponent before e^s overflows.
    static constexpr double max_pole_real = 650.0;
};

namespace detail::ml {

using cplx = std::complex<double>;

inline constexpr double log_eps_target = -34.538776394910684; // log(1e-15)
inline constexpr double log_eps_machine = -36.043653389117154; // log(2^-52)
inline constexpr double series_radius = 5.0;
inline constexpr double series_max_cond = 1.0e3;

inline void validate(double a, double b, cplx z, const char* who)
{
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw DomainError(std::string(who) + ": non-finite argument");
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError(std::string(who) + ": a and b must be positive");
    if (a > MLLimits::max_a) throw DomainError(std::string(who) + ": a must not exceed 2");
    if (a < MLLimits::min_a || b > MLLimits::max_b || std::abs(z) > MLLimits::max_abs_z)
        throw UnsupportedRegion(std::string(who) + ": (a, b, z) outside the validated region");
}

struct SeriesResult {
    cplx value;
    double cond = INFINITY;
    /// first-order rounding estimate, relative to |value|
    double err = INFINITY;
    bool converged = false;
};

/// sum_m (m+k)!/m! z^m / Gamma(a(m+k)+b): the k-th derivative of E_{a,b}.
inline SeriesResult series(double a, double b, cplx z, int k, int max_terms = 800)
{
    SeriesResult r;
    const double lz = std::log(std::abs(z));
    const double az = std::arg(z);
    cplx sum = 0.0;
    double abs_sum = 0.0, err_sum = 0.0;
    int small_run = 0;
    const double peak = std::pow(std::abs(z), 1.0 / a);
    for (int m = 0; m < max_terms; ++m) {
        const double arg = a * (m + k) + b;
        const double l1 = log_gamma(arg), l2 = log_gamma(m + k + 1.0), l3 = log_gamma(m + 1.0);
        const double lpow = m > 0 ? m * lz : 0.0;
        const double mag = std::exp(-l1 + l2 - l3 + lpow);
        if (!std::isfinite(mag)) return r;
        const cplx term = std::polar(mag, m * az);
        sum += term;
        abs_sum += mag;
        // each log carries an absolute error of a few ulps of its size
        err_sum += mag * (std::abs(l1) + std::abs(l2) + std::abs(l3) + std::abs(lpow) + std::abs(m * az) + 4.0);
        if (mag <= 1e-17 * std::abs(sum) && arg > peak + k + 2.0) {
            if (++small_run >= 3) {
                r.converged = true;
                break;
            }
        } else {
            small_run = 0;
        }
    }
    r.value = sum;
    const double s = std::abs(sum);
    r.cond = s > 0.0 ? abs_sum / s : INFINITY;
    r.err = s > 0.0 ? 4.0 * std::numeric_limits<double>::epsilon() * err_sum / s : INFINITY;
    return r;
}

struct ContourParams {
    double mu = 0.0;
    double h = 0.0;
    double n = INFINITY;
};

// Optimal parabolic contour in a region bounded on both sides by singularities.
inline ContourParams optimal_bounded(double t, double phi_j, double phi_j1, double pj, double qj,
                                     double log_eps)
{
    constexpr double fac = 1.01;
    const double f_max = std::exp(log_eps - log_eps_machine);
    const double sq_j = std::sqrt(phi_j);
    const double threshold = 2.0 * std::sqrt((log_eps - log_eps_machine) / t);
    const double sq_j1 = std::min(std::sqrt(phi_j1), threshold - sq_j);
    double sqb_j = 0.0, sqb_j1 = 0.0, f_bar = 1.0;
    bool admissible = false;

    if (pj < 1e-14 && qj < 1e-14) {
        sqb_j = sq_j;
        sqb_j1 = sq_j1;
        admissible = true;
    } else if (pj < 1e-14) {
        sqb_j = sq_j;
        const double f_min = sq_j > 0.0 ? fac * std::pow(sq_j / (sq_j1 - sq_j), qj) : fac;
        if (f_min < f_max) {
            f_bar = f_min + f_min / f_max * (f_max - f_min);
            const double fq = std::pow(f_bar, -1.0 / qj);
            sqb_j1 = (2.0 * sq_j1 - fq * sq_j) / (2.0 + fq);
            admissible = true;
        }
    } else if (qj < 1e-14) {
        sqb_j1 = sq_j1;
        const double f_min = fac * std::pow(sq_j1 / (sq_j1 - sq_j), pj);
        if (f_min < f_max) {
            f_bar = f_min + f_min / f_max * (f_max - f_min);
            const double fp = std::pow(f_bar, -1.0 / pj);
            sqb_j = (2.0 * sq_j + fp * sq_j1) / (2.0 - fp);
            admissible = true;
        }
    } else {
        double f_min = fac * std::pow((sq_j + sq_j1) / (sq_j1 - sq_j), std::max(pj, qj));
        if (f_min < f_max) {
            f_min = std::max(f_min, 1.5);
            f_bar = f_min + f_min / f_max * (f_max - f_min);
            const double fp = std::pow(f_bar, -1.0 / pj);
            const double fq = std::pow(f_bar, -1.0 / qj);
            const double w = -phi_j1 * t / log_eps;
            const double den = 2.0 + w - (1.0 + w) * fp + fq;
            sqb_j = ((2.0 + w + fq) * sq_j + fp * sq_j1) / den;
            sqb_j1 = (-(1.0 + w) * fq * sq_j + (2.0 + w - (1.0 + w) * fp) * sq_j1) / den;
            admissible = true;
        }
    }

    ContourParams cp;
    if (!admissible) return cp;
    const double le = log_eps - std::log(f_bar);
    const double w = -sqb_j1 * sqb_j1 * t / le;
    const double mu_sqrt = ((1.0 + w) * sqb_j + sqb_j1) / (2.0 + w);
    cp.mu = mu_sqrt * mu_sqrt;
    cp.h = -2.0 * std::numbers::pi / le * (sqb_j1 - sqb_j) / ((1.0 + w) * sqb_j + sqb_j1);
    cp.n = std::ceil(std::sqrt(1.0 - le / t / cp.mu) / cp.h);
    if (!(cp.h > 0.0) || !std::isfinite(cp.n)) cp.n = INFINITY;
    return cp;
}

// Optimal parabolic contour in the region right of every singularity.
inline ContourParams optimal_unbounded(double t, double phi_j, double pj, double log_eps)
{
    const double sq_phi = std::sqrt(phi_j);
    double phibar = phi_j > 0.0 ? phi_j * 1.01 : 0.01;
    double sq_phibar = std::sqrt(phibar);
    constexpr double f_min = 1.0, f_max = 10.0, f_tar = 5.0;
    double n = 0.0, a_coef = 0.0, sq_mu = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
        const double phi_t = phibar * t;
        const double lept = log_eps / phi_t;
        n = std::ceil(phi_t / std::numbers::pi * (1.0 - 1.5 * lept + std::sqrt(1.0 - 2.0 * lept)));
        a_coef = std::numbers::pi * n / phi_t;
        sq_mu = sq_phibar * std::abs(4.0 - a_coef) / std::abs(7.0 - std::sqrt(1.0 + 12.0 * a_coef));
        const double fbar = std::pow((sq_phibar - sq_phi) / sq_mu, -pj);
        if (pj < 1e-14 || (f_min < fbar && fbar < f_max)) break;
        sq_phibar = std::pow(f_tar, -1.0 / pj) * sq_mu + sq_phi;
        phibar = sq_phibar * sq_phibar;
    }
    ContourParams cp;
    cp.mu = sq_mu * sq_mu;
    cp.n = n;
    cp.h = (-3.0 * a_coef - 2.0 + 2.0 * std::sqrt(1.0 + 12.0 * a_coef)) / (4.0 - a_coef) / n;

    const double threshold = (log_eps - log_eps_machine) / t;
    if (cp.mu > threshold) {
        const double q = std::abs(pj) < 1e-14 ? 0.0 : std::pow(f_tar, -1.0 / pj) * std::sqrt(cp.mu);
        const double pb = (q + sq_phi) * (q + sq_phi);
        if (pb < threshold) {
            const double w = std::sqrt(log_eps_machine / (log_eps_machine - log_eps));
            const double u = std::sqrt(-pb * t / log_eps_machine);
            cp.mu = threshold;
            cp.n = std::ceil(w * log_eps / 2.0 / std::numbers::pi / (u * w - 1.0));
            cp.h = w / cp.n;
        } else {
            cp.n = INFINITY;
            cp.h = 0.0;
        }
    }
    return cp;
}

/// Taylor coefficient c_k of (1/a) s(z+d)^(1-b) exp(s(z+d)) in powers of d/z,
/// where s(z) = z^(1/a) rotated onto one pole; k = 0 is the plain residue.
/// `scale` receives a bound on the magnitude of the summed terms.
inline cplx pole_term(double a, double b, cplx s, int k, double& scale)
{
    // (1+u)^p = sum binom(p, n) u^n
    auto binomial_series = [k](double p) {
        std::vector<double> c(k + 1);
        c[0] = 1.0;
        for (int n = 1; n <= k; ++n) c[n] = c[n - 1] * (p - (n - 1)) / n;
        return c;
    };
    const auto root = binomial_series(1.0 / a);
    const auto power = binomial_series((1.0 - b) / a);
    // exp(s ((1+u)^(1/a) - 1)) by f' = g' f
    std::vector<cplx> e(k + 1);
    std::vector<double> e_abs(k + 1);
    e[0] = 1.0;
    e_abs[0] = 1.0;
    for (int n = 1; n <= k; ++n) {
        cplx acc = 0.0;
        double acc_abs = 0.0;
        for (int m = 1; m <= n; ++m) {
            acc += static_cast<double>(m) * s * root[m] * e[n - m];
            acc_abs += m * std::abs(s * root[m]) * e_abs[n - m];
        }
        e[n] = acc / static_cast<double>(n);
        e_abs[n] = acc_abs / n;
    }
    cplx ck = 0.0;
    double ck_abs = 0.0;
    for (int m = 0; m <= k; ++m) {
        ck += power[m] * e[k - m];
        ck_abs += std::abs(power[m]) * e_abs[k - m];
    }
    const cplx front = (1.0 / a) * std::pow(s, 1.0 - b) * std::exp(s);
    scale = std::abs(front) * ck_abs;
    return front * ck;
}

/// Inverse Laplace transform at t = 1 of s^(a*g - b) / (s^a - z)^g along an
/// optimal parabolic contour, plus the pole terms it leaves to its right.
/// For integer g = k + 1 this is E^(k)_{a, b - a k}(z) / k!. With
/// allow_residues false, the contour must pass to the right of every pole.
/// `err`, if given, receives an absolute error estimate: rounding in the
/// summed terms plus the last change under step halving.
inline cplx contour(double a, double b, double g, cplx z, bool allow_residues, double* err = nullptr)
{
    using std::numbers::pi;
    constexpr double t = 1.0;
    const double log_eps = log_eps_target;
    const double theta = std::arg(z);
    const double r = std::pow(std::abs(z), 1.0 / a);

    struct Pole {
        cplx s;
        double phi;
    };
    std::vector<Pole> poles;
    if (std::abs(z) > 0.0) {
        const int kmin = static_cast<int>(std::ceil(-a / 2.0 - theta / 2.0 / pi));
        const int kmax = static_cast<int>(std::floor(a / 2.0 - theta / 2.0 / pi));
        for (int k = kmin; k <= kmax; ++k) {
            const cplx s = std::polar(r, (theta + 2.0 * k * pi) / a);
            const double phi = 0.5 * (s.real() + std::abs(s));
            if (phi > 1e-15) poles.push_back({s, phi});
        }
    }
    std::sort(poles.begin(), poles.end(), [](const Pole& x, const Pole& y) { return x.phi < y.phi; });
    for (const auto& p : poles)
        if (p.s.real() > MLLimits::max_pole_real)
            throw UnsupportedRegion("mittag_leffler: result overflows double precision");

    // singularities: origin then poles sorted by phi; regions between them
    const std::size_t J = poles.size();
    std::vector<double> phi(J + 2), p(J + 1), q(J + 1);
    phi[0] = 0.0;
    for (std::size_t j = 0; j < J; ++j) phi[j + 1] = poles[j].phi;
    phi[J + 1] = INFINITY;
    p[0] = std::max(0.0, -2.0 * (a * g - b + 1.0));
    for (std::size_t j = 1; j <= J; ++j) p[j] = g;
    for (std::size_t j = 0; j < J; ++j) q[j] = g;
    q[J] = INFINITY;

    const double adm_bound = (log_eps - log_eps_machine) / t;
    ContourParams best;
    std::size_t best_region = J + 1;
    for (std::size_t j = 0; j <= J; ++j) {
        if (!(phi[j] < adm_bound && phi[j] < phi[j + 1])) continue;
        if (!allow_residues && j != J) continue;
        const ContourParams cp = j < J ? optimal_bounded(t, phi[j], phi[j + 1], p[j], q[j], log_eps)
                                       : optimal_unbounded(t, phi[j], p[j], log_eps);
        if (cp.n < best.n) {
            best = cp;
            best_region = j;
        }
    }
    if (best_region > J || !std::isfinite(best.n) || best.n > 1.0e5)
        throw UnsupportedRegion("mittag_leffler: no admissible integration contour");

    const auto node = [&](double u) {
        const cplx s = best.mu * cplx(1.0, u) * cplx(1.0, u);
        const cplx ds = cplx(-2.0 * best.mu * u, 2.0 * best.mu);
        const cplx f = std::pow(s, a * g - b) / std::pow(std::pow(s, a) - z, g);
        return std::exp(s * t) * f * ds;
    };
    // The step from the error model can be too coarse when the origin
    // singularity is strong (large b); halve it until two sums agree.
    double h = best.h;
    long n = static_cast<long>(best.n);
    cplx sum = 0.0;
    double sum_abs = 0.0;
    for (long k = -n; k <= n; ++k) {
        const cplx v = node(h * static_cast<double>(k));
        sum += v;
        sum_abs += std::abs(v);
    }
    cplx integral = sum * h;
    double change = INFINITY;
    for (int halving = 0; halving < 4; ++halving) {
        cplx odd = 0.0;
        for (long k = -n; k < n; ++k) {
            const cplx v = node(h * (static_cast<double>(k) + 0.5));
            odd += v;
            sum_abs += std::abs(v);
        }
        sum += odd;
        h *= 0.5;
        n *= 2;
        const cplx finer = sum * h;
        change = std::abs(finer - integral) / (2.0 * pi);
        const bool settled = std::abs(finer - integral) <= 1e-13 * std::abs(finer);
        integral = finer;
        if (settled) break;
    }
    // the error model can cut the u-range short for strong poles; extend it
    // until the end terms are negligible
    for (const long n_max = 8 * n; n < n_max;) {
        ++n;
        const cplx l = node(-h * static_cast<double>(n)), r = node(h * static_cast<double>(n));
        sum += l + r;
        sum_abs += std::abs(l) + std::abs(r);
        if (std::abs(l) + std::abs(r) <= 1e-17 * std::abs(sum)) break;
    }
    integral = sum * h;
    integral /= 2.0 * pi * cplx(0.0, 1.0);
    double total_abs = sum_abs * h / (2.0 * pi);

    cplx residues = 0.0;
    if (best_region < J) {
        const int k = static_cast<int>(std::lround(g)) - 1;
        const double b0 = b - a * k;
        const double zk = std::pow(std::abs(z), static_cast<double>(k));
        for (std::size_t j = best_region; j < J; ++j) {
            double sc = 0.0;
            residues += pole_term(a, b0, poles[j].s, k, sc);
            total_abs += sc / zk;
        }
        residues /= std::pow(z, static_cast<double>(k));
    }
    // the u-range is fixed by the error model; its end terms bound the truncation
    const double u_end = h * static_cast<double>(n);
    const double tail = (std::abs(node(u_end)) + std::abs(node(-u_end))) / (2.0 * pi);
    if (err) *err = 1e-14 * total_abs + change + tail;
    return integral + residues;
}

} // namespace detail::ml

/// Two-parameter Mittag-Leffler function E_{a,b}(z) = sum z^n / Gamma(a n + b).
inline std::complex<double> ml(double a, double b, std::complex<double> z)
{
    using namespace detail::ml;
    validate(a, b, z, "ml");
    if (z.imag() < 0.0) return std::conj(ml(a, b, std::conj(z)));
    if (a == 1.0 && b == 1.0) return std::exp(z);
    if (z == cplx(0.0)) return rgamma(b);
    cplx value;
    bool done = false;
    if (std::abs(z) <= series_radius) {
        const auto s = series(a, b, z, 0);
        if (s.converged && s.cond <= series_max_cond) {
            value = s.value;
            done = true;
        }
    }
    if (!done) value = contour(a, b, 1.0, z, true);
    if (!std::isfinite(value.real()) || !std::isfinite(value.imag()))
        throw UnsupportedRegion("ml: evaluation is not finite in this region");
    if (z.imag() == 0.0) value.imag(0.0);
    return value;
}

inline std::complex<double> ml(const MLQuery& q) { return ml(q.a, q.b, q.z); }

/// Real argument convenience overload.
inline double ml_real(double a, double b, double x) { return ml(a, b, {x, 0.0}).real(); }

namespace detail::ml {

inline constexpr double deriv_target = 1e-10;

struct Estimate {
    cplx value;
    double err = INFINITY;
};
/// E^(k)(z) by the trapezoid rule for Cauchy's formula on circles around z, radii 2^(r/2).
/// E^(k)(z) by the trapezoid rule for Cauchy's formula on circles around z.
/// Returns the radius with the smallest rounding estimate; a rule with half
/// the nodes checks the aliasing error.
inline Estimate cauchy_derivative(double a, double b, cplx z, int k)
{
    using std::numbers::pi;
    const int m = std::max(64, 4 * k);
    Estimate best;
    for (int r = -2; r <= 10; ++r) {
        const double rho = std::pow(2.0, 0.5 * r);
        if (std::abs(z) + rho > MLLimits::max_abs_z) break;
        cplx all = 0.0, even = 0.0;
        double peak = 0.0;
        try {
            for (int j = 0; j < m; ++j) {
                const double th = 2.0 * pi * j / m;
                const cplx e = fdal::ml(a, b, z + std::polar(rho, th));
                const cplx term = e * std::polar(1.0, -k * th);
                all += term;
                if (j % 2 == 0) even += term;
                peak = std::max(peak, std::abs(e));
            }
        } catch (const UnsupportedRegion&) {
            continue;
        }
        const double factor = std::exp(log_gamma(k + 1.0) - k * std::log(rho));
        const cplx v = all / static_cast<double>(m) * factor;
        const cplx half = even / static_cast<double>(m / 2) * factor;
        const double err = (1e-13 * peak * factor + std::abs(v - half)) / std::abs(v);
        if (std::isfinite(err) && err < best.err) best = {v, err};
    }
    return best;
}

} // namespace detail::ml

/// k-th derivative of z -> E_{a,b}(z).
inline std::complex<double> ml_derivative(const MLQuery& q, int k)
{
    using namespace detail::ml;
    if (k < 0) throw DomainError("ml_derivative: k must be nonnegative");
    if (k == 0) return ml(q);
    validate(q.a, q.b, q.z, "ml_derivative");
    if (k > MLLimits::max_derivative) throw UnsupportedRegion("ml_derivative: order too high");
    if (q.z.imag() < 0.0) return std::conj(ml_derivative({q.a, q.b, std::conj(q.z)}, k));
    if (q.a == 1.0 && q.b == 1.0) return std::exp(q.z);
    const double kfact = std::exp(log_gamma(k + 1.0));
    if (q.z == cplx(0.0)) return kfact * rgamma(q.a * k + q.b);

    const auto s = series(q.a, q.b, q.z, k, 4000);
    Estimate est;
    if (s.converged) est = {s.value, s.err};
    if (!(est.err <= 0.1 * deriv_target)) {
        // k! E^{k+1}_{a, b+ak}(z): the transform s^(a-b)/(s^a - z)^(k+1)
        double abs_err = INFINITY;
        const cplx c = contour(q.a, q.b + q.a * k, k + 1.0, q.z, true, &abs_err);
        if (abs_err / std::abs(c) < est.err) est = {kfact * c, abs_err / std::abs(c)};
    }
    if (!(est.err <= deriv_target)) {
        // the contour and the pole terms cancel; try Cauchy's formula
        const auto alt = cauchy_derivative(q.a, q.b, q.z, k);
        if (alt.err < est.err) est = alt;
    }
    if (!(est.err <= deriv_target))
        throw UnsupportedRegion("ml_derivative: no evaluation reaches the accuracy target at this (a, b, z, k)");
    cplx value = est.value;
    if (!std::isfinite(value.real()) || !std::isfinite(value.imag()))
        throw UnsupportedRegion("ml_derivative: evaluation is not finite in this region");
    if (q.z.imag() == 0.0) value.imag(0.0);
    return value;
}

} // namespace fdal
