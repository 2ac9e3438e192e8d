#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "fdal/core/error.hpp"

namespace fdal {

/// Uniform grid on [x_min, x_max]. A periodic grid has n nodes
/// x_min + i L/n and excludes x_max; otherwise both ends are nodes.
class SpaceGrid {
public:
    SpaceGrid(double x_min, double x_max, std::size_t n_points, bool periodic)
        : x_min_(x_min), x_max_(x_max), n_(n_points), periodic_(periodic)
    {
        detail::require(std::isfinite(x_min) && std::isfinite(x_max) && x_max > x_min,
                        "SpaceGrid: need finite x_min < x_max");
        detail::require(n_points >= 8, "SpaceGrid: at least 8 points are required");
    }

    double x_min() const { return x_min_; }
    double x_max() const { return x_max_; }
    std::size_t size() const { return n_; }
    bool periodic() const { return periodic_; }
    double length() const { return x_max_ - x_min_; }
    double dx() const { return periodic_ ? length() / n_ : length() / (n_ - 1); }
    double node(std::size_t i) const { return x_min_ + static_cast<double>(i) * dx(); }

    /// Angular wavenumber of FFT bin k (periodic grids).
    double wavenumber(std::size_t k) const
    {
        const auto n = static_cast<long>(n_);
        long kk = static_cast<long>(k);
        if (kk > n / 2) kk -= n;
        return 2.0 * std::numbers::pi * static_cast<double>(kk) / length();
    }

    /// Index of the unpaired Nyquist bin, if n is even.
    std::optional<std::size_t> nyquist() const
    {
        if (n_ % 2 == 0) return n_ / 2;
        return std::nullopt;
    }

    SpaceGrid refined() const
    {
        return periodic_ ? SpaceGrid(x_min_, x_max_, 2 * n_, true) : SpaceGrid(x_min_, x_max_, 2 * n_ - 1, false);
    }

    friend bool operator==(const SpaceGrid&, const SpaceGrid&) = default;

private:
    double x_min_, x_max_;
    std::size_t n_;
    bool periodic_;
};

/// Samples over a SpaceGrid, optionally stamped with a time.
template <class T>
struct BasicField {
    SpaceGrid grid;
    std::vector<T> values;
    std::optional<double> time;

    BasicField(SpaceGrid g, std::vector<T> v, std::optional<double> t = std::nullopt)
        : grid(g), values(std::move(v)), time(t)
    {
        detail::require(values.size() == grid.size(), "Field: length must equal n_points");
        for (const auto& x : values) detail::require(std::isfinite(std::abs(x)), "Field: non-finite entry");
    }

    explicit BasicField(SpaceGrid g) : grid(g), values(g.size(), T{}) {}

    template <class F>
    static BasicField sample(SpaceGrid g, F&& f)
    {
        std::vector<T> v(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) v[i] = static_cast<T>(f(g.node(i)));
        return BasicField(g, std::move(v));
    }

    std::size_t size() const { return values.size(); }
    T& operator[](std::size_t i) { return values[i]; }
    const T& operator[](std::size_t i) const { return values[i]; }

    BasicField& operator+=(const BasicField& o)
    {
        for (std::size_t i = 0; i < size(); ++i) values[i] += o.values[i];
        return *this;
    }
    BasicField& operator-=(const BasicField& o)
    {
        for (std::size_t i = 0; i < size(); ++i) values[i] -= o.values[i];
        return *this;
    }
    template <class S>
    BasicField& operator*=(S s)
    {
        for (auto& v : values) v *= s;
        return *this;
    }
    friend BasicField operator+(BasicField a, const BasicField& b) { return a += b; }
    friend BasicField operator-(BasicField a, const BasicField& b) { return a -= b; }
    template <class S>
    friend BasicField operator*(S s, BasicField a)
    {
        return a *= s;
    }

    /// Discrete L2 norm (with dx weight).
    double l2_norm() const
    {
        double s = 0.0;
        for (const auto& v : values) s += std::norm(std::complex<double>(v));
        return std::sqrt(s * grid.dx());
    }

    double max_abs() const
    {
        double m = 0.0;
        for (const auto& v : values) m = std::max(m, static_cast<double>(std::abs(v)));
        return m;
    }
};

using Field = BasicField<double>;
using ComplexField = BasicField<std::complex<double>>;

template <class T, class U>
void require_same_grid(const BasicField<T>& a, const BasicField<U>& b)
{
    detail::require(a.grid == b.grid, "fields live on different grids");
}

/// ||a - b|| / ||b|| in the discrete L2 norm.
template <class T, class U>
double rel_l2_error(const BasicField<T>& a, const BasicField<U>& b)
{
    detail::require(a.size() == b.size(), "rel_l2_error: size mismatch");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += std::norm(std::complex<double>(a[i]) - std::complex<double>(b[i]));
        den += std::norm(std::complex<double>(b[i]));
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

template <class T, class U>
double max_abs_error(const BasicField<T>& a, const BasicField<U>& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(std::complex<double>(a[i]) - std::complex<double>(b[i])));
    return m;
}

inline Field real_part(const ComplexField& f)
{
    std::vector<double> v(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) v[i] = f[i].real();
    return Field(f.grid, std::move(v), f.time);
}

inline double max_imag(const ComplexField& f)
{
    double m = 0.0;
    for (const auto& v : f.values) m = std::max(m, std::abs(v.imag()));
    return m;
}

inline ComplexField to_complex(const Field& f)
{
    std::vector<std::complex<double>> v(f.values.begin(), f.values.end());
    return ComplexField(f.grid, std::move(v), f.time);
}

// ---------------------------------------------------------------------------
// Fourier multipliers on periodic grids

namespace spectral {

using cplx = std::complex<double>;

template <class T>
std::vector<cplx> forward(const std::vector<T>& v)
{
    Eigen::FFT<double> fft;
    std::vector<cplx> in(v.begin(), v.end()), out;
    fft.fwd(out, in);
    return out;
}

inline std::vector<cplx> inverse(const std::vector<cplx>& spec)
{
    Eigen::FFT<double> fft;
    std::vector<cplx> out;
    fft.inv(out, spec);
    return out;
}

inline void require_periodic(const SpaceGrid& g, const char* who)
{
    if (!g.periodic()) throw UnsupportedRegion(std::string(who) + ": requires a periodic grid");
}

/// Multiplier values per FFT bin; the unpaired Nyquist bin receives the
/// mean of m(+xi_N) and m(-xi_N) so that conjugate-symmetric multipliers
/// map real data to real data.
template <class M>
std::vector<cplx> bin_values(const SpaceGrid& g, M&& m)
{
    std::vector<cplx> out(g.size());
    const auto nyq = g.nyquist();
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double xi = g.wavenumber(k);
        out[k] = (nyq && *nyq == k) ? 0.5 * (cplx(m(xi)) + cplx(m(-xi))) : cplx(m(xi));
    }
    return out;
}

/// Applies per-bin multiplier values; real input gives real output.
template <class T>
BasicField<T> apply_bins(const BasicField<T>& f, const std::vector<cplx>& mult)
{
    auto spec = forward(f.values);
    for (std::size_t k = 0; k < spec.size(); ++k) spec[k] *= mult[k];
    const auto back = inverse(spec);
    std::vector<T> v(f.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if constexpr (std::is_same_v<T, double>)
            v[i] = back[i].real();
        else
            v[i] = back[i];
    }
    return BasicField<T>(f.grid, std::move(v), f.time);
}

/// Same, keeping the full complex result (for multipliers that are not
/// conjugate symmetric).
template <class T>
ComplexField apply_bins_complex(const BasicField<T>& f, const std::vector<cplx>& mult)
{
    auto spec = forward(f.values);
    for (std::size_t k = 0; k < spec.size(); ++k) spec[k] *= mult[k];
    return ComplexField(f.grid, inverse(spec), f.time);
}

template <class T, class M>
BasicField<T> apply_multiplier(const BasicField<T>& f, M&& m)
{
    require_periodic(f.grid, "apply_multiplier");
    return apply_bins(f, bin_values(f.grid, std::forward<M>(m)));
}

} // namespace spectral

// ---------------------------------------------------------------------------
// Interpolation and shifts

namespace detail {

/// Cubic Lagrange weights for nodes -1, 0, 1, 2 at fractional position f.
inline void cubic_weights(double f, double w[4])
{
    w[0] = -f * (f - 1.0) * (f - 2.0) / 6.0;
    w[1] = (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0;
    w[2] = -(f + 1.0) * f * (f - 2.0) / 2.0;
    w[3] = (f + 1.0) * f * (f - 1.0) / 6.0;
}

inline long wrap_index(long i, long n)
{
    i %= n;
    return i < 0 ? i + n : i;
}

inline long clamp_index(long i, long n) { return std::clamp<long>(i, 0, n - 1); }

} // namespace detail

/// Cubic interpolation at x: periodic wrap, or constant extension outside
/// [x_min, x_max].
template <class T>
T interpolate(const BasicField<T>& f, double x)
{
    const auto n = static_cast<long>(f.size());
    const double pos = (x - f.grid.x_min()) / f.grid.dx();
    const double fl = std::floor(pos);
    const long i = static_cast<long>(fl);
    double w[4];
    detail::cubic_weights(pos - fl, w);
    T s{};
    for (int l = 0; l < 4; ++l) {
        const long j = i - 1 + l;
        const long jj = f.grid.periodic() ? detail::wrap_index(j, n) : detail::clamp_index(j, n);
        s += w[l] * f.values[static_cast<std::size_t>(jj)];
    }
    return s;
}

/// Weights over integer lags: (K f)_i = sum_m w[m - lo] f_{i+m}, with the
/// grid's boundary convention for indices outside the grid.
struct LagKernel {
    long lo = 0;
    std::vector<double> w;

    /// Adds `weight` times cubic interpolation at displacement d (in grid units).
    void add_displacement(double d, double weight)
    {
        const double fl = std::floor(d);
        const long i = static_cast<long>(fl);
        double c[4];
        detail::cubic_weights(d - fl, c);
        const long first = i - 1, last = i + 2;
        if (w.empty()) {
            lo = first;
            w.assign(4, 0.0);
        }
        if (first < lo) {
            w.insert(w.begin(), static_cast<std::size_t>(lo - first), 0.0);
            lo = first;
        }
        const long hi = lo + static_cast<long>(w.size()) - 1;
        if (last > hi) w.resize(w.size() + static_cast<std::size_t>(last - hi), 0.0);
        for (int l = 0; l < 4; ++l) w[static_cast<std::size_t>(first + l - lo)] += weight * c[l];
    }

    /// Reserves the lag range [first, last] (avoids repeated reallocation).
    void reserve_range(long first, long last)
    {
        if (first > last) return;
        lo = first;
        w.assign(static_cast<std::size_t>(last - first + 1), 0.0);
    }
};

template <class T>
BasicField<T> apply_lag_kernel(const BasicField<T>& f, const LagKernel& k)
{
    const auto n = static_cast<long>(f.size());
    std::vector<T> out(f.size(), T{});
    const bool periodic = f.grid.periodic();
    for (long i = 0; i < n; ++i) {
        T s{};
        for (std::size_t m = 0; m < k.w.size(); ++m) {
            if (k.w[m] == 0.0) continue;
            const long j = i + k.lo + static_cast<long>(m);
            const long jj = periodic ? detail::wrap_index(j, n) : detail::clamp_index(j, n);
            s += k.w[m] * f.values[static_cast<std::size_t>(jj)];
        }
        out[static_cast<std::size_t>(i)] = s;
    }
    return BasicField<T>(f.grid, std::move(out), f.time);
}

/// phi(x + s): spectral on periodic grids, cubic interpolation with
/// constant extension otherwise.
template <class T>
BasicField<T> shift(const BasicField<T>& phi, double s)
{
    detail::require(std::isfinite(s), "shift: displacement must be finite");
    if (s == 0.0) return phi;
    if (phi.grid.periodic())
        return spectral::apply_multiplier(phi, [s](double xi) { return std::polar(1.0, xi * s); });
    LagKernel k;
    k.add_displacement(s / phi.grid.dx(), 1.0);
    return apply_lag_kernel(phi, k);
}

/// Psi(x) = integral of psi from the leftmost node to x. Periodic grids use
/// the spectral antiderivative, which needs psi of zero mean; other grids
/// use the cumulative trapezoid rule.
template <class T>
BasicField<T> antiderivative(const BasicField<T>& psi)
{
    const auto& g = psi.grid;
    const std::size_t n = psi.size();
    std::vector<T> out(n, T{});
    if (!g.periodic()) {
        const double dx = g.dx();
        for (std::size_t i = 1; i < n; ++i) out[i] = out[i - 1] + 0.5 * dx * (psi[i - 1] + psi[i]);
        return BasicField<T>(g, std::move(out), psi.time);
    }
    auto spec = spectral::forward(psi.values);
    const double scale = std::max(psi.max_abs(), 1e-300);
    if (std::abs(spec[0]) / static_cast<double>(n) > 1e-10 * scale)
        throw RangeConditionError("antiderivative: psi must have zero mean on a periodic grid "
                                  "(its antiderivative is otherwise not periodic)");
    spec[0] = 0.0;
    const auto nyq = g.nyquist();
    for (std::size_t k = 1; k < n; ++k) {
        if (nyq && *nyq == k) {
            spec[k] = 0.0;
            continue;
        }
        spec[k] /= spectral::cplx(0.0, g.wavenumber(k));
    }
    const auto back = spectral::inverse(spec);
    for (std::size_t i = 0; i < n; ++i) {
        if constexpr (std::is_same_v<T, double>)
            out[i] = back[i].real() - back[0].real();
        else
            out[i] = back[i] - back[0];
    }
    return BasicField<T>(g, std::move(out), psi.time);
}

} // namespace fdal
