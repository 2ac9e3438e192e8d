#pragma once

#include <cmath>
#include <complex>
#include <initializer_list>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "fdal/core/error.hpp"
#include "fdal/kernelcalc.hpp"
#include "fdal/space.hpp"

namespace fdal {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Sparse spatial operator on a grid.
class DiscreteOperator {
public:
    enum class Kind { second_derivative, first_derivative, lattice_backward_difference, custom };

    /// c^2 d^2/dx^2, centred 3-point stencil. Zero ghost values on non-periodic grids.
    static DiscreteOperator second_derivative(const SpaceGrid& g, double c = 1.0)
    {
        detail::require(c > 0.0, "second_derivative: c must be positive");
        const double s = c * c / (g.dx() * g.dx());
        return banded(Kind::second_derivative, g, {{-1, s}, {0, -2.0 * s}, {1, s}});
    }

    /// sign * c d/dx, upwind: forward difference for +, backward for -.
    static DiscreteOperator first_derivative(const SpaceGrid& g, double c, int sign)
    {
        detail::require(c > 0.0 && (sign == 1 || sign == -1), "first_derivative: bad coefficients");
        const double s = c / g.dx();
        if (sign > 0) return banded(Kind::first_derivative, g, {{0, -s}, {1, s}});
        return banded(Kind::first_derivative, g, {{-1, s}, {0, -s}});
    }

    /// (A p)(k) = p(k) - p(k-1) on a window of integer sites; sites left of the window are 0.
    static DiscreteOperator lattice_backward_difference(const SpaceGrid& g)
    {
        return banded(Kind::lattice_backward_difference, g, {{-1, -1.0}, {0, 1.0}});
    }

    static DiscreteOperator custom(const SpaceGrid& g, SparseMatrix m)
    {
        detail::require(static_cast<std::size_t>(m.rows()) == g.size() && m.rows() == m.cols(),
                        "custom operator: matrix must be n_points x n_points");
        return DiscreteOperator(Kind::custom, g, std::move(m));
    }

    Kind kind() const { return kind_; }
    const SpaceGrid& grid() const { return grid_; }
    const SparseMatrix& matrix() const { return m_; }

    DiscreteOperator operator*(double s) const { return DiscreteOperator(Kind::custom, grid_, s * m_); }
    DiscreteOperator squared() const { return DiscreteOperator(Kind::custom, grid_, SparseMatrix(m_ * m_)); }

    template <class T>
    BasicField<T> apply(const BasicField<T>& f) const
    {
        detail::require(f.grid == grid_, "operator applied to a field on another grid");
        BasicField<T> out(f.grid);
        apply_raw(f.values.data(), out.values.data());
        out.time = f.time;
        return out;
    }

    template <class T>
    void apply_raw(const T* in, T* out) const
    {
        for (std::size_t i = 0; i < grid_.size(); ++i) out[i] = T{};
        for (int k = 0; k < m_.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(m_, k); it; ++it) out[it.row()] += it.value() * in[it.col()];
    }

private:
    DiscreteOperator(Kind k, SpaceGrid g, SparseMatrix m) : kind_(k), grid_(g), m_(std::move(m)) {}

    static DiscreteOperator banded(Kind k, const SpaceGrid& g, std::initializer_list<std::pair<long, double>> st)
    {
        const long n = static_cast<long>(g.size());
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(st.size() * g.size());
        for (long i = 0; i < n; ++i)
            for (auto [off, w] : st) {
                long j = i + off;
                if (g.periodic())
                    j = detail::wrap_index(j, n);
                else if (j < 0 || j >= n)
                    continue;
                trip.emplace_back(static_cast<int>(i), static_cast<int>(j), w);
            }
        SparseMatrix m(n, n);
        m.setFromTriplets(trip.begin(), trip.end());
        return DiscreteOperator(k, g, std::move(m));
    }

    Kind kind_;
    SpaceGrid grid_;
    SparseMatrix m_;
};

/// Fields at every node of a time grid.
template <class T>
struct Trajectory {
    TimeGrid grid;
    std::vector<BasicField<T>> u;
    /// D^beta u for sequential solves.
    std::vector<BasicField<T>> v;
    /// ||v||^2 + <-A2 u, u> per node (sequential solves only).
    std::vector<double> energy;

    const BasicField<T>& final() const { return u.back(); }
};

namespace detail {

class StepSolver {
public:
    StepSolver(const SparseMatrix& m, const char* who) : n_(m.rows()), m_(m)
    {
        bool lower = true, upper = true;
        for (int k = 0; k < m_.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(m_, k); it; ++it) {
                if (it.value() == 0.0) continue;
                lower = lower && it.row() >= it.col();
                upper = upper && it.row() <= it.col();
            }
        shape_ = lower ? Shape::lower : upper ? Shape::upper : Shape::general;
        if (shape_ != Shape::general) {
            for (Eigen::Index i = 0; i < n_; ++i)
                if (m_.coeff(i, i) == 0.0) throw SolverError(std::string(who) + ": step matrix is singular (step 1)");
            return;
        }
        lu_.analyzePattern(m_);
        lu_.factorize(m_);
        if (lu_.info() != Eigen::Success)
            throw SolverError(std::string(who) + ": step matrix is singular (step 1)");
    }

    template <class T>
    void solve(std::vector<T>& rhs, std::size_t step, const char* who) const
    {
        if constexpr (std::is_same_v<T, double>) {
            Eigen::Map<Eigen::VectorXd> b(rhs.data(), n_);
            Eigen::VectorXd x = solve_real(b);
            check(x, step, who);
            b = x;
        } else {
            Eigen::VectorXd re(n_), im(n_);
            for (Eigen::Index i = 0; i < n_; ++i) {
                re[i] = rhs[i].real();
                im[i] = rhs[i].imag();
            }
            Eigen::VectorXd xr = solve_real(re);
            Eigen::VectorXd xi = solve_real(im);
            check(xr, step, who);
            check(xi, step, who);
            for (Eigen::Index i = 0; i < n_; ++i) rhs[i] = T(xr[i], xi[i]);
        }
    }

private:
    enum class Shape { lower, upper, general };

    template <class V>
    Eigen::VectorXd solve_real(const V& b) const
    {
        // triangular steps (lattice systems) use substitution, which is also mirror-symmetric
        switch (shape_) {
        case Shape::lower: return m_.triangularView<Eigen::Lower>().solve(Eigen::VectorXd(b));
        case Shape::upper: return m_.triangularView<Eigen::Upper>().solve(Eigen::VectorXd(b));
        default: return lu_.solve(b);
        }
    }

    static void check(const Eigen::VectorXd& x, std::size_t step, const char* who)
    {
        if (!x.allFinite())
            throw SolverError(std::string(who) + ": linear solve failed at step " + std::to_string(step));
    }

    Eigen::Index n_;
    SparseMatrix m_;
    Shape shape_ = Shape::general;
    Eigen::SparseLU<SparseMatrix> lu_;
};

inline SparseMatrix identity(Eigen::Index n)
{
    SparseMatrix id(n, n);
    id.setIdentity();
    return id;
}

/// History part sum_{j<n} w_{n,j} x_j of a product-trapezoid convolution.
template <class T>
void history(ProductTrapezoid& rule, const std::vector<BasicField<T>>& x, std::size_t n, std::vector<T>& out)
{
    const std::size_t m = out.size();
    const double w0 = rule.start(n);
    for (std::size_t i = 0; i < m; ++i) out[i] = w0 * x[0][i];
    for (std::size_t j = 1; j < n; ++j) {
        const double w = rule.interior(n - j);
        const T* xj = x[j].values.data();
        for (std::size_t i = 0; i < m; ++i) out[i] += w * xj[i];
    }
}

} // namespace detail

/// u(t) = f(t) + (g_alpha * A u)(t) by implicit product-trapezoid marching.
/// f holds the source at every node of `grid`.
template <class T>
Trajectory<T> solve_volterra(double alpha, const DiscreteOperator& A, const TimeGrid& grid,
                             const std::vector<BasicField<T>>& f)
{
    detail::require(std::isfinite(alpha) && alpha > 0.0 && alpha <= 2.0, "solve_volterra: alpha must lie in (0, 2]");
    detail::require(f.size() == grid.size(), "solve_volterra: source needs one field per time node");
    for (const auto& fj : f) detail::require(fj.grid == A.grid(), "solve_volterra: source on another grid");
    const auto n_pts = static_cast<Eigen::Index>(A.grid().size());
    ProductTrapezoid rule(alpha, grid.dt());
    const detail::StepSolver lu(SparseMatrix(detail::identity(n_pts) - rule.diagonal() * A.matrix()),
                                "solve_volterra");

    Trajectory<T> out{grid, {}, {}, {}};
    out.u.reserve(grid.size());
    out.u.push_back(f[0]);
    out.u[0].time = 0.0;
    // A u_j is kept so the history sum needs one pass per step
    std::vector<BasicField<T>> au;
    au.reserve(grid.size());
    au.push_back(A.apply(out.u[0]));
    std::vector<T> hist(n_pts);
    for (std::size_t n = 1; n < grid.size(); ++n) {
        detail::history(rule, au, n, hist);
        BasicField<T> un(A.grid());
        for (Eigen::Index i = 0; i < n_pts; ++i) un[i] = f[n][i] + hist[i];
        lu.solve(un.values, n, "solve_volterra");
        un.time = grid.node(n);
        au.push_back(A.apply(un));
        out.u.push_back(std::move(un));
    }
    return out;
}

/// Constant-in-time source.
template <class T>
Trajectory<T> solve_volterra(double alpha, const DiscreteOperator& A, const TimeGrid& grid, const BasicField<T>& f)
{
    return solve_volterra(alpha, A, grid, std::vector<BasicField<T>>(grid.size(), f));
}

/// max_n ||u_n - f_n - sum_j w_{n,j} A u_j||_inf of a trajectory.
template <class T>
double volterra_residual(double alpha, const DiscreteOperator& A, const Trajectory<T>& tr,
                         const std::vector<BasicField<T>>& f)
{
    ProductTrapezoid rule(alpha, tr.grid.dt());
    std::vector<BasicField<T>> au;
    for (const auto& u : tr.u) au.push_back(A.apply(u));
    std::vector<T> hist(A.grid().size());
    double r = 0.0;
    for (std::size_t i = 0; i < hist.size(); ++i) r = std::max(r, std::abs(tr.u[0][i] - f[0][i]));
    for (std::size_t n = 1; n < tr.u.size(); ++n) {
        detail::history(rule, au, n, hist);
        for (std::size_t i = 0; i < hist.size(); ++i)
            r = std::max(r, std::abs(tr.u[n][i] - f[n][i] - hist[i] - rule.diagonal() * au[n][i]));
    }
    return r;
}

/// Source phi + g_{1+beta}(t) psi of the integrated forms.
template <class T>
std::vector<BasicField<T>> initial_data_source(double beta, const TimeGrid& grid, const BasicField<T>& phi,
                                               const BasicField<T>& psi)
{
    require_same_grid(phi, psi);
    std::vector<BasicField<T>> f;
    f.reserve(grid.size());
    for (std::size_t n = 0; n < grid.size(); ++n) {
        const double g = g_kernel(1.0 + beta, grid.node(n));
        BasicField<T> fn = phi;
        for (std::size_t i = 0; i < fn.size(); ++i) fn[i] += g * psi[i];
        fn.time = grid.node(n);
        f.push_back(std::move(fn));
    }
    return f;
}

/// Sequential Caputo problem D^(alpha-beta) D^beta u + 2h D^beta u = A2 u,
/// u(0) = phi, D^beta u(0) = psi, written as the coupled integral system
///   u = phi + J^beta v,   v = psi + J^(alpha-beta) (A2 u - 2h v)
/// and marched with product-trapezoid weights, implicitly in both unknowns.
template <class T>
Trajectory<T> solve_sequential(const FracParams& params, const DiscreteOperator& A2, const TimeGrid& grid,
                               const BasicField<T>& phi, const BasicField<T>& psi)
{
    params.validate();
    require_same_grid(phi, psi);
    detail::require(phi.grid == A2.grid(), "solve_sequential: data on another grid");
    const double beta = params.beta;
    const double gam = params.alpha - beta;
    detail::require(gam > 1e-12, "solve_sequential: requires beta < alpha");
    if (params.h > 0.0)
        detail::require(std::abs(beta - params.half()) <= 1e-12, "solve_sequential: damping requires beta = alpha/2");
    const auto n_pts = static_cast<Eigen::Index>(phi.size());
    ProductTrapezoid ru(beta, grid.dt());
    ProductTrapezoid rv(gam, grid.dt());
    const double du = ru.diagonal();
    const double dv = rv.diagonal();
    const double h2 = 2.0 * params.h;
    // ((1 + 2h dv) I - dv du A2) v_n = psi + Hv + dv A2 (phi + Hu),  Hv includes -2h history
    const detail::StepSolver lu(
        SparseMatrix((1.0 + h2 * dv) * detail::identity(n_pts) - (dv * du) * A2.matrix()), "solve_sequential");

    Trajectory<T> out{grid, {}, {}, {}};
    out.u.reserve(grid.size());
    out.v.reserve(grid.size());
    out.u.push_back(phi);
    out.v.push_back(psi);
    out.u[0].time = 0.0;
    out.v[0].time = 0.0;
    // rhs of the v equation, r_j = A2 u_j - 2h v_j
    std::vector<BasicField<T>> r;
    r.reserve(grid.size());
    const auto rhs_of = [&](const BasicField<T>& u, const BasicField<T>& v) {
        auto a = A2.apply(u);
        for (Eigen::Index i = 0; i < n_pts; ++i) a[i] -= h2 * v[i];
        return a;
    };
    r.push_back(rhs_of(phi, psi));
    std::vector<T> hu(n_pts), hv(n_pts), tmp(n_pts);
    for (std::size_t n = 1; n < grid.size(); ++n) {
        detail::history(ru, out.v, n, hu);
        detail::history(rv, r, n, hv);
        for (Eigen::Index i = 0; i < n_pts; ++i) tmp[i] = phi[i] + hu[i];
        std::vector<T> a2(n_pts);
        A2.apply_raw(tmp.data(), a2.data());
        BasicField<T> vn(phi.grid);
        for (Eigen::Index i = 0; i < n_pts; ++i) vn[i] = psi[i] + hv[i] + dv * a2[i];
        lu.solve(vn.values, n, "solve_sequential");
        BasicField<T> un(phi.grid);
        for (Eigen::Index i = 0; i < n_pts; ++i) un[i] = tmp[i] + du * vn[i];
        un.time = vn.time = grid.node(n);
        r.push_back(rhs_of(un, vn));
        out.u.push_back(std::move(un));
        out.v.push_back(std::move(vn));
    }
    out.energy.reserve(grid.size());
    for (std::size_t n = 0; n < grid.size(); ++n) {
        const auto au = A2.apply(out.u[n]);
        double e = 0.0;
        for (Eigen::Index i = 0; i < n_pts; ++i)
            e += std::norm(std::complex<double>(out.v[n][i])) -
                 std::real(std::complex<double>(au[i]) * std::conj(std::complex<double>(out.u[n][i])));
        out.energy.push_back(e * phi.grid.dx());
    }
    return out;
}

/// max_n of the integral-system residual of a sequential trajectory.
template <class T>
double sequential_residual(const FracParams& params, const DiscreteOperator& A2, const Trajectory<T>& tr)
{
    const auto& phi = tr.u[0];
    const auto& psi = tr.v[0];
    ProductTrapezoid ru(params.beta, tr.grid.dt());
    ProductTrapezoid rv(params.alpha - params.beta, tr.grid.dt());
    std::vector<BasicField<T>> r;
    for (std::size_t n = 0; n < tr.u.size(); ++n) {
        auto a = A2.apply(tr.u[n]);
        for (std::size_t i = 0; i < a.size(); ++i) a[i] -= 2.0 * params.h * tr.v[n][i];
        r.push_back(std::move(a));
    }
    const std::size_t m = phi.size();
    std::vector<T> hu(m), hv(m);
    double res = 0.0;
    for (std::size_t n = 1; n < tr.u.size(); ++n) {
        detail::history(ru, tr.v, n, hu);
        detail::history(rv, r, n, hv);
        for (std::size_t i = 0; i < m; ++i) {
            res = std::max(res, std::abs(tr.u[n][i] - phi[i] - hu[i] - ru.diagonal() * tr.v[n][i]));
            res = std::max(res, std::abs(tr.v[n][i] - psi[i] - hv[i] - rv.diagonal() * r[n][i]));
        }
    }
    return res;
}

/// Richardson extrapolation fine + (fine - coarse) / (2^order - 1) of
/// two solutions whose step sizes differ by a factor 2.
template <class T>
BasicField<T> richardson(const BasicField<T>& coarse, const BasicField<T>& fine, double order)
{
    require_same_grid(coarse, fine);
    const double f = 1.0 / (std::pow(2.0, order) - 1.0);
    BasicField<T> out = fine;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += f * (fine[i] - coarse[i]);
    return out;
}

/// Trajectory with twice the time steps, sampled back on the coarse nodes.
template <class T>
std::vector<BasicField<T>> coarse_nodes(const Trajectory<T>& fine)
{
    std::vector<BasicField<T>> out;
    for (std::size_t n = 0; n < fine.u.size(); n += 2) out.push_back(fine.u[n]);
    return out;
}

} // namespace fdal
