#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fdal/mittag_leffler.hpp"
#include "fdal/telegraph.hpp"
#include "fdal/volterra.hpp"

using namespace fdal;
constexpr double pi = std::numbers::pi;

namespace {

const SpaceGrid circle(0, 2 * pi, 128, true);

Field sine(const SpaceGrid& g) { return Field::sample(g, [](double x) { return std::sin(x); }); }

// eigenvalue of the 3-point Laplacian on sin x
double discrete_symbol(const SpaceGrid& g) { return (2.0 - 2.0 * std::cos(g.dx())) / (g.dx() * g.dx()); }

double sine_error(const Field& u, double amp)
{
    double e = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) e = std::max(e, std::abs(u[i] - amp * std::sin(u.grid.node(i))));
    return e;
}

} // namespace

TEST(Volterra, ZeroOperatorReturnsSource)
{
    const auto A = DiscreteOperator::custom(circle, SparseMatrix(circle.size(), circle.size()));
    const TimeGrid tg(1.0, 16);
    std::vector<Field> f;
    for (std::size_t n = 0; n < tg.size(); ++n)
        f.push_back(Field::sample(circle, [&](double x) { return std::cos(x) * (1 + tg.node(n)); }));
    const auto tr = solve_volterra(1.3, A, tg, f);
    for (std::size_t n = 0; n < tg.size(); ++n) EXPECT_LE(max_abs_error(tr.u[n], f[n]), 1e-15);
}

TEST(Volterra, WaveMatchesDAlembert)
{
    const auto phi = Field::sample(circle, [](double x) { return std::exp(std::cos(x)); });
    const double t = 1.1;
    const auto A = DiscreteOperator::second_derivative(circle);
    const TimeGrid tg(t, 200);
    const auto u = solve_volterra(2.0, A, tg, phi).final();
    for (std::size_t i = 0; i < circle.size(); ++i) {
        const double x = circle.node(i);
        EXPECT_NEAR(u[i], 0.5 * (std::exp(std::cos(x + t)) + std::exp(std::cos(x - t))), 2e-2);
    }
}

TEST(Volterra, ConvergenceOrder)
{
    const double alpha = 1.5, t = 1.0;
    const auto A = DiscreteOperator::second_derivative(circle);
    const double exact = ml(alpha, 1.0, -discrete_symbol(circle) * std::pow(t, alpha)).real();
    std::vector<double> err;
    for (std::size_t n : {32, 64, 128}) {
        const auto tr = solve_volterra(alpha, A, TimeGrid(t, n), sine(circle));
        err.push_back(sine_error(tr.final(), exact));
    }
    EXPECT_LT(err[2], err[1]);
    EXPECT_GE(std::log2(err[0] / err[1]), 1.5);
    EXPECT_GE(std::log2(err[1] / err[2]), 1.5);
}

TEST(Volterra, ResidualAndRichardson)
{
    const auto A = DiscreteOperator::second_derivative(circle, 0.8);
    const TimeGrid tg(0.7, 40);
    const auto f = initial_data_source(0.9, tg, sine(circle), sine(circle));
    const auto tr = solve_volterra(1.8, A, tg, f);
    EXPECT_LE(volterra_residual(1.8, A, tr, f), 1e-10);

    const auto fine = solve_volterra(1.8, A, tg.refined(), sine(circle));
    const auto coarse = solve_volterra(1.8, A, tg, sine(circle));
    EXPECT_EQ(coarse_nodes(fine).size(), tg.size());
    const double exact = ml(1.8, 1.0, -0.64 * discrete_symbol(circle) * std::pow(0.7, 1.8)).real();
    const auto extra = richardson(coarse.final(), fine.final(), 2.0);
    EXPECT_LT(sine_error(extra, exact), sine_error(fine.final(), exact));
}

TEST(Volterra, RejectsBadArguments)
{
    const auto A = DiscreteOperator::second_derivative(circle);
    const TimeGrid tg(1.0, 8);
    EXPECT_THROW(solve_volterra(0.0, A, tg, sine(circle)), DomainError);
    EXPECT_THROW(solve_volterra(2.5, A, tg, sine(circle)), DomainError);
    const SpaceGrid other(0, 1, 16, true);
    EXPECT_THROW(solve_volterra(1.5, A, tg, Field::sample(other, [](double) { return 0.0; })), DomainError);
}

TEST(Sequential, UndampedReducesToVolterra)
{
    const auto p = FracParams::fujita(1.6);
    const auto A2 = DiscreteOperator::second_derivative(circle);
    const TimeGrid tg(1.0, 128);
    const auto phi = Field::sample(circle, [](double x) { return std::exp(std::sin(x)); });
    const Field zero(circle);
    const auto seq = solve_sequential(p, A2, tg, phi, zero).final();
    const auto vol = solve_volterra(1.6, A2, tg, phi).final();
    EXPECT_LE(max_abs_error(seq, vol), 2e-2);
}

TEST(Sequential, DampedWaveMatchesTelegraph)
{
    // u_tt + 2h u_t = u_xx with u = sin x, u_t = 0: the multiplier at xi = h = 1 is e^{-t}(1 + t)
    const FracParams p{2.0, 1.0, 1.0, 1.0};
    const auto A2 = DiscreteOperator::second_derivative(circle);
    const TimeGrid tg(1.5, 300);
    const Field zero(circle);
    const auto tr = solve_sequential(p, A2, tg, sine(circle), zero);
    EXPECT_LE(sine_error(tr.final(), std::exp(-1.5) * 2.5), 2e-2);
    EXPECT_LE(sequential_residual(p, A2, tr), 1e-8);

    const auto probes = kac_probes(p, 1.5, sine(circle), {0.5, 1.5, 4.0}, 40000, {17, 0});
    for (const auto& s : probes) EXPECT_LE(std::abs(s.mean - interpolate(tr.final(), s.x)), 3 * s.std_error + 1e-3);

    // energy decays under damping
    for (std::size_t n = 1; n < tr.energy.size(); ++n) EXPECT_LE(tr.energy[n], tr.energy[n - 1] + 1e-9);
}

TEST(Sequential, RejectsDampingOffHalf)
{
    const FracParams p{1.6, 1.0, 0.5, 1.0};
    const auto A2 = DiscreteOperator::second_derivative(circle);
    const Field zero(circle);
    EXPECT_THROW(solve_sequential(p, A2, TimeGrid(1.0, 8), sine(circle), zero), DomainError);
}
