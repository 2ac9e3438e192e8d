#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "fdal/mittag_leffler.hpp"
#include "fdal/resolvent.hpp"
#include "fdal/volterra.hpp"

using namespace fdal;
using cplx = std::complex<double>;
using boost::math::quadrature::gauss_kronrod;
constexpr double pi = std::numbers::pi;

namespace {

const SpaceGrid circle(0, 2 * pi, 128, true);
const SpaceGrid wide(-20, 20, 512, true);

Field gaussian(const SpaceGrid& g, double width = 1.0)
{
    return Field::sample(g, [width](double x) { return std::exp(-x * x / (width * width)); });
}

Field volterra_reference(const FracParams& p, double t, const Field& phi, const Field& psi, double source_order)
{
    const TimeGrid tg(t, 256);
    const auto A = DiscreteOperator::second_derivative(phi.grid, p.c);
    return solve_volterra(p.alpha, A, tg, initial_data_source(source_order, tg, phi, psi)).final();
}

} // namespace

TEST(HalfResolvent, ClassicalShift)
{
    const auto phi = Field::sample(circle, [](double x) { return std::sin(x); });
    const auto p = FracParams::fujita(2.0, 1.5);
    const auto u = apply_half_resolvent(Sign::minus, p, 0.4, phi);
    for (std::size_t i = 0; i < circle.size(); ++i) EXPECT_NEAR(u[i], std::sin(circle.node(i) - 0.6), 1e-12);
}

TEST(HalfResolvent, ConstantsAndZeroTime)
{
    const Field one = Field::sample(wide, [](double) { return 1.0; });
    const auto p = FracParams::fujita(1.4);
    for (const Backend& b : std::vector<Backend>{QuadratureBackend{}, SpectralBackend{}, MonteCarloBackend{2000, {}}}) {
        const auto u = apply_half_resolvent(Sign::plus, p, 0.8, one, b);
        for (double v : u.values) EXPECT_NEAR(v, 1.0, 1e-9) << backend_name(b);
    }
    const auto g = gaussian(wide);
    EXPECT_EQ(apply_half_resolvent(Sign::plus, p, 0.0, g).values, g.values);
}

TEST(HalfResolvent, PlaneWaveMultiplier)
{
    const double xi = 2 * pi / wide.length() * 3;
    const auto wave = ComplexField::sample(wide, [xi](double x) { return std::polar(1.0, xi * x); });
    const auto p = FracParams::fujita(1.5, 0.7);
    const double t = 1.3;
    const cplx m = ml(0.75, 1.0, cplx(0, xi * 0.7 * std::pow(t, 0.75)));
    for (const Backend& b : std::vector<Backend>{QuadratureBackend{}, SpectralBackend{}}) {
        const auto u = apply_half_resolvent(Sign::plus, p, t, wave, b);
        for (std::size_t i = 0; i < wide.size(); i += 37) EXPECT_LE(std::abs(u[i] - m * wave[i]), 1e-6);
    }
}

TEST(HalfResolvent, MonteCarloProbes)
{
    const auto p = FracParams::fujita(1.6);
    const auto g = gaussian(wide);
    const auto ref = apply_half_resolvent(Sign::plus, p, 1.0, g);
    const auto probes = half_resolvent_probes(Sign::plus, p, 1.0, g, {-1.0, 0.0, 0.5}, MonteCarloBackend{40000, {5, 0}});
    for (const auto& s : probes) {
        const double exact = interpolate(ref, s.x);
        EXPECT_LE(std::abs(s.mean - exact), 4 * s.std_error + 1e-6) << s.x;
    }
}

TEST(Fujita, ClassicalLimitAndInitialData)
{
    const auto phi = Field::sample(circle, [](double x) { return std::sin(x); });
    const Field zero(circle);
    const auto p = FracParams::fujita(2.0);
    for (double t : {0.0, 0.7, 2.0}) {
        const auto u = fujita_solution(p, t, phi, zero);
        for (std::size_t i = 0; i < circle.size(); ++i)
            EXPECT_NEAR(u[i], std::sin(circle.node(i)) * std::cos(t), 1e-12);
    }
    EXPECT_EQ(fujita_solution(FracParams::fujita(1.3), 0.0, phi, zero).values, phi.values);
}

TEST(Fujita, AgreesWithVolterra)
{
    const auto p = FracParams::fujita(1.5);
    const auto phi = gaussian(wide);
    const Field zero(wide);
    const auto u = fujita_solution(p, 1.0, phi, zero);
    EXPECT_LE(rel_l2_error(u, volterra_reference(p, 1.0, phi, zero, p.beta)), 2e-2);
    // the quadrature rule drops a 1e-6 tail of the inverse law
    const auto s = fujita_solution(p, 1.0, phi, zero, SpectralBackend{});
    EXPECT_LE(rel_l2_error(u, s), 1e-5);
}

TEST(GeneralBeta, ReducesToFujita)
{
    const auto phi = gaussian(wide);
    const auto psi = Field::sample(wide, [](double x) { return -2 * x * std::exp(-x * x); });
    const Field zero(wide);
    const auto p = FracParams::fujita(1.5);
    const FracParams other{1.5, 1.2, 0.0, 1.0};
    EXPECT_LE(rel_l2_error(general_beta_solution(other, 0.9, phi, zero), fujita_solution(p, 0.9, phi, zero)), 1e-12);
    EXPECT_LE(rel_l2_error(general_beta_solution(p, 0.9, phi, psi), fujita_solution(p, 0.9, phi, psi)), 1e-3);
}

TEST(GeneralBeta, WaveWithVelocity)
{
    const Field zero(circle);
    const auto psi = Field::sample(circle, [](double x) { return std::cos(x); });
    const FracParams p{2.0, 1.0, 0.0, 1.0};
    const auto u = general_beta_solution(p, 1.1, zero, psi);
    for (std::size_t i = 0; i < circle.size(); ++i) EXPECT_NEAR(u[i], std::cos(circle.node(i)) * std::sin(1.1), 1e-5);
}

TEST(GeneralBeta, AgreesWithVolterra)
{
    const auto phi = gaussian(wide);
    const auto psi = Field::sample(wide, [](double x) { return -2 * x * std::exp(-x * x); });
    const FracParams p{1.5, 1.0, 0.0, 1.0};
    const auto u = general_beta_solution(p, 1.0, phi, psi);
    EXPECT_LE(rel_l2_error(u, volterra_reference(p, 1.0, phi, psi, p.beta)), 2e-2);
}

TEST(RlProblem, LimitsAndVolterra)
{
    const auto psi = gaussian(wide);
    const auto p = FracParams::fujita(1.5);
    EXPECT_EQ(rl_problem_solution(p, 0.0, psi).max_abs(), 0.0);
    EXPECT_LT(rl_problem_solution(p, 1e-6, psi).max_abs(), 1e-2);

    const auto c = Field::sample(circle, [](double x) { return std::cos(x); });
    const auto w = rl_problem_solution(FracParams::fujita(2.0), 1.3, c);
    for (std::size_t i = 0; i < circle.size(); ++i) EXPECT_NEAR(w[i], std::cos(circle.node(i)) * std::sin(1.3), 1e-5);

    const Field zero(wide);
    const auto u = rl_problem_solution(p, 1.0, psi);
    EXPECT_LE(rel_l2_error(u, volterra_reference(p, 1.0, zero, psi, p.alpha - 1.0)), 2e-2);
}

TEST(HBetaWeight, ReducesToInverseDensity)
{
    const auto p = FracParams::fujita(1.4);
    for (double y : {0.1, 0.8, 2.0}) EXPECT_EQ(h_beta_weight(p, 1.2, y), inverse_density(StableModel{0.7}, 1.2, y));
    EXPECT_EQ(h_beta_weight(p, 1.2, -0.5), 0.0);
}

TEST(HBetaWeight, MassAndIdentity)
{
    for (const FracParams p : {FracParams{1.5, 1.0, 0, 1}, FracParams{1.2, 1.1, 0, 1}}) {
        const double t = 1.3;
        const double mass = gauss_kronrod<double, 31>::integrate([&](double y) { return h_beta_weight(p, t, y); }, 0.0,
                                                                 INFINITY, 10, 1e-10);
        EXPECT_NEAR(mass, 1.0, 1e-3);
        const double gam = p.beta - p.half();
        // the kernel (t - s)^(gam - 1) is singular at s = t; tanh-sinh passes t - s directly
        boost::math::quadrature::tanh_sinh<double> ts;
        for (double y : {0.3, 1.1}) {
            const double conv = ts.integrate(
                [&](double s, double tc) {
                    const double d = tc > 0 ? tc : t - s;
                    return s > 0 ? std::pow(d, gam - 1) / std::tgamma(gam) * inverse_density(StableModel{p.half()}, s, y) : 0.0;
                },
                0.0, t);
            EXPECT_NEAR(conv, g_kernel(1 + gam, t) * h_beta_weight(p, t, y), 1e-8) << y;
        }
    }
}

TEST(CosineGroup, Multiplier)
{
    const auto wave = ComplexField::sample(circle, [](double x) { return std::polar(1.0, 4 * x); });
    const auto u = cosine_group(0.9, wave);
    for (std::size_t i = 0; i < circle.size(); ++i) EXPECT_LE(std::abs(u[i] - std::cos(3.6) * wave[i]), 1e-12);
}

TEST(CosineGroup, GaussianSplits)
{
    const auto g = gaussian(wide, 0.5);
    const auto u = cosine_group(4.0, g);
    for (std::size_t i = 0; i < wide.size(); ++i) {
        const double x = wide.node(i);
        const double exact = 0.5 * (std::exp(-4 * (x - 4) * (x - 4)) + std::exp(-4 * (x + 4) * (x + 4)));
        EXPECT_NEAR(u[i].real(), exact, 1e-9);
    }
}

TEST(CosineGroup, SubordinatedMatchesHalfSum)
{
    const auto p = FracParams::fujita(1.6);
    const auto g = gaussian(wide);
    const auto u = subordinated_cosine(p, 1.1, g);
    EXPECT_LE(max_imag(u), 1e-10);
    EXPECT_LE(max_abs_error(u, half_sum(p, 1.1, g, SpectralBackend{})), 1e-6);
    EXPECT_EQ(max_abs_error(subordinated_cosine(p, 0.0, g), g), 0.0);
}
