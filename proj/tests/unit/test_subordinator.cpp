#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include "fdal/subordinator.hpp"

using namespace fdal;
using boost::math::quadrature::gauss_kronrod;

namespace {

// density of Y(t) for b = 1/2
double half_density(double t, double y) { return std::exp(-y * y / (4 * t)) / std::sqrt(std::numbers::pi * t); }

// absolutely continuous part of the law of |xi_h(t)| for the Kac walk
double kac_abs_density(double h, double t, double r)
{
    const double q = std::sqrt(t * t - r * r);
    const double i1 = q > 0 ? boost::math::cyl_bessel_i(1, h * q) / q : 0.5 * h;
    return h * std::exp(-h * t) * (boost::math::cyl_bessel_i(0, h * q) + t * i1);
}

} // namespace

TEST(Stable, LaplaceTransformOfSamples)
{
    for (double b : {0.3, 0.5, 0.8}) {
        const int n = 100000;
        double s = 0, s2 = 0;
        for (int i = 0; i < n; ++i) {
            const double x = sample_stable_one_sided(b, RngSeed{3, 0}, i);
            ASSERT_GT(x, 0.0);
            s += std::exp(-x);
            s2 += std::exp(-2 * x);
        }
        const double mean = s / n, se = std::sqrt((s2 / n - mean * mean) / n);
        EXPECT_LE(std::abs(mean - std::exp(-1.0)), 3 * se) << b;
    }
    EXPECT_EQ(sample_stable_one_sided(0.5, RngSeed{1, 2}, 77), sample_stable_one_sided(0.5, RngSeed{1, 2}, 77));
}

TEST(InverseStable, Sampling)
{
    EXPECT_EQ(sample_inverse(StableModel{1.0}, 1.7, RngSeed{1, 0}, 4).y, 1.7);
    EXPECT_EQ(sample_inverse(StableModel{0.5}, 0.0, RngSeed{1, 0}, 4).y, 0.0);
    const int n = 100000;
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
        const double y = sample_inverse(StableModel{0.5}, 1.0, RngSeed{8, 0}, i).y;
        s += y;
        s2 += y * y;
    }
    const double mean = s / n, se = std::sqrt((s2 / n - mean * mean) / n);
    EXPECT_NEAR(1.0 / std::tgamma(1.5), 1.1284, 1e-4);
    EXPECT_LE(std::abs(mean - 1.0 / std::tgamma(1.5)), 3 * se);
}

TEST(InverseStable, PathIsMonotone)
{
    const std::vector<double> times{0.1, 0.5, 1.0, 2.0};
    const auto y = sample_inverse_path(StableModel{0.7}, times, RngSeed{2, 0}, 5);
    for (std::size_t i = 1; i < y.size(); ++i) EXPECT_GE(y[i], y[i - 1]);
    EXPECT_EQ(sample_inverse_path(StableModel{1.0}, times, RngSeed{2, 0}, 5), times);
}

TEST(InverseStable, DensityHalf)
{
    const StableModel m{0.5};
    EXPECT_NEAR(inverse_density(m, 1, 1), std::exp(-0.25) / std::sqrt(std::numbers::pi), 1e-10);
    for (double t : {0.3, 2.0})
        for (double y : {0.05, 0.7, 3.0}) EXPECT_NEAR(inverse_density(m, t, y), half_density(t, y), 1e-9);
    EXPECT_NEAR(inverse_tail(m, 1.5, 0.8), std::erfc(0.8 / (2 * std::sqrt(1.5))), 1e-9);
    EXPECT_THROW(inverse_density(StableModel{1.0}, 1, 1), DegenerateModel);
}

TEST(InverseStable, DensityMassAndTransform)
{
    for (double b : {0.3, 0.6, 0.9}) {
        const StableModel m{b};
        const double mass = gauss_kronrod<double, 31>::integrate(
            [&](double y) { return inverse_density(m, 1.3, y); }, 0.0, INFINITY, 10, 1e-10);
        EXPECT_NEAR(mass, 1.0, 1e-4) << b;
        // int e^(-l t) f(t, y) dt = l^(b-1) exp(-y l^b)
        const double l = 2.0, y = 0.6;
        const double lt = gauss_kronrod<double, 31>::integrate(
            [&](double t) { return t > 0 ? std::exp(-l * t) * inverse_density(m, t, y) : 0.0; }, 0.0, INFINITY, 12,
            1e-11);
        EXPECT_NEAR(lt, std::pow(l, b - 1) * std::exp(-y * std::pow(l, b)), 1e-5) << b;
    }
}

TEST(InverseStable, QuadratureRule)
{
    const auto q = stable_quadrature(0.5);
    EXPECT_NEAR(q->raw_mass(), 1.0, 2e-6);
    double mean = 0;
    for (std::size_t i = 0; i < q->size(); ++i) mean += q->weights()[i] * q->nodes()[i];
    EXPECT_NEAR(mean, 1.0 / std::tgamma(1.5), 1e-5);
    EXPECT_EQ(stable_quadrature(0.5), q);
}

TEST(TelegraphInverse, DegenerateStep)
{
    const auto p = FracParams::fujita(2.0);
    EXPECT_EQ(telegraph_inverse_cdf(p, 1.5, 1.49), 0.0);
    EXPECT_EQ(telegraph_inverse_cdf(p, 1.5, 1.5), 1.0);
    EXPECT_EQ(sample_telegraph_inverse(p, 1.5, RngSeed{1, 0}, 3).y, 1.5);
}

TEST(TelegraphInverse, KacDensityAndAtom)
{
    const double h = 0.8, t = 1.4;
    const TelegraphModel m{2.0, h};
    EXPECT_NEAR(telegraph_atom(m, t), std::exp(-h * t), 1e-15);
    for (double r : {0.1, 0.7, 1.2, 1.39})
        EXPECT_NEAR(telegraph_inverse_density(m, t, r), kac_abs_density(h, t, r), 1e-7) << r;
    const double cont = gauss_kronrod<double, 31>::integrate([&](double r) { return kac_abs_density(h, t, r); }, 0, t);
    EXPECT_NEAR(cont + std::exp(-h * t), 1.0, 1e-10);
}

TEST(TelegraphInverse, CdfLimits)
{
    const FracParams p{1.6, 0.8, 0.5, 1.0};
    EXPECT_EQ(telegraph_inverse_cdf(p, 1.0, -0.1), 0.0);
    EXPECT_NEAR(telegraph_inverse_cdf(p, 1.0, 50.0), 1.0, 1e-7);
    double prev = 0;
    for (double x = 0.05; x < 5; x += 0.25) {
        const double c = telegraph_inverse_cdf(p, 1.0, x);
        EXPECT_GE(c, prev - 1e-12);
        prev = c;
    }
}

TEST(TelegraphInverse, LawSamplesAndMean)
{
    const double t = 1.2;
    const TelegraphInverseLaw law(FracParams{2.0, 1.0, 1.0, 1.0}, t);
    const int n = 50000;
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
        const double y = law.sample(RngSeed{4, 0}, i).y;
        ASSERT_GE(y, 0.0);
        ASSERT_LE(y, t);
        s += y;
        s2 += y * y;
    }
    const double mean = s / n, se = std::sqrt((s2 / n - mean * mean) / n);
    EXPECT_LE(std::abs(mean - law.expectation([](double y) { return y; })), 3 * se);
    EXPECT_NEAR(law.expectation([](double) { return 1.0; }), 1.0, 1e-6);

    const TelegraphInverseLaw frac(FracParams{1.5, 0.75, 0.5, 1.0}, 0.9);
    EXPECT_EQ(frac.atom(), 0.0);
    EXPECT_NEAR(frac.quantile(frac.cdf(0.6)), 0.6, 1e-6);
}
