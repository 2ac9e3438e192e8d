#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <set>

#include "fdal/core/error.hpp"
#include "fdal/core/gamma.hpp"
#include "fdal/core/parallel.hpp"
#include "fdal/core/quadrature.hpp"
#include "fdal/core/rng.hpp"

using namespace fdal;

TEST(Gamma, MatchesStd)
{
    for (double x : {0.1, 0.5, 1.0, 1.5, 2.75, 7.2, 20.5, -0.5, -1.3})
        EXPECT_NEAR(gamma_fn(x) / std::tgamma(x), 1.0, 1e-13) << x;
    for (double x : {0.3, 4.0, 50.0, 170.5}) EXPECT_NEAR(log_gamma(x), std::lgamma(x), 1e-12 * std::max(1.0, std::lgamma(x)));
}

TEST(Gamma, ReciprocalAtPoles)
{
    EXPECT_EQ(rgamma(0.0), 0.0);
    EXPECT_EQ(rgamma(-3.0), 0.0);
    EXPECT_NEAR(rgamma(0.5), 1.0 / std::sqrt(std::numbers::pi), 1e-15);
}

TEST(Rng, CounterBasedAndReproducible)
{
    CounterRng a(RngSeed{5, 1}, 17), b(RngSeed{5, 1}, 17), c(RngSeed{5, 2}, 17);
    for (int i = 0; i < 10; ++i) {
        const double u = a.uniform();
        EXPECT_EQ(u, b.uniform());
        EXPECT_GT(u, 0.0);
        EXPECT_LT(u, 1.0);
    }
    EXPECT_NE(CounterRng(RngSeed{5, 1}, 17).uniform(), c.uniform());
}

TEST(Rng, UniformMoments)
{
    double s = 0.0, s2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        CounterRng r(RngSeed{9, 0}, i);
        const double u = r.uniform();
        s += u;
        s2 += u * u;
    }
    EXPECT_NEAR(s / n, 0.5, 3e-3);
    EXPECT_NEAR(s2 / n, 1.0 / 3.0, 3e-3);
}

TEST(Parallel, ReductionIndependentOfWorkers)
{
    const std::size_t n = 100003;
    auto run = [&](unsigned w) {
        return parallel_reduce(
            n, 0.0, [](double& acc, std::size_t i) { acc += std::sin(0.001 * static_cast<double>(i)); },
            [](double a, double b) { return a + b; }, w);
    };
    const double one = run(1);
    EXPECT_EQ(one, run(2));
    EXPECT_EQ(one, run(7));
}

TEST(Parallel, ChunksCoverRangeOnce)
{
    std::vector<int> hits(10000, 0);
    parallel_chunks(hits.size(), [&](std::size_t b, std::size_t e, std::size_t) {
        for (std::size_t i = b; i < e; ++i) ++hits[i];
    }, 3);
    for (int h : hits) EXPECT_EQ(h, 1);
}

TEST(Quadrature, GaussLegendrePanelsIntegratePolynomials)
{
    const auto q = gauss_legendre_panels(0.0, 2.0, 3);
    double s = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) s += q.weights[i] * std::pow(q.nodes[i], 7);
    EXPECT_NEAR(s, 256.0 / 8.0, 1e-11);
}

TEST(Error, RequireThrowsDomainError)
{
    EXPECT_THROW(detail::require(false, "x"), DomainError);
    EXPECT_NO_THROW(detail::require(true, "x"));
}
