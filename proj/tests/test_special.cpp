#include "dkp/eigenfunction.hpp"
#include "dkp/kummer.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace dkp;

namespace {

/// Generalized Laguerre polynomial by the three-term recurrence.
double laguerre(int n, double a, double x)
{
    double prev = 1.0;
    if (n == 0)
        return prev;
    double cur = 1.0 + a - x;
    for (int k = 1; k < n; ++k) {
        const double next = ((2.0 * k + 1.0 + a - x) * cur - (k + a) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

double binomial(int n, int k)
{
    double out = 1.0;
    for (int j = 1; j <= k; ++j)
        out = out * (n - k + j) / j;
    return out;
}

} // namespace

TEST(Kummer, EqualsOneAtOrigin)
{
    for (double a : {-3.0, -0.5, 0.0, 0.7, 2.5})
        for (double g : {1.0, 2.0, 3.5})
            EXPECT_EQ(kummer_m({a, g}, 0.0), 1.0);
}

TEST(Kummer, HandWrittenTerminatingSeries)
{
    EXPECT_DOUBLE_EQ(kummer_m({-1.0, 2.0}, 1.0), 0.5);
    for (double x : {0.0, 0.3, 2.0, 7.5})
        EXPECT_NEAR(kummer_m({-1.0, 2.0}, x), 1.0 - x / 2.0, 1e-15 * (1 + x));
}

TEST(Kummer, MatchesLaguerreRecurrence)
{
    for (int n = 0; n <= 4; ++n)
        for (int m = 0; m <= 3; ++m)
            for (double x : {0.5, 1.0, 2.0}) {
                const double expect = laguerre(n, m, x) / binomial(n + m, n);
                EXPECT_NEAR(kummer_m({-static_cast<double>(n), m + 1.0}, x), expect, 1e-10 * (1 + std::abs(expect)));
            }
}

TEST(Kummer, ExponentialSpecialCase)
{
    // M(a, a; x) = e^x
    for (double x : {0.1, 1.0, 5.0, 20.0})
        EXPECT_NEAR(kummer_m({1.5, 1.5}, x), std::exp(x), 1e-13 * std::exp(x));
}

TEST(Kummer, ContiguousRelation)
{
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> ua(-2.5, 3.0), ug(0.5, 4.0), ux(0.0, 10.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double a = ua(rng), g = ug(rng), x = ux(rng);
        const double lo = kummer_m({a - 1, g}, x), mid = kummer_m({a, g}, x), hi = kummer_m({a + 1, g}, x);
        const double lhs = (g - a) * lo + (2 * a - g + x) * mid - a * hi;
        const double scale = std::abs((g - a) * lo) + std::abs((2 * a - g + x) * mid) + std::abs(a * hi);
        EXPECT_LE(std::abs(lhs), 1e-10 * scale) << a << " " << g << " " << x;
    }
}

TEST(Kummer, PoleAndDomainErrors)
{
    for (double g : {0.0, -1.0, -4.0}) {
        try {
            kummer_m({0.5, g}, 1.0);
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::pole);
        }
    }
    EXPECT_THROW(kummer_m({0.5, 1.0}, -1.0), Error);
}

TEST(Kummer, NonConvergenceIsAnAccuracyError)
{
    try {
        kummer_m({0.5, 1.0}, 2000.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::accuracy);
    }
}

TEST(Eigenfunction, GroundStateIsGaussian)
{
    const auto g = default_grid(0.5, 0, 0);
    const auto f = build_eigenfunction(0, 0, 0.5, g);
    EXPECT_EQ(f.lambda2, 1.0);
    for (std::size_t i = 0; i < g.size(); i += 50)
        EXPECT_NEAR(f.profile[i].real(), std::exp(-0.25 * g.node(i) * g.node(i)), 1e-15);
    EXPECT_LT(ode_residual_r(f), 1e-12);
}

TEST(Eigenfunction, FirstAngularState)
{
    const auto g = default_grid(0.5, 0, 1);
    const auto f = build_eigenfunction(0, 1, 0.5, g);
    EXPECT_EQ(f.lambda2, 3.0);
    for (std::size_t i = 0; i < g.size(); i += 50) {
        const double r = g.node(i);
        EXPECT_NEAR(f.profile[i].real(), std::sqrt(0.5 * r * r) * std::exp(-0.25 * r * r), 1e-15);
    }
    EXPECT_LT(ode_residual_r(f), 1e-8);
    EXPECT_LT(ode_residual_r(f, true), 1e-8);
}

TEST(Eigenfunction, SignChangesEqualRadialQuantumNumber)
{
    for (int n = 0; n <= 5; ++n)
        for (int m = -3; m <= 3; ++m)
            EXPECT_EQ(build_eigenfunction(n, m, 0.5, RadialGrid(1e-3, 10.0, 11)).polynomial_sign_changes(), n);
}

TEST(Eigenfunction, SatisfiesOdeInX)
{
    for (int n = 0; n <= 3; ++n)
        for (int m = -3; m <= 3; ++m)
            for (double b : {0.25, 0.5, 1.0}) {
                const auto f = build_eigenfunction(n, m, b, default_grid(b, n, m, 101));
                EXPECT_LE(ode_residual_x(f), 1e-8) << n << " " << m;
            }
}

TEST(Eigenfunction, RadialOdeConvergesAtFourthOrder)
{
    double previous = 0.0;
    for (std::size_t points : {500u, 1000u, 2000u}) {
        const auto f = build_eigenfunction(1, 2, 0.5, RadialGrid(1e-3, 9.0, points));
        const double res = ode_residual_r(f, true);
        if (previous > 0.0) {
            EXPECT_GT(std::log2(previous / res), 3.5);
        }
        previous = res;
    }
}

TEST(Normalize, GroundStateHasUnitNormAndIsIdempotent)
{
    const auto f = normalize(build_eigenfunction(0, 0, 0.5, default_grid(0.5, 0, 0)));
    std::vector<cplx> density(f.profile.size());
    for (std::size_t i = 0; i < density.size(); ++i)
        density[i] = std::norm(f.profile[i]) * f.profile.grid().node(i);
    EXPECT_NEAR(integrate_from_origin(f.profile.grid(), density).real(), 1.0, 1e-10);
    EXPECT_NEAR(f.scale, 1.0, 1e-12);
    const auto twice = normalize(f);
    EXPECT_NEAR(twice.scale, f.scale, 1e-12);
    // sampled path agrees with the closed-form path
    auto sampled = f;
    sampled.profile = f.profile.sampled();
    EXPECT_NEAR(normalize(sampled).scale, f.scale, 1e-10);
}

TEST(Normalize, ZeroProfileIsAnError)
{
    auto f = build_eigenfunction(0, 0, 0.5, RadialGrid(1e-3, 10.0, 101));
    f.profile = RadialProfile::zero(f.profile.grid());
    EXPECT_THROW(normalize(f), Error);
}

TEST(Normalize, ShortGridWarnsAboutTruncation)
{
    const auto f = build_eigenfunction(0, 0, 0.5, RadialGrid(1e-3, 3.0, 101));
    EXPECT_FALSE(f.warnings.empty());
    EXPECT_TRUE(build_eigenfunction(0, 0, 0.5, default_grid(0.5, 0, 0, 101)).warnings.empty());
}

TEST(Quantization, ValuesAndNegativeMDegeneracy)
{
    EXPECT_EQ(lambda2_quantized(0, 0, 0.5), 1.0);
    EXPECT_EQ(lambda2_quantized(0, 1, 0.5), 3.0);
    EXPECT_EQ(lambda2_quantized(2, -5, 0.5), 5.0);
    EXPECT_EQ(lambda2_quantized(2, -1, 0.5), 5.0);
    EXPECT_THROW(lambda2_quantized(-1, 0, 0.5), Error);
}
