#include "dkp/profile.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace dkp;

TEST(RadialGrid, RejectsOriginAndBadBounds)
{
    EXPECT_THROW(RadialGrid(0.0, 1.0, 10), Error);
    try {
        RadialGrid(0.0, 1.0, 10);
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::singular_node);
    }
    EXPECT_THROW(RadialGrid(1.0, 0.5, 10), Error);
    EXPECT_THROW(RadialGrid(0.1, 1.0, 2), Error);
}

TEST(RadialGrid, NodesStrictlyIncreasingAndEndpointsExact)
{
    for (auto spacing : {Spacing::uniform, Spacing::log_uniform}) {
        RadialGrid g(1e-3, 7.0, 101, spacing);
        EXPECT_DOUBLE_EQ(g.node(0), 1e-3);
        EXPECT_EQ(g.node(100), 7.0);
        for (std::size_t i = 1; i < g.size(); ++i)
            EXPECT_LT(g.node(i - 1), g.node(i));
    }
}

TEST(RadialGrid, DefaultCoversGaussianTail)
{
    for (int n = 0; n <= 3; ++n)
        for (int m = -3; m <= 3; ++m) {
            const double b = 0.5;
            const auto g = default_grid(b, n, m);
            EXPECT_GE(b * g.r_max() * g.r_max(), 40.0 - 1e-9);
        }
}

TEST(RadialProfile, SizeMismatchIsRejected)
{
    RadialGrid g(0.1, 1.0, 11);
    EXPECT_THROW(RadialProfile(g, std::vector<cplx>(10)), Error);
}

TEST(RadialProfile, ClosedFormSamplesMatchEvaluator)
{
    RadialGrid g(1e-3, 6.0, 201);
    GaussianSeries s(0.5, 1, {1.0, cplx(0.0, -2.0), 0.25});
    RadialProfile p(g, s);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double r = g.node(i);
        const cplx direct = (r + cplx(0, -2) * r * r + 0.25 * r * r * r) * std::exp(-0.25 * r * r);
        EXPECT_LE(std::abs(p[i] - direct), 1e-12 * std::max(1.0, std::abs(direct)));
    }
}

TEST(RadialProfile, MixingGridsThrows)
{
    RadialProfile a = RadialProfile::zero(RadialGrid(0.1, 1.0, 11));
    RadialProfile b = RadialProfile::zero(RadialGrid(0.1, 1.0, 21));
    EXPECT_THROW(a + b, Error);
}

TEST(FiniteDifferences, FourthOrderOnUniformAndLogGrids)
{
    for (auto spacing : {Spacing::uniform, Spacing::log_uniform}) {
        double previous = 0.0;
        for (std::size_t points : {201u, 401u, 801u}) {
            RadialGrid g(0.2, 4.0, points, spacing);
            auto p = RadialProfile::from_function(g, [](double r) { return cplx(std::sin(r), std::cos(2 * r)); });
            const auto d1 = fd::first_derivative(g, p.values());
            const auto d2 = fd::second_derivative(g, p.values());
            double err = 0.0;
            for (std::size_t i = interior_margin; i + interior_margin < g.size(); ++i) {
                const double r = g.node(i);
                err = std::max(err, std::abs(d1[i] - cplx(std::cos(r), -2 * std::sin(2 * r))));
                err = std::max(err, std::abs(d2[i] - cplx(-std::sin(r), -4 * std::cos(2 * r))));
            }
            if (previous > 0.0) {
                EXPECT_GT(std::log2(previous / err), 3.5);
            }
            previous = err;
        }
    }
}

TEST(Integrate, SimpsonMatchesGaussianMoment)
{
    for (std::size_t points : {4000u, 4001u}) {
        RadialGrid g(1e-9, 12.0, points);
        auto p = RadialProfile::from_function(g, [](double r) { return cplx(std::exp(-0.5 * r * r) * r); });
        EXPECT_NEAR(integrate(g, p.values()).real(), 1.0, 1e-10);
    }
}

TEST(GaussianSeries, WeightedNormMatchesQuadrature)
{
    GaussianSeries s(0.5, 0, {1.0, 0.0, cplx(-0.5, 0.3)});
    RadialGrid g(1e-9, 20.0, 4001);
    RadialProfile p(g, s);
    std::vector<cplx> w(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        w[i] = std::norm(p[i]) * g.node(i);
    EXPECT_NEAR(s.weighted_norm2(), integrate(g, w).real(), 1e-10);
}
