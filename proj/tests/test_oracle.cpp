#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fraclap/oracle.hpp"

using namespace fraclap;

namespace {

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

auto profile_fn(const FractionalLaplacian& L, Profile p)
{
    return [&L, p](std::span<const double> y) { return L.eval(p, y); };
}

// (-Delta)^s (1-|x|^2)_+^p on the unit ball, radial closed form
double ball_value(int n, double s, double p, double r2)
{
    double pre = std::pow(4.0, s) * fraclap::gamma(1 + p) * fraclap::gamma(0.5 * n + s) * gamma_reciprocal(1 + p - s)
                 / fraclap::gamma(0.5 * n);
    return pre * hyp2f1(0.5 * n + s, s - p, 0.5 * n, r2);
}

} // namespace

TEST(Oracle, BallTorsionAtCentre)
{
    const std::pair<int, double> cases[] = {{2, 0.5}, {2, 1.5}, {3, 1.5}, {2, 2.5}, {2, 1.0}, {2, 2.0}};
    for (auto [n, s] : cases) {
        FractionalLaplacian L(EllipsoidSpec::ball(n), s);
        Point x(n, 0.0);
        double o = hypersingular(profile_fn(L, UBeta{s}), x, EllipsoidSupport{L.ellipsoid()}, s);
        double want = std::pow(4.0, s) * fraclap::gamma(1 + s) * fraclap::gamma(0.5 * n + s) / fraclap::gamma(0.5 * n);
        EXPECT_LT(rel(o, want), 1e-4) << n << " " << s;
    }
}

TEST(Oracle, OneDimensionalConstants)
{
    // (-Delta)^{1/2} (1-x^2)^{1/2}_+ = 1 and -(d/dx)^2 (1-x^2) = 2 on (-1, 1)
    EllipsoidSpec I({1.0});
    Point x{0.3};
    auto half = [](std::span<const double> y) { return y[0] * y[0] < 1 ? std::sqrt(1 - y[0] * y[0]) : 0.0; };
    auto quad = [](std::span<const double> y) { return y[0] * y[0] < 1 ? 1 - y[0] * y[0] : 0.0; };
    EXPECT_LT(rel(hypersingular(half, x, EllipsoidSupport{I}, 0.5), 1.0), 1e-7);
    EXPECT_LT(rel(hypersingular(quad, x, EllipsoidSupport{I}, 1.0), 2.0), 1e-7);
    OracleConfig c3;
    c3.m = 3;
    EXPECT_LT(rel(hypersingular(quad, x, EllipsoidSupport{I}, 1.0, c3), 2.0), 1e-7);
}

TEST(Oracle, BallOffCentre)
{
    for (double s : {0.7, 1.5, 2.5})
        for (double p : {s, s + 0.5, s + 1.3}) {
            FractionalLaplacian L(EllipsoidSpec::ball(2), s);
            Point x{0.4, -0.3};
            double o = hypersingular(profile_fn(L, UBeta{p}), x, EllipsoidSupport{L.ellipsoid()}, s);
            EXPECT_LT(rel(o, ball_value(2, s, p, 0.25)), 1e-4) << s << " " << p;
        }
}

TEST(Oracle, NullSpace)
{
    const double s = 1.5;
    FractionalLaplacian L(EllipsoidSpec({1.0, 4.0}), s);
    Point x{0.2, 0.1};
    double o = hypersingular(profile_fn(L, UBeta{s - 1}), x, EllipsoidSupport{L.ellipsoid()}, s);
    EXPECT_LT(std::abs(o), 1e-4 * L.torsion_constant());
}

TEST(Oracle, TorsionOnEllipse)
{
    const double s = 1.5;
    FractionalLaplacian L(EllipsoidSpec({1.0, 4.0}), s);
    for (Point x : {Point{0.0, 0.0}, Point{0.3, 0.2}, Point{-0.5, 0.1}}) {
        double o = hypersingular(profile_fn(L, UBeta{s}), x, EllipsoidSupport{L.ellipsoid()}, s);
        EXPECT_LT(rel(o, L.torsion_constant()), 1e-3);
    }
}

TEST(Oracle, OrderIndependence)
{
    const double s = 1.5;
    FractionalLaplacian L(EllipsoidSpec({1.0, 6.0}), s);
    Point x{0.25, -0.1};
    auto f = profile_fn(L, XiSqUs{0});
    OracleConfig c2, c3;
    c2.m = 2;
    c3.m = 3;
    double o2 = hypersingular(f, x, EllipsoidSupport{L.ellipsoid()}, s, c2);
    double o3 = hypersingular(f, x, EllipsoidSupport{L.ellipsoid()}, s, c3);
    EXPECT_LT(rel(o2, o3), 1e-4);
}

TEST(Oracle, LinearityWithFixedNodes)
{
    // with m = 3 the small-r differences lose about 7 digits, so roundoff alone
    // reaches 1e-9 there
    for (auto [s, tol] : {std::pair{1.7, 1e-9}, std::pair{2.3, 1e-8}}) {
        FractionalLaplacian L(EllipsoidSpec({1.0, 5.0}), s);
        Point x{0.1, 0.2};
        OracleConfig cfg;
        cfg.adaptive = false;
        cfg.angular_resolution = 64;
        auto u = profile_fn(L, XiUs{0});
        auto v = profile_fn(L, QUs{0});
        const double al = 1.7, be = -0.6;
        auto w = [&](std::span<const double> y) { return al * u(y) + be * v(y); };
        const EllipsoidSupport sup{L.ellipsoid()};
        double ou = hypersingular(u, x, sup, s, cfg), ov = hypersingular(v, x, sup, s, cfg);
        double ow = hypersingular(w, x, sup, s, cfg);
        EXPECT_LT(rel(ow, al * ou + be * ov), tol) << s;
    }
}

TEST(Oracle, DifferenceIsEven)
{
    FractionalLaplacian L(EllipsoidSpec({1.0, 3.0}), 1.5);
    auto u = profile_fn(L, XiSqUs{1});
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-0.4, 0.4);
    for (int i = 0; i < 50; ++i) {
        Point x{U(rng), U(rng) / 2}, y{U(rng), U(rng)}, my{-y[0], -y[1]};
        for (int m : {2, 3}) EXPECT_EQ(delta_m(u, x, y, m), delta_m(u, x, my, m));
    }
}

TEST(Oracle, ToleranceRefinementWithinEstimate)
{
    const double s = 1.5;
    FractionalLaplacian L(EllipsoidSpec::eccentric(2, 25.0), s);
    Point x{0.2, 0.05};
    auto f = profile_fn(L, XiSqUs{0});
    OracleConfig c1, c2;
    c1.radial_tol = 1e-6;
    c2.radial_tol = 0.5e-6;
    auto r1 = hypersingular_detailed(f, x, EllipsoidSupport{L.ellipsoid()}, s, c1);
    auto r2 = hypersingular_detailed(f, x, EllipsoidSupport{L.ellipsoid()}, s, c2);
    EXPECT_LE(std::abs(r1.value - r2.value), r1.error_estimate);
    EXPECT_GT(r1.error_estimate, 0.0);
}

TEST(Oracle, LevelSetSupportMatchesEllipsoid)
{
    const double s = 2.5;
    FractionalLaplacian L(EllipsoidSpec({1.0, 4.0}), s);
    Point x{0.3, -0.1};
    auto f = profile_fn(L, XiUs{1});
    LevelSetSupport ls{[&](std::span<const double> y) { return L.ellipsoid().norm_sq(y) - 1.0; }, 1.0, 200};
    OracleConfig cfg;
    cfg.angular_resolution = 64;
    double a = hypersingular(f, x, EllipsoidSupport{L.ellipsoid()}, s, cfg);
    double b = hypersingular(f, x, ls, s, cfg);
    EXPECT_LT(rel(b, a), 1e-9);
}

TEST(Oracle, ThreadCountDoesNotChangeResult)
{
    const double s = 1.5;
    FractionalLaplacian L(EllipsoidSpec({1.0, 4.0}), s);
    Point x{0.3, -0.1};
    auto f = profile_fn(L, QUs{0});
    OracleConfig c1, c4;
    c1.threads = 1;
    c4.threads = 4;
    EXPECT_EQ(hypersingular(f, x, EllipsoidSupport{L.ellipsoid()}, s, c1),
              hypersingular(f, x, EllipsoidSupport{L.ellipsoid()}, s, c4));
}

TEST(Oracle, VerifyProfileExamples)
{
    {
        FractionalLaplacian L(EllipsoidSpec({1.0, 3.0}), 1.5);
        auto rep = verify_profile(L, UBeta{1.5}, {{0.1, 0.1}, {-0.4, 0.2}, {0.0, -0.35}});
        EXPECT_LT(rep.max_rel_err, 1e-3);
        EXPECT_EQ(rep.per_point.size(), 3u);
    }
    {
        FractionalLaplacian L(EllipsoidSpec::eccentric(2, 25.0), 1.5);
        auto rep = verify_profile(L, XiSqUs{0}, {{0.1, 0.05}, {-0.5, 0.02}, {0.3, -0.1}});
        EXPECT_LT(rep.max_rel_err, 1e-3);
    }
    {
        FractionalLaplacian L(EllipsoidSpec::eccentric(3, 10.0), 2.5);
        auto rep = verify_profile(L, QUs{0}, {{0.1, 0.2, 0.05}});
        EXPECT_LT(rep.max_rel_err, 5e-3);
    }
}

TEST(Oracle, VerifyIsDeterministic)
{
    FractionalLaplacian L(EllipsoidSpec({1.0, 3.0}), 2.2);
    auto a = verify_profile(L, XiUs{0}, {{0.1, 0.1}});
    auto b = verify_profile(L, XiUs{0}, {{0.1, 0.1}});
    EXPECT_EQ(a.per_point[0].oracle, b.per_point[0].oracle);
}

TEST(Oracle, Preconditions)
{
    FractionalLaplacian L(EllipsoidSpec({1.0, 4.0}), 1.5);
    auto f = profile_fn(L, UBeta{1.5});
    EXPECT_THROW(hypersingular(f, Point{0.0, 0.4}, EllipsoidSupport{L.ellipsoid()}, 1.5), DomainError);
    OracleConfig bad;
    bad.m = 1;
    EXPECT_THROW(hypersingular(f, Point{0.0, 0.1}, EllipsoidSupport{L.ellipsoid()}, 1.5, bad), DomainError);
    bad.m = 1;
    EXPECT_THROW(hypersingular(f, Point{0.0, 0.1}, EllipsoidSupport{L.ellipsoid()}, 1.0, bad), DomainError);
}

TEST(Oracle, MissingBreakpointIsReported)
{
    // a jump the support does not announce defeats the radial quadrature
    auto u = [](std::span<const double> y) {
        double r2 = y[0] * y[0] + y[1] * y[1];
        return r2 < 1 ? (r2 < 0.3 ? 1.0 : 0.5) : 0.0;
    };
    OracleConfig cfg;
    cfg.radial_tol = 1e-12;
    cfg.angular_resolution = 16;
    EXPECT_THROW(hypersingular(u, Point{0.05, 0.0}, EllipsoidSupport{EllipsoidSpec::ball(2)}, 0.5, cfg), NonConvergence);
}
