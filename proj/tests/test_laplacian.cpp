#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fraclap/laplacian.hpp"

using namespace fraclap;

namespace {

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

// Uniform points with |x|_a <= rmax.
std::vector<Point> interior_points(const EllipsoidSpec& E, int count, double rmax, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> N;
    std::uniform_real_distribution<double> U;
    std::vector<Point> pts;
    while (static_cast<int>(pts.size()) < count) {
        Point x(E.n);
        double nn = 0;
        for (auto& v : x) {
            v = N(rng);
            nn += v * v;
        }
        const double r = rmax * std::pow(U(rng), 1.0 / E.n) / std::sqrt(nn);
        for (int i = 0; i < E.n; ++i) x[i] *= r / std::sqrt(E.axes[i]);
        pts.push_back(x);
    }
    return pts;
}

// Known radial formula on the unit ball:
// (-Delta)^s (1-|x|^2)_+^p = 4^s G(1+p) G(n/2+s) / (G(1+p-s) G(n/2)) 2F1(n/2+s, s-p; n/2; |x|^2)
double ball_value(int n, double s, double p, double r2)
{
    double pre = std::pow(4.0, s) * fraclap::gamma(1 + p) * fraclap::gamma(0.5 * n + s) * gamma_reciprocal(1 + p - s)
                 / fraclap::gamma(0.5 * n);
    return pre * hyp2f1(0.5 * n + s, s - p, 0.5 * n, r2);
}

} // namespace

TEST(Laplacian, TorsionOnBall)
{
    for (int n : {2, 3})
        for (double s : {0.4, 1.0, 1.7, 2.6}) {
            FractionalLaplacian L(EllipsoidSpec::ball(n), s);
            double want = std::pow(4.0, s) * fraclap::gamma(1 + s) * fraclap::gamma(0.5 * n + s) / fraclap::gamma(0.5 * n);
            EXPECT_LT(rel(L.torsion_constant(), want), 1e-12) << n << " " << s;
        }
}

TEST(Laplacian, TorsionIsConstant)
{
    FractionalLaplacian L(EllipsoidSpec({1.0, 7.0}), 1.35);
    const double kappa = L.torsion_constant();
    for (auto& x : interior_points(L.ellipsoid(), 9, 0.95, 1))
        EXPECT_LT(rel(L.lap_u_beta(x, 1.35), kappa), 1e-10);
}

TEST(Laplacian, NullSpace)
{
    FractionalLaplacian L(EllipsoidSpec({1.0, 3.0}), 1.6);
    for (auto& x : interior_points(L.ellipsoid(), 5, 0.9, 2)) {
        EXPECT_EQ(L.lap_u_beta(x, 0.6), 0.0);
        EXPECT_EQ(L.lap_u_s_plus_j(x, -1), 0.0);
    }
}

TEST(Laplacian, BallAgainstRadialFormula)
{
    for (int n : {2, 3})
        for (double s : {0.5, 1.3, 2.2})
            for (double p : {s + 0.4, s + 1.0, s + 2.0, s + 2.7}) {
                FractionalLaplacian L(EllipsoidSpec::ball(n), s, n == 2 ? 128 : 48);
                for (auto& x : interior_points(L.ellipsoid(), 4, 0.9, 3)) {
                    double r2 = L.ellipsoid().norm_sq(x);
                    double want = ball_value(n, s, p, r2);
                    EXPECT_NEAR(L.lap_u_beta(x, p), want, 1e-9 * std::abs(ball_value(n, s, p, 0)))
                        << n << " " << s << " " << p;
                }
            }
}

TEST(Laplacian, TableRowsMatchSurfaceFormula)
{
    for (auto axes : {std::vector<double>{1.0, 9.0}, std::vector<double>{2.0, 5.0, 11.0}})
        for (double s : {1.2, 2.5}) {
            FractionalLaplacian L(EllipsoidSpec(axes), s);
            for (int j : {1, 2}) {
                auto T = L.table_row(j);
                for (auto& x : interior_points(L.ellipsoid(), 6, 0.95, 4)) {
                    double want = L.lap_u_beta(x, s + j);
                    EXPECT_NEAR(T(x), want, 1e-9 * L.torsion_constant() * (1 + j)) << s << " " << j;
                }
            }
        }
}

TEST(Laplacian, TableRowTwoMatchesFiniteSum)
{
    FractionalLaplacian L(EllipsoidSpec::eccentric(2, 9.0), 1.7);
    auto T2 = L.table_row(2);
    for (auto& x : interior_points(L.ellipsoid(), 20, 0.99, 5))
        EXPECT_NEAR(T2(x), L.lap_u_s_plus_j_sum(x, 2), 1e-8 * L.torsion_constant());
}

TEST(Laplacian, FiniteSumLowOrders)
{
    FractionalLaplacian L(EllipsoidSpec({1.0, 2.0, 6.0}), 2.3);
    auto T1 = L.table_row(1);
    for (auto& x : interior_points(L.ellipsoid(), 6, 0.9, 6)) {
        EXPECT_LT(rel(L.lap_u_s_plus_j_sum(x, 0), L.torsion_constant()), 1e-12);
        EXPECT_NEAR(L.lap_u_s_plus_j_sum(x, 1), T1(x), 1e-11 * L.torsion_constant());
    }
}

TEST(Laplacian, FiniteSumHigherOrders)
{
    FractionalLaplacian L(EllipsoidSpec({1.0, 4.0}), 1.4);
    for (int j : {3, 4})
        for (auto& x : interior_points(L.ellipsoid(), 5, 0.9, 7))
            EXPECT_LT(rel(L.lap_u_s_plus_j(x, j), L.lap_u_beta(x, 1.4 + j)), 1e-9);
}

TEST(Laplacian, SumConstantIdentity)
{
    for (int n : {2, 3, 5})
        for (double s : {0.3, 1.5, 3.2})
            for (int j : {0, 1, 4}) {
                double alt = fraclap::gamma(1 + s + j) / fraclap::gamma(1.0 + j) * k_ns(n, s) * std::sqrt(std::numbers::pi)
                             / fraclap::gamma(s + 0.5);
                EXPECT_LT(rel(c_nsj(n, s, j), alt), 1e-13);
            }
}

TEST(Laplacian, TwoDimensionalTable)
{
    const double s = 2.5, a = 30.0;
    FractionalLaplacian L(EllipsoidSpec::eccentric(2, a), s);
    auto& t = L.table();
    const double J0 = t.J0, J1 = t.J1[0], J2 = t.J2[0], g = L.scale();
    const double tol = 1e-12 * g * J0;

    auto p1 = L.poly1(0);
    EXPECT_NEAR(p1.constant, g * J0, tol);
    EXPECT_NEAR(p1.linear[0], -g * (J0 + 2 * s * J1), tol);

    auto p2 = L.poly2(0);
    EXPECT_NEAR(p2.quadratic[0], g * (J0 + 5 * s * J1 + 2 * s * (s - 1) * J2), tol);
    EXPECT_NEAR(p2.linear[0], -2 * g * (J0 + 2 * s * J1), tol);
    EXPECT_NEAR(p2.constant, g * (J0 - s * J1), tol);
    EXPECT_NEAR(p2.quadratic[1], g * s * (J1 + 2 * (s - 1) * (J1 - J2)) * a, tol * a);

    auto q = L.q(0);
    EXPECT_NEAR(q.quadratic[0], g * s * (J0 - J1 + 2 * (s - 1) * (J1 - J2)), tol);
    EXPECT_NEAR(q.constant, -g * s * (J0 - J1), tol);
    EXPECT_NEAR(q.quadratic[1], g * ((2 * s + 1) * (s + 1) * J0 - s * (4 * s + 1) * J1 + 2 * s * (s - 1) * J2) * a,
                tol * a);
}

TEST(Laplacian, RecurrenceReproducesSquareProfile)
{
    for (int n : {2, 3}) {
        const double s = 1.8;
        FractionalLaplacian L(EllipsoidSpec::eccentric(n, 12.0), s);
        for (int k = 0; k < n; ++k) {
            const double ak = L.ellipsoid().axes[k];
            for (auto& x : interior_points(L.ellipsoid(), 50, 0.95, 8 + k)) {
                double via = L.torsion_constant() - 2 * std::sqrt(ak) * L.lap_recurrence_first(x, s, k)
                             + ak * L.lap_recurrence_second(x, s, k, k);
                EXPECT_NEAR(via, L.lap_poly2(x, k), 1e-7 * L.torsion_constant());
            }
        }
    }
}

TEST(Laplacian, RecurrenceReproducesQProfile)
{
    const double s = 2.4;
    FractionalLaplacian L(EllipsoidSpec({1.0, 3.0, 8.0}), s);
    for (auto& x : interior_points(L.ellipsoid(), 20, 0.9, 12)) {
        double via = 0;
        for (int i = 1; i < 3; ++i) via += L.ellipsoid().axes[i] * L.lap_recurrence_second(x, s, i, i);
        EXPECT_NEAR(via, L.lap_q(x, 0), 1e-7 * L.torsion_constant());
    }
}

TEST(Laplacian, FiniteDifferenceDerivatives)
{
    const double s = 1.3;
    FractionalLaplacian L(EllipsoidSpec({1.0, 5.0}), s);
    for (auto& x : interior_points(L.ellipsoid(), 5, 0.8, 13))
        for (int i = 0; i < 2; ++i) {
            double scale = L.torsion_constant() * 5;
            EXPECT_NEAR(L.grad_lap_u_beta(x, s + 1, i, false), L.grad_lap_u_beta(x, s + 1, i), 1e-8 * scale);
            for (int j = 0; j < 2; ++j)
                EXPECT_NEAR(L.hess_lap_u_beta(x, s + 2, i, j, false), L.hess_lap_u_beta(x, s + 2, i, j), 1e-6 * scale * 5);
        }
}

TEST(Laplacian, EccentricDisplaysMatchGeneralCoefficients)
{
    for (int n : {2, 3, 4}) {
        const double s = 2.3, a = 20.0;
        FractionalLaplacian L(EllipsoidSpec::eccentric(n, a), s);
        auto d = eccentric_displays(L.table());
        const double g = L.scale();
        auto same = [&](const QuadraticCoefficients& want, const QuadraticCoefficients& got) {
            const double tol = 1e-11 * L.table().J0 * a;
            EXPECT_NEAR(got.constant * g, want.constant, tol * g);
            for (int i = 0; i < n; ++i) {
                EXPECT_NEAR(got.linear[i] * g, want.linear[i], tol * g) << n << " " << i;
                EXPECT_NEAR(got.quadratic[i] * g, want.quadratic[i], tol * g) << n << " " << i;
            }
        };
        same(L.poly1(0), d.p1_first);
        same(L.poly2(0), d.p2_first);
        same(L.q(0), d.q_first);
        same(L.poly1(n - 1), d.p1_last);
        same(L.poly2(n - 1), d.p2_last);
    }
}

TEST(Laplacian, TorsionScaling)
{
    const double s = 1.9, lam = 3.7;
    std::vector<double> b{1.0, 4.0, 6.5};
    std::vector<double> lb{lam, 4.0 * lam, 6.5 * lam};
    FractionalLaplacian L1(EllipsoidSpec(b), s), L2(EllipsoidSpec(lb), s);
    EXPECT_LT(rel(L2.torsion_constant(), std::pow(lam, s) * L1.torsion_constant()), 1e-10);
    Point x{0.2, 0.1, -0.15};
    Point y(3);
    for (int i = 0; i < 3; ++i) y[i] = x[i] / std::sqrt(lam);
    EXPECT_LT(rel(L2.torsion_value(y), std::pow(lam, -s) * L1.torsion_value(x)), 1e-10);
}

TEST(Laplacian, ProfileCombinations)
{
    const double s = 2.2, gam = 0.3, del = 0.05, eps = 0.01;
    FractionalLaplacian L(EllipsoidSpec::eccentric(3, 15.0), s);
    Profile p = PGammaDelta{gam, del};
    Profile ps = shifted(p, eps);
    auto c = *L.coefficients(p);
    auto cs = *L.coefficients(ps);
    for (auto& x : interior_points(L.ellipsoid(), 10, 0.9, 14)) {
        double want = L.lap_poly2(x, 0) + gam * L.lap_poly1(x, 0) - del * L.lap_q(x, 0);
        EXPECT_NEAR(c(x), want, 1e-12 * L.torsion_constant());
        EXPECT_NEAR(cs(x), want - eps * L.torsion_constant(), 1e-12 * L.torsion_constant());
        EXPECT_NEAR(L.apply(ps, x), cs(x), 1e-12 * L.torsion_constant());
        double t = 1 - std::sqrt(15.0) * 0 - x[0];
        double qx = x[1] * x[1] + 15.0 * x[2] * x[2];
        EXPECT_NEAR(L.eval(ps, x), (t * t + gam * t - del * qx - eps) * L.u_beta(x, s), 1e-14);
    }
    EXPECT_EQ(describe(ps), "shifted(p:0.29999999999999999,0.050000000000000003,0.01)");
}

TEST(Laplacian, ProfileValuesVanishOutside)
{
    FractionalLaplacian L(EllipsoidSpec({1.0, 2.0}), 1.5);
    Point out{0.9, 0.5};
    for (Profile p : {Profile(UBeta{2.0}), Profile(XiUs{1}), Profile(XiSqUs{0}), Profile(QUs{0}), Profile(PGammaDelta{1, 1})})
        EXPECT_EQ(L.eval(p, out), 0.0);
}

TEST(Laplacian, DomainErrors)
{
    FractionalLaplacian L(EllipsoidSpec({1.0, 2.0}), 1.5);
    Point out{0.9, 0.5};
    EXPECT_THROW(L.lap_u_beta(out, 2.0), DomainError);
    EXPECT_THROW(L.lap_poly2(out, 0), DomainError);
    EXPECT_THROW(L.poly1(2), DomainError);
    EXPECT_THROW(L.lap_u_beta(Point{0.1, 0.1}, -1.5), DomainError);
    EXPECT_THROW(L.eval(XiUs{5}, Point{0.1, 0.1}), DomainError);
    EXPECT_THROW(FractionalLaplacian(EllipsoidSpec({1.0, 2.0}), -0.5), DomainError);
    EXPECT_FALSE(L.coefficients(UBeta{3.5 + 0.25}).has_value());
    EXPECT_TRUE(L.coefficients(UBeta{2.5}).has_value());
}
