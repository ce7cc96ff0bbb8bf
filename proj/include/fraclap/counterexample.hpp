#pragma once

#include <boost/math/tools/toms748_solve.hpp>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "fraclap/errors.hpp"
#include "fraclap/jintegrals.hpp"
#include "fraclap/laplacian.hpp"
#include "fraclap/parallel.hpp"
#include "fraclap/specfun.hpp"

namespace fraclap {

// On the x_1 axis of E_a, axes (1,...,1,a), the operator applied to
// ((1-x_1)^2 - delta q) u_s is Gamma(1+s) k_{n,s} (A x_1^2 - 2 B x_1 + C).
struct ABCCoeffs {
    double A = 0, B = 0, C = 0;
    double s = 0, a = 0, delta = 0;
    int n = 2;
};

inline ABCCoeffs assemble_abc(const JTable& t, double delta)
{
    const double s = t.s, J0 = t.J0, J1 = t.J1[0], J2 = t.J2[0];
    ABCCoeffs r;
    r.s = s;
    r.a = t.axes.back();
    r.delta = delta;
    r.n = t.n;
    r.A = (1 - s * delta) * J0 + s * (5 - delta * (2 * s - 3)) * J1 + 2 * s * (s - 1) * (1 + delta) * J2;
    r.B = J0 + 2 * s * J1;
    r.C = (1 + delta * s) * J0 - s * (1 + delta) * J1;
    return r;
}

inline void check_sa(double s, double a)
{
    if (!(s > 1.0)) throw DomainError("need s > 1, got " + detail::fmt_double(s));
    if (!(a > 1.0)) throw DomainError("need a > 1, got " + detail::fmt_double(a));
}

inline double discriminant(const ABCCoeffs& c) { return c.B * c.B - c.A * c.C; }

// D(s, a) = B^2 - AC at delta = 0
inline double discriminant(double s, double a, int n = 2)
{
    check_sa(s, a);
    return discriminant(assemble_abc(jtable_closed(n, s, a), 0.0));
}

// delta making the x_2^2 coefficient vanish (n = 2), from moments.
inline double delta_2d(const JTable& t)
{
    if (t.n != 2) throw DomainError("delta_2d: need n = 2");
    const double s = t.s, J0 = t.J0, J1 = t.J1[0], J2 = t.J2[0];
    const double num = s * (J1 + 2 * (s - 1) * (J1 - J2));
    const double den = (s + 1) * J0 - s * J1 - 2 * s * (s - 1) * (J1 - J2) + 2 * s * (s + 1) * t.J1[1];
    if (!(den > 0.0)) throw DomainError("delta_2d: nonpositive denominator");
    return num / den;
}

inline double delta_2d(double s, double a)
{
    check_sa(s, a);
    return delta_2d(jtable_closed(2, s, a));
}

// Same quantity through hypergeometric functions of z = (a-1)/a.
inline double delta_2d_hypergeometric(double s, double a)
{
    check_sa(s, a);
    const double z = (a - 1) / a;
    const double f1 = hyp2f1(0.5, s + 1, 1.0, z);
    const double f2 = hyp2f1(0.5, s + 1, 2.0, z);
    const double f3 = hyp2f1(1.5, s + 1, 1.0, z);
    const double den = f1 + ((a - 1) * s + a - 2) * f3;
    if (!(den > 0.0)) throw DomainError("delta_2d: nonpositive denominator");
    return s * (a - 1) * (f1 - f2) / den;
}

// Coefficients of the remaining quadratic Q_delta in the transverse variables:
// [0] multiplies sum_{1<i<n} x_i^2 (absent for n = 2), [last] multiplies a x_n^2.
inline std::vector<double> q_delta_coeffs(const JTable& t, double delta)
{
    const int n = t.n;
    const double s = t.s, J0 = t.J0, J1 = t.J1[0], J2 = t.J2[0];
    const double nn = (n + 1) / 3.0;
    std::vector<double> r;
    if (n >= 3)
        r.push_back(s * J1 + 2.0 / 3.0 * s * (s - 1) * J2
                    - delta * ((s + 1) * J0 + s * (2 * s + 1) * J1 - 2.0 / 3.0 * s * (s - 1) * J2));
    r.push_back(s * (2 * s - 1) * J1 - 2 * s * (s - 1) * nn * J2
                - delta * ((2 * s + 1) * (s + 1) * J0 - s * (2 * (s + 1) * (n - 1) + 2 * s - 1) * J1
                           + 2 * s * (s - 1) * nn * J2));
    return r;
}

struct Roots {
    std::optional<double> p2_plus; // none when B^2 < AC
    double p1_plus = 0;
};

inline Roots roots(const ABCCoeffs& c, double J0)
{
    if (!(c.A > 0.0)) throw CertificationFailure("roots: leading coefficient A = " + detail::fmt_double(c.A) + " <= 0");
    Roots r;
    r.p1_plus = J0 / c.B;
    const double D = discriminant(c);
    if (D >= 0.0) r.p2_plus = (c.B + std::sqrt(D)) / c.A;
    return r;
}

// h = P_{1,+} - P_{2,+} for n = 2 with delta = delta_2d; equals P_{1,+} when P_2 has no real root.
inline double h_value(double s, double a)
{
    check_sa(s, a);
    const JTable t = jtable_closed(2, s, a);
    const auto abc = assemble_abc(t, delta_2d(t));
    const auto r = roots(abc, t.J0);
    return r.p2_plus ? r.p1_plus - *r.p2_plus : r.p1_plus;
}

enum class Criterion { D, h };

inline const char* to_string(Criterion c) { return c == Criterion::D ? "D" : "h"; }

inline double criterion_value(Criterion c, double s, double a)
{
    return c == Criterion::D ? discriminant(s, a) : h_value(s, a);
}

// Root of a -> criterion(s, a) (or s -> criterion(s, a) when `in_s`), bracketing
// solver to absolute tolerance `tol`.
inline double find_threshold(Criterion c, double fixed, double lo, double hi, bool in_s = false, double tol = 1e-9)
{
    if (!(lo < hi)) throw DomainError("find_threshold: need lo < hi");
    auto f = [&](double v) { return in_s ? criterion_value(c, v, fixed) : criterion_value(c, fixed, v); };
    const double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0) == (fhi > 0))
        throw DomainError("find_threshold: no sign change on [" + detail::fmt_double(lo) + ", " + detail::fmt_double(hi)
                          + "]");
    std::uintmax_t iters = 200;
    auto stop = [tol](double x, double y) { return std::abs(y - x) <= tol; };
    auto [x0, x1] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, stop, iters);
    return 0.5 * (x0 + x1);
}

inline double find_threshold(double s, double lo, double hi, double tol = 1e-9)
{
    return find_threshold(Criterion::h, s, lo, hi, false, tol);
}

struct ScanGrid {
    Criterion criterion = Criterion::D;
    std::vector<double> s_values;
    std::vector<double> a_values;
    std::vector<double> values; // row-major, rows indexed by s
    std::vector<int> signs;

    double value(std::size_t i, std::size_t j) const { return values[i * a_values.size() + j]; }
    int sign(std::size_t i, std::size_t j) const { return signs[i * a_values.size() + j]; }
};

// Cell-centred grid over (s_lo, s_hi) x (a_lo, a_hi).
inline ScanGrid scan(Criterion c, double s_lo, double s_hi, double a_lo, double a_hi, int ns, int na,
                     unsigned threads = 0)
{
    if (ns < 2 || na < 2) throw DomainError("scan: grid must be at least 2x2");
    if (!(s_lo < s_hi) || !(a_lo < a_hi)) throw DomainError("scan: empty range");
    ScanGrid g;
    g.criterion = c;
    for (int i = 0; i < ns; ++i) g.s_values.push_back(s_lo + (i + 0.5) * (s_hi - s_lo) / ns);
    for (int j = 0; j < na; ++j) g.a_values.push_back(a_lo + (j + 0.5) * (a_hi - a_lo) / na);
    for (double s : g.s_values) check_sa(s, 2.0);
    for (double a : g.a_values) check_sa(2.0, a);
    const std::size_t N = static_cast<std::size_t>(ns) * na;
    g.values.assign(N, 0.0);
    g.signs.assign(N, 0);
    parallel_for(
        N,
        [&](std::size_t k) {
            const double s = g.s_values[k / na], a = g.a_values[k % na];
            double v, scale;
            if (c == Criterion::D) {
                const auto abc = assemble_abc(jtable_closed(2, s, a), 0.0);
                v = discriminant(abc);
                scale = abc.B * abc.B;
            } else {
                v = h_value(s, a);
                scale = 1.0;
            }
            g.values[k] = v;
            g.signs[k] = std::abs(v) <= 1e-12 * scale ? 0 : (v > 0 ? 1 : -1);
        },
        threads);
    return g;
}

struct Certificate {
    int n = 2;
    double s = 0, a = 0;
    double gamma = 0, delta = 0, epsilon = 0;
    double quad_min = 0;         // min over [-1,1] of P_{2,delta} + gamma P_1, moment units
    std::vector<double> q_coeffs;
    double rhs_lower_bound = 0;  // lower bound of the operator applied to U_eps on E_a
    Point x_minus, x_plus;       // U_eps(x_minus) < 0 < U_eps(x_plus)
    double A = 0, B = 0, C = 0, J0 = 0;
    std::optional<double> p2_plus;
    double p1_plus = 0;
    std::string delta_rule;
};

// Admissible delta interval (times a) for n >= 3, s >= 2.
inline std::pair<double, double> delta_interval(double s)
{
    const double lo = -(1.0 / (s + 1)) * (3 * (s - 1) / (2 * s - 3) - 4 * s / (2 * s - 1));
    const double hi = s / ((s + 1) * (2 * s + 1));
    return {std::max(0.0, lo), hi};
}

inline Certificate build_certificate(int n, double s, double a)
{
    if (n < 2) throw DomainError("build_certificate: need n >= 2");
    check_sa(s, a);
    const JTable t = jtable_closed(n, s, a);
    Certificate c;
    c.n = n;
    c.s = s;
    c.a = a;
    c.J0 = t.J0;

    if (s < 2) {
        c.delta = 0.0;
        c.delta_rule = "zero";
    } else if (n == 2) {
        c.delta = delta_2d(t);
        c.delta_rule = "transverse coefficient vanishes";
    } else {
        auto [lo, hi] = delta_interval(s);
        if (!(lo < hi))
            throw CertificationFailure("empty delta interval (" + detail::fmt_double(lo / a) + ", "
                                       + detail::fmt_double(hi / a) + ")");
        c.delta = 0.5 * (lo + hi) / a;
        c.delta_rule = "midpoint of admissible interval";
    }

    const auto abc = assemble_abc(t, c.delta);
    c.A = abc.A;
    c.B = abc.B;
    c.C = abc.C;
    const auto r = roots(abc, t.J0);
    c.p1_plus = r.p1_plus;
    c.p2_plus = r.p2_plus;
    // tangent choice: P_2 + gamma P_1 has its vertex at P_{2,+}
    c.gamma = r.p2_plus ? 2.0 * std::sqrt(discriminant(abc)) / abc.B : 0.0;

    std::vector<std::string> failed;
    c.q_coeffs = q_delta_coeffs(t, c.delta);
    for (std::size_t i = 0; i < c.q_coeffs.size(); ++i)
        if (c.q_coeffs[i] < -1e-12 * t.J0 * a)
            failed.push_back("Q_delta coefficient " + std::to_string(i) + " = " + detail::fmt_double(c.q_coeffs[i])
                             + " < 0");

    // P(t) = A t^2 - (2B + gamma B) t + C + gamma J0 on [-1, 1]
    const double qa = abc.A, qb = -(2 * abc.B + c.gamma * abc.B), qc = abc.C + c.gamma * t.J0;
    auto P = [&](double x) { return (qa * x + qb) * x + qc; };
    double qmin = std::min(P(-1.0), P(1.0));
    const double vx = -qb / (2 * qa);
    if (vx > -1.0 && vx < 1.0) qmin = std::min(qmin, P(vx));
    c.quad_min = qmin;
    if (!(qmin > 0.0)) {
        std::string why = "quadratic minimum " + detail::fmt_double(qmin) + " <= 0";
        if (r.p2_plus) why += " (P2+ = " + detail::fmt_double(*r.p2_plus) + ", P1+ = " + detail::fmt_double(r.p1_plus) + ")";
        failed.push_back(why);
    }
    if (!failed.empty()) {
        std::string msg = "certification failed for n=" + std::to_string(n) + " s=" + detail::fmt_double(s)
                          + " a=" + detail::fmt_double(a) + ":";
        for (auto& f : failed) msg += " " + f + ";";
        throw CertificationFailure(msg);
    }

    c.epsilon = 0.5 * qmin / t.J0;
    const double g = gamma(1 + s) * k_ns(n, s);
    c.rhs_lower_bound = g * (qmin - c.epsilon * t.J0);

    // p = t^2 + gamma t on the x_1 axis at x_1 = 1 - t; p = eps/2 there
    const double tt = 0.5 * (-c.gamma + std::sqrt(c.gamma * c.gamma + 2 * c.epsilon));
    c.x_minus.assign(n, 0.0);
    c.x_minus[0] = 1.0 - tt;
    c.x_plus.assign(n, 0.0);
    return c;
}

struct CertificateCheck {
    bool ok = false;
    double min_rhs = 0;
    std::size_t points = 0;
    double u_minus = 0, u_plus = 0;
};

// Deterministic interior grid of E_a: `count` points of a scaled lattice (n = 2)
// or a Halton-type sequence (n >= 3), all with |x|_a < 1.
inline std::vector<Point> ellipsoid_grid(const EllipsoidSpec& E, std::size_t count)
{
    std::vector<Point> pts;
    if (E.n == 2) {
        const int rings = static_cast<int>(std::ceil(std::sqrt(count / 4.0)));
        const int per = static_cast<int>((count + rings - 1) / rings);
        for (int i = 0; i < rings && pts.size() < count; ++i) {
            const double r = (i + 0.5) / rings;
            for (int j = 0; j < per && pts.size() < count; ++j) {
                const double th = 2 * std::numbers::pi * (j + 0.5 * (i % 2)) / per;
                pts.push_back({r * std::cos(th) / std::sqrt(E.axes[0]), r * std::sin(th) / std::sqrt(E.axes[1])});
            }
        }
        return pts;
    }
    static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};
    auto halton = [](std::size_t i, int b) {
        double f = 1, r = 0;
        while (i > 0) {
            f /= b;
            r += f * (i % b);
            i /= b;
        }
        return r;
    };
    for (std::size_t k = 1; pts.size() < count; ++k) {
        Point x(E.n);
        for (int i = 0; i < E.n; ++i) x[i] = 2 * halton(k, primes[i % 10]) - 1;
        double q = 0;
        for (int i = 0; i < E.n; ++i) q += x[i] * x[i];
        if (q >= 1.0) continue;
        for (int i = 0; i < E.n; ++i) x[i] /= std::sqrt(E.axes[i]);
        pts.push_back(x);
    }
    return pts;
}

// Evaluates the closed form of the operator applied to U_eps on a grid and the witness signs.
inline CertificateCheck verify_certificate(const Certificate& c, std::size_t count = 1000)
{
    const EllipsoidSpec E = EllipsoidSpec::eccentric(c.n, c.a);
    FractionalLaplacian L(E, c.s, jtable_closed(E, c.s), 8);
    const Profile U = shifted(PGammaDelta{c.gamma, c.delta}, c.epsilon);
    const auto coef = *L.coefficients(U);
    CertificateCheck r;
    r.min_rhs = std::numeric_limits<double>::infinity();
    for (const auto& x : ellipsoid_grid(E, count)) {
        r.min_rhs = std::min(r.min_rhs, coef(x));
        ++r.points;
    }
    r.u_minus = L.eval(U, c.x_minus);
    r.u_plus = L.eval(U, c.x_plus);
    r.ok = r.min_rhs >= c.rhs_lower_bound * (1 - 1e-9) && r.u_minus < 0 && r.u_plus > 0 && E.inside(c.x_minus)
           && E.inside(c.x_plus);
    return r;
}

} // namespace fraclap
