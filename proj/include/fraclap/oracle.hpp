#pragma once

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "fraclap/errors.hpp"
#include "fraclap/geometry.hpp"
#include "fraclap/laplacian.hpp"
#include "fraclap/parallel.hpp"
#include "fraclap/quadrature.hpp"
#include "fraclap/specfun.hpp"

namespace fraclap {

// Support of the profile, used to split radial integrals where the integrand
// is not smooth.
struct EllipsoidSupport {
    EllipsoidSpec E;
};

// { y : level(y) < 0 }, contained in the ball of radius `radius` about the origin.
// Crossings along a ray are located by sampling and bisection.
struct LevelSetSupport {
    std::function<double(std::span<const double>)> level;
    double radius = 1.0;
    int samples = 400;
};

using Support = std::variant<EllipsoidSupport, LevelSetSupport>;

struct OracleConfig {
    int m = 0;                  // difference order, 0 = floor(s)+1 (s+1 for integer s)
    double radial_tol = 1e-8;   // relative tolerance of each radial panel
    int angular_resolution = 0; // Gauss nodes per polar angle, 0 = 256 for n=2, 64 otherwise
    bool adaptive = true;       // false: fixed tanh-sinh nodes, linear in u
    double interior_margin = 0.7; // ellipsoid supports: require |x|_a <= margin
    unsigned threads = 0;
};

inline int default_order(double s)
{
    return is_integer(s) ? static_cast<int>(s) + 1 : static_cast<int>(std::floor(s)) + 1;
}

struct OracleResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int m = 0;
    std::size_t directions = 0;
};

namespace detail {

// Ray parameters t with x + t w on the boundary of the support.
inline std::vector<double> ray_crossings(const Support& sup, std::span<const double> x, std::span<const double> w)
{
    std::vector<double> ts;
    if (auto* e = std::get_if<EllipsoidSupport>(&sup)) {
        const double A = e->E.norm_sq(w), B = e->E.dot(x, w), C = e->E.norm_sq(x) - 1.0;
        const double disc = B * B - A * C;
        if (disc <= 0.0) return ts;
        const double sq = std::sqrt(disc);
        // stable roots
        const double q = -(B + std::copysign(sq, B));
        if (q != 0.0) {
            ts.push_back(q / A);
            ts.push_back(C / q);
        } else {
            ts.push_back(sq / A);
            ts.push_back(-sq / A);
        }
        return ts;
    }
    const auto& ls = std::get<LevelSetSupport>(sup);
    const int n = static_cast<int>(x.size());
    double xn = 0.0;
    for (double v : x) xn += v * v;
    const double T = std::sqrt(xn) + ls.radius;
    Point y(n);
    auto f = [&](double t) {
        for (int i = 0; i < n; ++i) y[i] = x[i] + t * w[i];
        return ls.level(y);
    };
    const int N = std::max(16, ls.samples);
    double t0 = -T, f0 = f(t0);
    for (int k = 1; k <= N; ++k) {
        double t1 = -T + 2.0 * T * k / N, f1 = f(t1);
        if ((f0 < 0.0) != (f1 < 0.0)) {
            double lo = t0, hi = t1, flo = f0;
            for (int it = 0; it < 200 && hi - lo > 1e-15 * T; ++it) {
                const double mid = 0.5 * (lo + hi), fm = f(mid);
                if ((fm < 0.0) == (flo < 0.0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            ts.push_back(0.5 * (lo + hi));
        }
        t0 = t1;
        f0 = f1;
    }
    return ts;
}

} // namespace detail

// delta_m u(x, y) = sum_{|k|<=m} (-1)^k binom(2m, m-k) u(x + k y)
template <class U>
double delta_m(U&& u, std::span<const double> x, std::span<const double> y, int m)
{
    const std::size_t n = x.size();
    Point z(n);
    double acc = 0.0;
    // symmetric pairs first so that y -> -y gives the same rounding
    for (int k = m; k >= 1; --k) {
        double pair = 0.0;
        for (int sg : {1, -1}) {
            for (std::size_t i = 0; i < n; ++i) z[i] = x[i] + sg * k * y[i];
            pair += u(std::span<const double>(z));
        }
        acc += ((k % 2) ? -1.0 : 1.0) * binomial(2 * m, m - k) * pair;
    }
    return acc + binomial(2 * m, m) * u(x);
}

// (c_{n,m,s}/2) int_{R^n} delta_m u(x,y) / |y|^{n+2s} dy, with
// delta_m u(x,y) = sum_{|k|<=m} (-1)^k binom(2m, m-k) u(x+ky).
//
// Polar coordinates on the unit sphere. In each direction the radial integral is
// split at the points where some x + k r w crosses the support boundary; past the
// last crossing only the k = 0 term survives and the tail is integrated exactly.
// Near r = 0, delta_m / r^{2m} is fitted by d0 + d1 r^2 and integrated exactly.
template <class U>
OracleResult hypersingular_detailed(U&& u, std::span<const double> x, const Support& sup, double s,
                                    const OracleConfig& cfg = {})
{
    const int n = static_cast<int>(x.size());
    if (n < 1) throw DomainError("hypersingular: empty point");
    if (!(s > 0.0)) throw DomainError("hypersingular: need s > 0");
    const int m = cfg.m > 0 ? cfg.m : default_order(s);
    if (!(s < m) || (is_integer(s) && s > m - 1)) throw DomainError("hypersingular: m too small for s");
    if (auto* e = std::get_if<EllipsoidSupport>(&sup)) {
        if (e->E.n != n) throw DomainError("hypersingular: dimension mismatch");
        if (std::sqrt(e->E.norm_sq(x)) > cfg.interior_margin)
            throw DomainError("hypersingular: point too close to the boundary (|x|_a > "
                              + detail::fmt_double(cfg.interior_margin) + ")");
    }

    std::vector<double> coef(2 * m + 1);
    for (int k = -m; k <= m; ++k) coef[k + m] = ((k % 2) ? -1.0 : 1.0) * binomial(2 * m, m - k);
    const double c0 = coef[m];
    const double ux = u(x);

    const int res = cfg.angular_resolution > 0 ? cfg.angular_resolution : (n == 2 ? 256 : 64);
    const auto sph = detail::sphere_rule(std::vector<double>(n, 1.0), res);
    const std::size_t D = sph.weights.size();
    std::vector<double> vals(D, 0.0), errs(D, 0.0);

    auto radial = [&](std::size_t d, Point& y) {
        std::span<const double> w(sph.points.data() + d * n, n);
        auto delta = [&](double r) {
            double acc = 0.0;
            for (int k = m; k >= 1; --k) {
                double pair = 0.0;
                for (int sg : {1, -1}) {
                    for (int i = 0; i < n; ++i) y[i] = x[i] + sg * k * r * w[i];
                    pair += u(std::span<const double>(y));
                }
                acc += coef[m + k] * pair;
            }
            return acc + c0 * ux;
        };

        std::vector<double> br;
        for (double t : detail::ray_crossings(sup, x, w)) {
            const double at = std::abs(t);
            if (at == 0.0) continue;
            for (int k = 1; k <= m; ++k) br.push_back(at / k);
        }
        std::sort(br.begin(), br.end());
        br.erase(std::unique(br.begin(), br.end(), [](double a, double b) { return b - a <= 1e-14 * b; }), br.end());
        if (br.empty()) {
            // u is smooth along the whole line; only happens for unsupported u = 0 lines
            return std::pair<double, double>{0.0, 0.0};
        }

        const double ex = -1.0 - 2.0 * s;
        // small enough for the quadratic fit, large enough that delta_m / r^{2m} keeps
        // about 7 digits at r0 / 2
        const double r0 = br.front() * std::max(1.0 / 16.0, 2.0 * std::pow(10.0, -3.5 / m));
        const double p0 = delta(r0) / std::pow(r0, 2 * m), p1 = delta(0.5 * r0) / std::pow(0.5 * r0, 2 * m);
        const double d1 = (p0 - p1) / (0.75 * r0 * r0), d0 = p0 - d1 * r0 * r0;
        double total = d0 * std::pow(r0, 2 * m - 2 * s) / (2 * m - 2 * s)
                       + d1 * std::pow(r0, 2 * m + 2 - 2 * s) / (2 * m + 2 - 2 * s);
        double err = std::abs(d1 * std::pow(r0, 2 * m + 2 - 2 * s) / (2 * m + 2 - 2 * s)) * std::pow(r0 / br.front(), 2);

        auto f = [&](double r) { return delta(r) * std::pow(r, ex); };
        std::vector<double> pts{r0};
        pts.insert(pts.end(), br.begin(), br.end());
        thread_local boost::math::quadrature::tanh_sinh<double> ts(15);
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            const double a = pts[i], b = pts[i + 1];
            if (b - a < 1e-8 * b) {
                total += (b - a) * f(0.5 * (a + b));
                continue;
            }
            if (!cfg.adaptive) {
                total += tanh_sinh_fixed([&](double r, double) { return f(r); }, a, b);
                continue;
            }
            double e = 0.0, L1 = 0.0;
            double v;
            try {
                // integrate over [0, 1]: boost's interval mapping misplaces nodes next to a
                // general left endpoint
                const double h = b - a;
                v = h * ts.integrate([&](double t) { return f(a + h * t); }, 0.0, 1.0, cfg.radial_tol, &e, &L1);
                e *= h;
                L1 *= h;
            } catch (const std::exception& ex_) {
                throw NonConvergence(std::string("hypersingular: radial quadrature failed: ") + ex_.what());
            }
            // absolute floor for panels whose integrand is pure roundoff
            const double floor_ = 1e-12 * std::max(std::abs(ux), 1.0) * std::pow(a, -2.0 * s);
            if (!std::isfinite(v) || e > std::max(100.0 * cfg.radial_tol * L1, floor_))
                throw NonConvergence("hypersingular: radial panel [" + detail::fmt_double(a) + ", "
                                     + detail::fmt_double(b) + "] did not converge (error "
                                     + detail::fmt_double(e) + ")");
            total += v;
            err += e;
        }
        total += c0 * ux * std::pow(br.back(), -2.0 * s) / (2.0 * s);
        return std::pair<double, double>{total, err};
    };

    parallel_for(
        D,
        [&](std::size_t d) {
            thread_local Point y;
            y.assign(n, 0.0);
            auto [v, e] = radial(d, y);
            vals[d] = sph.weights[d] * v;
            errs[d] = sph.weights[d] * e;
        },
        cfg.threads);

    const double c = 0.5 * c_nms(n, m, s);
    OracleResult r;
    r.value = c * pairwise_sum(vals);
    r.error_estimate = std::abs(c) * pairwise_sum(errs);
    r.m = m;
    r.directions = D;
    return r;
}

template <class U>
double hypersingular(U&& u, std::span<const double> x, const Support& sup, double s, const OracleConfig& cfg = {})
{
    return hypersingular_detailed(std::forward<U>(u), x, sup, s, cfg).value;
}

struct VerifyPoint {
    Point x;
    double oracle = 0.0;
    double closed = 0.0;
    double rel_err = 0.0;
};

struct VerifyReport {
    std::string profile;
    double max_rel_err = 0.0;
    std::vector<VerifyPoint> per_point;
};

// Oracle against closed form. The error is taken relative to max(|closed|, kappa)
// so that points where the closed form vanishes are measured on the torsion scale.
inline VerifyReport verify_profile(const FractionalLaplacian& L, const Profile& p, const std::vector<Point>& points,
                                   const OracleConfig& cfg = {})
{
    VerifyReport rep;
    rep.profile = describe(p);
    const Support sup = EllipsoidSupport{L.ellipsoid()};
    const double kappa = L.torsion_constant();
    for (const auto& x : points) {
        VerifyPoint vp;
        vp.x = x;
        vp.closed = L.apply(p, x);
        vp.oracle = hypersingular([&](std::span<const double> y) { return L.eval(p, y); }, x, sup, L.order(), cfg);
        vp.rel_err = std::abs(vp.oracle - vp.closed) / std::max(std::abs(vp.closed), kappa);
        rep.max_rel_err = std::max(rep.max_rel_err, vp.rel_err);
        rep.per_point.push_back(std::move(vp));
    }
    return rep;
}

} // namespace fraclap
