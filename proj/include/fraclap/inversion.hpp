#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "fraclap/errors.hpp"
#include "fraclap/geometry.hpp"
#include "fraclap/jintegrals.hpp"
#include "fraclap/laplacian.hpp"
#include "fraclap/oracle.hpp"

namespace fraclap {

// sigma(x) = c (x + nu) / |x + nu|^2 - nu, inversion in the sphere of radius sqrt(c)
// about -nu; Omega = sigma(E_a).
struct InversionSpec {
    double c = 1.0;
    Point nu;
    EllipsoidSpec base;

    InversionSpec() = default;
    InversionSpec(double c_, Point nu_, EllipsoidSpec base_) : c(c_), nu(std::move(nu_)), base(std::move(base_))
    {
        validate();
    }

    void validate() const
    {
        if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("inversion: need c > 0");
        if (static_cast<int>(nu.size()) != base.n) throw DomainError("inversion: nu has the wrong dimension");
        if (std::abs(std::sqrt(base.norm_sq(nu)) - 1.0) <= 1e-12)
            throw DomainError("inversion: nu lies on the boundary of E_a");
    }

    int dim() const { return base.n; }

    // sigma(x) -> -nu as |x| -> infinity, so Omega is bounded iff -nu is outside E_a.
    bool bounded() const { return base.norm_sq(nu) > 1.0; }
};

inline double dist_to_pole_sq(std::span<const double> x, const InversionSpec& sp)
{
    double d2 = 0.0;
    for (int i = 0; i < sp.dim(); ++i) d2 += (x[i] + sp.nu[i]) * (x[i] + sp.nu[i]);
    return d2;
}

inline Point sigma(std::span<const double> x, const InversionSpec& sp)
{
    if (static_cast<int>(x.size()) != sp.dim()) throw DomainError("sigma: wrong dimension");
    const double d2 = dist_to_pole_sq(x, sp);
    if (d2 == 0.0) throw PoleError("sigma: x = -nu");
    Point y(sp.dim());
    for (int i = 0; i < sp.dim(); ++i) y[i] = sp.c * (x[i] + sp.nu[i]) / d2 - sp.nu[i];
    return y;
}

inline bool omega_contains(std::span<const double> x, const InversionSpec& sp)
{
    return sp.base.inside(sigma(x, sp));
}

// w_s(x) = |x + nu|^{2s-n} u_s(sigma(x))
inline double w_s_value(std::span<const double> x, const InversionSpec& sp, double s)
{
    const Point y = sigma(x, sp);
    const double u1 = 1.0 - sp.base.norm_sq(y);
    if (u1 <= 0.0) return 0.0;
    return std::pow(dist_to_pole_sq(x, sp), s - 0.5 * sp.dim()) * std::pow(u1, s);
}

// |det D sigma(x)| = c^n / |x + nu|^{2n}
inline double jacobian_magnitude(std::span<const double> x, const InversionSpec& sp)
{
    const double d2 = dist_to_pole_sq(x, sp);
    if (d2 == 0.0) throw PoleError("jacobian: x = -nu");
    return std::pow(sp.c, sp.dim()) / std::pow(d2, sp.dim());
}

// Determinant of the central-difference Jacobian of sigma.
inline double jacobian_det_numeric(std::span<const double> x, const InversionSpec& sp, double h = 1e-6)
{
    const int n = sp.dim();
    std::vector<double> M(static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j) {
        Point xp(x.begin(), x.end()), xm(x.begin(), x.end());
        xp[j] += h;
        xm[j] -= h;
        auto fp = sigma(xp, sp), fm = sigma(xm, sp);
        for (int i = 0; i < n; ++i) M[i * n + j] = (fp[i] - fm[i]) / (2 * h);
    }
    double det = 1.0;
    for (int k = 0; k < n; ++k) {
        int p = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(M[i * n + k]) > std::abs(M[p * n + k])) p = i;
        if (M[p * n + k] == 0.0) return 0.0;
        if (p != k) {
            for (int j = 0; j < n; ++j) std::swap(M[k * n + j], M[p * n + j]);
            det = -det;
        }
        det *= M[k * n + k];
        for (int i = k + 1; i < n; ++i) {
            const double f = M[i * n + k] / M[k * n + k];
            for (int j = k; j < n; ++j) M[i * n + j] -= f * M[k * n + j];
        }
    }
    return det;
}

// Image of the boundary of E_a. n = 2: closed polyline of N vertices ordered by
// angle. n = 3: latitude/longitude mesh with N longitudes and N/2 latitude bands.
// When Omega is unbounded the curve or surface still closes up; Omega is its exterior.
struct BoundaryMesh {
    int n = 2;
    bool bounded = true;
    std::vector<Point> vertices;
    std::vector<std::array<int, 2>> segments;
    std::vector<std::array<int, 3>> triangles;
};

inline BoundaryMesh boundary_polyline(const InversionSpec& sp, int N)
{
    if (N < 16) throw DomainError("boundary_polyline: need N >= 16");
    const int n = sp.dim();
    BoundaryMesh m;
    m.n = n;
    m.bounded = sp.bounded();
    const auto& a = sp.base.axes;
    const double pi = std::numbers::pi;
    if (n == 2) {
        for (int k = 0; k < N; ++k) {
            const double t = 2 * pi * k / N;
            Point b{std::cos(t) / std::sqrt(a[0]), std::sin(t) / std::sqrt(a[1])};
            m.vertices.push_back(sigma(b, sp));
            m.segments.push_back({k, (k + 1) % N});
        }
        return m;
    }
    if (n != 3) throw DomainError("boundary_polyline: only n = 2, 3");
    const int rings = N / 2;
    auto at = [&](double th, double ph) {
        Point b{std::sin(th) * std::cos(ph) / std::sqrt(a[0]), std::sin(th) * std::sin(ph) / std::sqrt(a[1]),
                std::cos(th) / std::sqrt(a[2])};
        return sigma(b, sp);
    };
    m.vertices.push_back(at(0.0, 0.0));
    for (int i = 1; i < rings; ++i)
        for (int j = 0; j < N; ++j) m.vertices.push_back(at(pi * i / rings, 2 * pi * j / N));
    m.vertices.push_back(at(pi, 0.0));
    const int south = static_cast<int>(m.vertices.size()) - 1;
    auto v = [&](int i, int j) { return 1 + (i - 1) * N + (j % N); };
    for (int j = 0; j < N; ++j) m.triangles.push_back({0, v(1, j), v(1, j + 1)});
    for (int i = 1; i + 1 < rings; ++i)
        for (int j = 0; j < N; ++j) {
            m.triangles.push_back({v(i, j), v(i + 1, j), v(i + 1, j + 1)});
            m.triangles.push_back({v(i, j), v(i + 1, j + 1), v(i, j + 1)});
        }
    for (int j = 0; j < N; ++j) m.triangles.push_back({v(rings - 1, j), south, v(rings - 1, j + 1)});
    return m;
}

// Radius of a ball about the origin containing a bounded Omega.
inline double omega_radius(const InversionSpec& sp)
{
    if (!sp.bounded()) throw DomainError("omega_radius: Omega is unbounded");
    // |sigma(y) + nu| = c / |y + nu| is largest at the point of E_a nearest to -nu;
    // bound that distance below by the a-norm gap
    double amax = 0.0;
    for (double v : sp.base.axes) amax = std::max(amax, v);
    const double gap = (std::sqrt(sp.base.norm_sq(sp.nu)) - 1.0) / std::sqrt(amax);
    double nn = 0.0;
    for (double v : sp.nu) nn += v * v;
    return sp.c / gap + std::sqrt(nn);
}

inline LevelSetSupport omega_support(const InversionSpec& sp, int samples = 400)
{
    return LevelSetSupport{[sp](std::span<const double> y) {
                               if (dist_to_pole_sq(y, sp) == 0.0) return 1.0;
                               return sp.base.norm_sq(sigma(y, sp)) - 1.0;
                           },
                           omega_radius(sp), samples};
}

// Oracle value of the operator applied to w_s at x in Omega.
inline double lap_w_s_oracle(const InversionSpec& sp, double s, std::span<const double> x, const OracleConfig& cfg = {})
{
    if (!sp.bounded()) throw DomainError("lap_w_s_oracle: Omega must be bounded");
    if (!omega_contains(x, sp)) throw DomainError("lap_w_s_oracle: x is not in Omega");
    return hypersingular([&](std::span<const double> y) { return dist_to_pole_sq(y, sp) == 0.0 ? 0.0 : w_s_value(y, sp, s); },
                         x, omega_support(sp), s, cfg);
}

// The right-hand side c^{2s} kappa |x + nu|^{-n-2s} predicted for w_s.
inline double w_s_rhs(const InversionSpec& sp, double s, std::span<const double> x)
{
    const double kappa = gamma(1 + s) * k_ns(sp.dim(), s) * make_jtable(sp.base, s).J0;
    return std::pow(sp.c, 2 * s) * kappa * std::pow(dist_to_pole_sq(x, sp), -0.5 * (sp.dim() + 2 * s));
}

struct RatioCheck {
    double ratio = 1.0;
    double value1 = 0.0, value2 = 0.0;
};

// [L w_s(x1) / L w_s(x2)] / [|x1+nu|^{-n-2s} / |x2+nu|^{-n-2s}], L by the oracle
inline RatioCheck rhs_ratio_check_detailed(const InversionSpec& sp, double s, std::span<const double> x1,
                                           std::span<const double> x2, const OracleConfig& cfg = {})
{
    RatioCheck r;
    r.value1 = lap_w_s_oracle(sp, s, x1, cfg);
    const bool same = std::equal(x1.begin(), x1.end(), x2.begin(), x2.end());
    r.value2 = same ? r.value1 : lap_w_s_oracle(sp, s, x2, cfg);
    const double e = -0.5 * (sp.dim() + 2 * s);
    const double k1 = std::pow(dist_to_pole_sq(x1, sp), e), k2 = std::pow(dist_to_pole_sq(x2, sp), e);
    r.ratio = same ? 1.0 : (r.value1 / r.value2) / (k1 / k2);
    return r;
}

inline double rhs_ratio_check(const InversionSpec& sp, double s, std::span<const double> x1,
                              std::span<const double> x2, const OracleConfig& cfg = {})
{
    return rhs_ratio_check_detailed(sp, s, x1, x2, cfg).ratio;
}

// Smooth bump supported on E_a.
inline double bump(std::span<const double> y, const EllipsoidSpec& E)
{
    const double q = E.norm_sq(y);
    return q < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - q)) : 0.0;
}

struct TransportCheck {
    double lhs = 0.0; // operator applied to K_s phi at x
    double rhs = 0.0; // c^{2s} |x+nu|^{-n-2s} (operator applied to phi)(sigma(x))
};

// Both sides of the transformation identity for the bump, each by the oracle.
inline TransportCheck transport_identity_check(const InversionSpec& sp, double s, std::span<const double> x,
                                               const OracleConfig& cfg = {})
{
    if (!sp.bounded()) throw DomainError("transport_identity_check: Omega must be bounded");
    const EllipsoidSpec& E = sp.base;
    TransportCheck t;
    auto K = [&](std::span<const double> y) {
        const double d2 = dist_to_pole_sq(y, sp);
        if (d2 == 0.0) return 0.0;
        return std::pow(d2, s - 0.5 * sp.dim()) * bump(sigma(y, sp), E);
    };
    t.lhs = hypersingular(K, x, omega_support(sp), s, cfg);
    const Point y = sigma(x, sp);
    const double inner = hypersingular([&](std::span<const double> z) { return bump(z, E); }, y, EllipsoidSupport{E}, s, cfg);
    t.rhs = std::pow(sp.c, 2 * s) * std::pow(dist_to_pole_sq(x, sp), -0.5 * (sp.dim() + 2 * s)) * inner;
    return t;
}

} // namespace fraclap
