#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <span>
#include <vector>

#include "fraclap/errors.hpp"
#include "fraclap/quadrature.hpp"

namespace fraclap {

using Point = std::vector<double>;

// E_a = { x : sum a_i x_i^2 < 1 } for a diagonal A.
struct EllipsoidSpec {
    int n = 0;
    std::vector<double> axes;

    EllipsoidSpec() = default;
    explicit EllipsoidSpec(std::vector<double> a) : n(static_cast<int>(a.size())), axes(std::move(a))
    {
        if (n < 1) throw DomainError("EllipsoidSpec: empty axes");
        for (double v : axes)
            if (!(v > 0.0) || !std::isfinite(v))
                throw DomainError("EllipsoidSpec: axes must be positive, got " + detail::fmt_double(v));
    }

    // (1,...,1,a)
    static EllipsoidSpec eccentric(int n, double a)
    {
        if (n < 1) throw DomainError("eccentric: n must be >= 1");
        if (!(a > 1.0)) throw DomainError("eccentric: need a > 1");
        std::vector<double> v(n, 1.0);
        v.back() = a;
        return EllipsoidSpec(std::move(v));
    }

    static EllipsoidSpec ball(int n) { return EllipsoidSpec(std::vector<double>(n, 1.0)); }

    double norm_sq(std::span<const double> x) const
    {
        double r = 0.0;
        for (int i = 0; i < n; ++i) r += axes[i] * x[i] * x[i];
        return r;
    }

    double dot(std::span<const double> x, std::span<const double> y) const
    {
        double r = 0.0;
        for (int i = 0; i < n; ++i) r += axes[i] * x[i] * y[i];
        return r;
    }

    bool inside(std::span<const double> x) const { return norm_sq(x) < 1.0; }

    bool is_ball() const
    {
        return std::all_of(axes.begin(), axes.end(), [&](double v) { return v == axes[0]; });
    }
};

inline double a_norm_sq(std::span<const double> x, const EllipsoidSpec& E) { return E.norm_sq(x); }

inline int default_resolution(int n) { return n <= 2 ? 256 : (n == 3 ? 96 : 48); }

namespace detail {

struct SphereRule {
    int dim = 0; // ambient dimension
    std::vector<double> points;
    std::vector<double> weights;
};

// Polar-angle breakpoints on [0, pi/2]; geometric toward the equator when the
// axis ratio puts a layer of width `scale` there.
inline std::vector<double> polar_breaks(double scale)
{
    const double h = 0.5 * std::numbers::pi;
    if (scale > 0.25) return {0.0, h};
    std::vector<double> psi{0.0, 0.5 * scale};
    for (double d = scale; d < 0.75 * h; d *= 2.0) psi.push_back(d);
    std::vector<double> b{0.0};
    for (auto it = psi.rbegin(); it != psi.rend(); ++it) b.push_back(h - *it);
    return b;
}

// Rule on the unit sphere of R^{weights.size()}; the polar axis is the one with
// the largest weight, and the rest is handled recursively.
inline SphereRule sphere_rule(const std::vector<double>& axis_weight, int res)
{
    const int d = static_cast<int>(axis_weight.size());
    SphereRule r;
    r.dim = d;
    if (d == 1) {
        r.points = {1.0, -1.0};
        r.weights = {1.0, 1.0};
        return r;
    }
    const int p = static_cast<int>(std::max_element(axis_weight.begin(), axis_weight.end()) - axis_weight.begin());
    std::vector<double> rest;
    std::vector<int> rest_idx;
    for (int i = 0; i < d; ++i)
        if (i != p) {
            rest.push_back(axis_weight[i]);
            rest_idx.push_back(i);
        }
    const double lo = *std::min_element(rest.begin(), rest.end());
    const double scale = std::sqrt(lo / axis_weight[p]);

    auto half = polar_breaks(scale);
    const int panels = static_cast<int>(half.size()) - 1;
    const int per = std::max(8, (res / 2 + panels - 1) / panels);
    std::vector<double> breaks = half;
    for (auto it = half.rbegin() + 1; it != half.rend(); ++it) breaks.push_back(std::numbers::pi - *it);
    Rule1D polar = composite_gauss(breaks, per);

    SphereRule sub = sphere_rule(rest, res);
    const std::size_t ns = sub.weights.size();
    r.points.reserve(polar.x.size() * ns * d);
    for (std::size_t k = 0; k < polar.x.size(); ++k) {
        const double phi = polar.x[k];
        const double sp = std::sin(phi), cp = std::cos(phi);
        const double wk = polar.w[k] * std::pow(sp, d - 2);
        for (std::size_t j = 0; j < ns; ++j) {
            std::size_t base = r.points.size();
            r.points.resize(base + d);
            r.points[base + p] = cp;
            for (int q = 0; q < d - 1; ++q) r.points[base + rest_idx[q]] = sp * sub.points[j * (d - 1) + q];
            r.weights.push_back(wk * sub.weights[j]);
        }
    }
    return r;
}

} // namespace detail

// Nodes on the boundary of E_a with plain surface weights and weights for
// mu(dtheta) = dtheta / (|theta|^{n+2s} |A theta|).
//
// Nodes are radial projections theta = w / |w|_a of a rule on the unit sphere;
// dtheta = |A theta| |theta|^n dw, hence mu(dtheta) = |theta|^{-2s} dw.
struct SurfaceRule {
    int n = 0;
    int resolution = 0;
    double s = 0.0;
    std::vector<double> points;
    std::vector<double> surface_weights;
    std::vector<double> mu_weights;

    std::size_t size() const { return surface_weights.size(); }
    std::span<const double> theta(std::size_t i) const { return {points.data() + i * n, static_cast<std::size_t>(n)}; }

    template <class F>
    double integrate_mu(F&& f) const
    {
        double acc = 0.0;
        for (std::size_t i = 0; i < size(); ++i) acc += mu_weights[i] * f(theta(i));
        return acc;
    }

    template <class F>
    double integrate_surface(F&& f) const
    {
        double acc = 0.0;
        for (std::size_t i = 0; i < size(); ++i) acc += surface_weights[i] * f(theta(i));
        return acc;
    }
};

inline SurfaceRule surface_rule(const EllipsoidSpec& E, double s, int resolution = 0)
{
    if (E.n < 2) throw DomainError("surface_rule: need n >= 2");
    if (resolution == 0) resolution = default_resolution(E.n);
    if (resolution < 8) throw DomainError("surface_rule: resolution must be >= 8");
    const int n = E.n;
    auto sph = detail::sphere_rule(E.axes, resolution);
    SurfaceRule r;
    r.n = n;
    r.resolution = resolution;
    r.s = s;
    const std::size_t N = sph.weights.size();
    r.points.resize(N * n);
    r.surface_weights.resize(N);
    r.mu_weights.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
        std::span<const double> w(sph.points.data() + i * n, n);
        const double wa = std::sqrt(E.norm_sq(w));
        double t2 = 0.0, at2 = 0.0;
        for (int k = 0; k < n; ++k) {
            const double th = w[k] / wa;
            r.points[i * n + k] = th;
            t2 += th * th;
            at2 += E.axes[k] * E.axes[k] * th * th;
        }
        r.surface_weights[i] = sph.weights[i] * std::sqrt(at2) * std::pow(t2, 0.5 * n);
        r.mu_weights[i] = sph.weights[i] * std::pow(t2, -s);
    }
    return r;
}

} // namespace fraclap
