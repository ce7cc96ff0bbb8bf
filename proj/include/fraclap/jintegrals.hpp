#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "fraclap/errors.hpp"
#include "fraclap/geometry.hpp"
#include "fraclap/specfun.hpp"

namespace fraclap {

enum class Provenance { closed_form, quadrature };

inline const char* to_string(Provenance p) { return p == Provenance::closed_form ? "closed_form" : "quadrature"; }

// Moments of mu over the boundary of E_a:
//   J0 = int mu,  J1[k] = a_k int theta_k^2 mu,  J2[k] = a_k^2 int theta_k^4 mu,
//   mixed(i,k) = int theta_i^2 theta_k^2 mu (diagonal holds int theta_i^4 mu).
struct JTable {
    int n = 0;
    double s = 0.0;
    std::vector<double> axes;
    double J0 = 0.0;
    std::vector<double> J1;
    std::vector<double> J2;
    std::vector<double> M;
    Provenance provenance = Provenance::quadrature;

    double mixed(int i, int k) const { return M[static_cast<std::size_t>(i) * n + k]; }
    double& mixed(int i, int k) { return M[static_cast<std::size_t>(i) * n + k]; }
};

// omega_d = |S^d|
inline double sphere_area(int d)
{
    return 2.0 * std::pow(std::numbers::pi, 0.5 * (d + 1)) / gamma(0.5 * (d + 1));
}

// J_i^{(k)} for axes (1,...,1,a); k is a 0-based axis index, k = n-1 is the
// distinguished axis. i = 0 gives J0.
inline double j_closed(int n, double s, double a, int i, int k)
{
    if (n < 2) throw DomainError("j_closed: need n >= 2");
    if (!(a > 0.0)) throw DomainError("j_closed: need a > 0");
    if (i < 0) throw DomainError("j_closed: need i >= 0");
    if (k < 0 || k >= n) throw DomainError("j_closed: axis index out of range");
    const double pre = std::pow(a, -0.5) * sphere_area(n - 2) * beta(i + 0.5, 0.5 * (n - 1));
    const double z = 1.0 - 1.0 / a;
    const double b = (k == n - 1) ? i + 0.5 : 0.5;
    return pre * hyp2f1(s + 0.5 * n, b, i + 0.5 * n, z);
}

// int theta_i^2 theta_k^2 mu for axes (1,...,1,a), i != k.
inline double mixed_closed(int n, double s, double a, int i, int k)
{
    if (i == k) throw DomainError("mixed_closed: need i != k");
    const double J1 = j_closed(n, s, a, 1, 0);
    const double J2 = j_closed(n, s, a, 2, 0);
    if (i == n - 1 || k == n - 1) return (J1 - (n + 1) / 3.0 * J2) / a;
    return J2 / 3.0;
}

inline double j_quadrature(const EllipsoidSpec& E, double s, int i, int k, int resolution = 0)
{
    if (k < 0 || k >= E.n) throw DomainError("j_quadrature: axis index out of range");
    auto rule = surface_rule(E, s, resolution);
    const double ak = E.axes[k];
    return rule.integrate_mu([&](std::span<const double> t) { return std::pow(ak * t[k] * t[k], i); });
}

inline double mixed_moment(const EllipsoidSpec& E, double s, int i, int k, int resolution = 0)
{
    if (i == k) throw DomainError("mixed_moment: need i != k");
    if (i < 0 || k < 0 || i >= E.n || k >= E.n) throw DomainError("mixed_moment: axis index out of range");
    auto rule = surface_rule(E, s, resolution);
    return rule.integrate_mu([&](std::span<const double> t) { return t[i] * t[i] * t[k] * t[k]; });
}

inline JTable jtable_quadrature(const EllipsoidSpec& E, double s, const SurfaceRule& rule)
{
    const int n = E.n;
    JTable t;
    t.n = n;
    t.s = s;
    t.axes = E.axes;
    t.J1.assign(n, 0.0);
    t.J2.assign(n, 0.0);
    t.M.assign(static_cast<std::size_t>(n) * n, 0.0);
    t.provenance = Provenance::quadrature;
    for (std::size_t q = 0; q < rule.size(); ++q) {
        auto th = rule.theta(q);
        const double w = rule.mu_weights[q];
        t.J0 += w;
        for (int i = 0; i < n; ++i) {
            const double ti = th[i] * th[i];
            t.J1[i] += w * ti;
            for (int k = 0; k < n; ++k) t.M[static_cast<std::size_t>(i) * n + k] += w * ti * th[k] * th[k];
        }
    }
    for (int i = 0; i < n; ++i) {
        t.J2[i] = E.axes[i] * E.axes[i] * t.mixed(i, i);
        t.J1[i] *= E.axes[i];
    }
    return t;
}

inline JTable jtable_quadrature(const EllipsoidSpec& E, double s, int resolution = 0)
{
    return jtable_quadrature(E, s, surface_rule(E, s, resolution));
}

// Axes lambda*(1,...,1,a) up to a permutation: returns {lambda, a, axis of a}.
struct EccentricForm {
    double lambda;
    double a;
    int axis;
};

inline std::optional<EccentricForm> eccentric_form(const EllipsoidSpec& E)
{
    if (E.n < 2) return std::nullopt;
    const auto& v = E.axes;
    if (E.is_ball()) return EccentricForm{v[0], 1.0, E.n - 1};
    for (int d = 0; d < E.n; ++d) {
        const double base = v[d == 0 ? 1 : 0];
        bool ok = true;
        for (int i = 0; i < E.n && ok; ++i)
            if (i != d && v[i] != base) ok = false;
        if (ok) return EccentricForm{base, v[d] / base, d};
    }
    return std::nullopt;
}

// Closed-form table for lambda*(1,...,1,a) with the distinguished axis anywhere.
inline JTable jtable_closed(const EllipsoidSpec& E, double s)
{
    auto ef = eccentric_form(E);
    if (!ef) throw DomainError("jtable_closed: axes are not of the form lambda*(1,...,1,a)");
    const int n = E.n;
    const double a = ef->a;
    const double l1 = std::pow(ef->lambda, s);
    const double l2 = std::pow(ef->lambda, s - 2.0);
    JTable t;
    t.n = n;
    t.s = s;
    t.axes = E.axes;
    t.provenance = Provenance::closed_form;
    t.J0 = l1 * j_closed(n, s, a, 0, n - 1);
    const double J1o = j_closed(n, s, a, 1, 0), J2o = j_closed(n, s, a, 2, 0);
    const double J1d = j_closed(n, s, a, 1, n - 1), J2d = j_closed(n, s, a, 2, n - 1);
    t.J1.assign(n, l1 * J1o);
    t.J2.assign(n, l1 * J2o);
    t.J1[ef->axis] = l1 * J1d;
    t.J2[ef->axis] = l1 * J2d;
    t.M.assign(static_cast<std::size_t>(n) * n, 0.0);
    const double m_oo = J2o / 3.0;
    const double m_od = (J1o - (n + 1) / 3.0 * J2o) / a;
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            double v;
            if (i == k)
                v = (i == ef->axis ? J2d / (a * a) : J2o);
            else if (i == ef->axis || k == ef->axis)
                v = m_od;
            else
                v = m_oo;
            t.mixed(i, k) = l2 * v;
        }
    return t;
}

inline JTable jtable_closed(int n, double s, double a) { return jtable_closed(EllipsoidSpec::eccentric(n, a), s); }

// Closed forms whenever the axes allow it, quadrature otherwise.
inline JTable make_jtable(const EllipsoidSpec& E, double s, int resolution = 0)
{
    if (!(s > 0.0)) throw DomainError("make_jtable: need s > 0");
    if (eccentric_form(E)) return jtable_closed(E, s);
    return jtable_quadrature(E, s, resolution);
}

struct AsymptoticLimits {
    double j1;                             // lim a J1^(1) / J0
    double j2;                             // lim a^2 J2^(1) / J0, may be +inf
    std::optional<double> ji_product;      // lim a^i Ji^(1) / J0 when s > i - 1/2
    std::optional<double> ji_scaled_limit; // lim a^{1/2} Ji^(1) otherwise
};

inline AsymptoticLimits asymptotic_limits(double s, int i, int n = 2)
{
    if (!(s > 0.0)) throw DomainError("asymptotic_limits: need s > 0");
    if (i < 0) throw DomainError("asymptotic_limits: need i >= 0");
    const double inf = std::numeric_limits<double>::infinity();
    AsymptoticLimits r{};
    r.j1 = s > 0.5 ? 1.0 / (2.0 * s - 1.0) : inf;
    r.j2 = s > 1.5 ? 3.0 / ((2.0 * s - 1.0) * (2.0 * s - 3.0)) : inf;
    if (s > i - 0.5) {
        double p = 1.0;
        for (int k = 0; k < i; ++k) p *= (1.0 + 2.0 * k) / (2.0 * s - 2.0 * k - 1.0);
        r.ji_product = p;
    } else if (s < i - 0.5) {
        r.ji_scaled_limit = sphere_area(n - 2) * beta(i + 0.5, 0.5 * (n - 1)) * beta(i - s - 0.5, 0.5)
                            / beta(0.5, 0.5 * (n - 1) + i);
    }
    return r;
}

} // namespace fraclap
