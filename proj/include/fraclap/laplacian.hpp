#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fraclap/errors.hpp"
#include "fraclap/geometry.hpp"
#include "fraclap/jintegrals.hpp"
#include "fraclap/polynomial.hpp"
#include "fraclap/specfun.hpp"

namespace fraclap {

// Profiles supported on E_a. Axis indices are 0-based.
struct UBeta {
    double beta;
};
// (1 - sqrt(a_k) x_k) u_s
struct XiUs {
    int k;
};
// (1 - sqrt(a_k) x_k)^2 u_s
struct XiSqUs {
    int k;
};
// u_s * sum_{i != k} a_i x_i^2
struct QUs {
    int k;
};
// p u_s with p = (1 - sqrt(a_1) x_1)^2 + gamma (1 - sqrt(a_1) x_1) - delta sum_{i > 1} a_i x_i^2
struct PGammaDelta {
    double gamma;
    double delta;
};

struct Profile;

// base - eps u_s
struct Shifted {
    std::shared_ptr<const Profile> base;
    double eps;
};

struct Profile {
    std::variant<UBeta, XiUs, XiSqUs, QUs, PGammaDelta, Shifted> kind;

    Profile(UBeta v) : kind(v) {}
    Profile(XiUs v) : kind(v) {}
    Profile(XiSqUs v) : kind(v) {}
    Profile(QUs v) : kind(v) {}
    Profile(PGammaDelta v) : kind(v) {}
    Profile(Shifted v) : kind(std::move(v)) {}
};

inline Profile shifted(Profile base, double eps)
{
    return Shifted{std::make_shared<const Profile>(std::move(base)), eps};
}

inline std::string describe(const Profile& p)
{
    struct V {
        std::string operator()(const UBeta& v) const { return "ubeta:" + detail::fmt_double(v.beta); }
        std::string operator()(const XiUs& v) const { return "xi:" + std::to_string(v.k + 1); }
        std::string operator()(const XiSqUs& v) const { return "xisq:" + std::to_string(v.k + 1); }
        std::string operator()(const QUs& v) const { return "q:" + std::to_string(v.k + 1); }
        std::string operator()(const PGammaDelta& v) const
        {
            return "p:" + detail::fmt_double(v.gamma) + "," + detail::fmt_double(v.delta);
        }
        std::string operator()(const Shifted& v) const
        {
            return "shifted(" + describe(*v.base) + "," + detail::fmt_double(v.eps) + ")";
        }
    };
    return std::visit(V{}, p.kind);
}

namespace detail {

inline double parse_number(const std::string& t)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        throw DomainError("not a number: '" + t + "'");
    }
    if (used != t.size() || !std::isfinite(v)) throw DomainError("not a number: '" + t + "'");
    return v;
}

inline int parse_axis(const std::string& t, int n)
{
    const double v = parse_number(t);
    if (v != std::floor(v) || v < 1 || (n > 0 && v > n))
        throw DomainError("axis must be an integer in 1.." + std::to_string(n) + ", got '" + t + "'");
    return static_cast<int>(v) - 1;
}

} // namespace detail

// Inverse of describe(): "ubeta:B", "xi:K", "xisq:K", "q:K", "p:G,D", "shifted(P,EPS)".
// K is 1-based; n > 0 bounds it.
inline Profile parse_profile(const std::string& text, int n = 0)
{
    if (text.rfind("shifted(", 0) == 0 && text.back() == ')') {
        const std::string body = text.substr(8, text.size() - 9);
        const auto comma = body.rfind(',');
        if (comma == std::string::npos) throw DomainError("shifted profile needs ',eps'");
        return shifted(parse_profile(body.substr(0, comma), n), detail::parse_number(body.substr(comma + 1)));
    }
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw DomainError("profile needs 'kind:args', got '" + text + "'");
    const std::string kind = text.substr(0, colon), arg = text.substr(colon + 1);
    if (kind == "ubeta") return UBeta{detail::parse_number(arg)};
    if (kind == "xi") return XiUs{detail::parse_axis(arg, n)};
    if (kind == "xisq") return XiSqUs{detail::parse_axis(arg, n)};
    if (kind == "q") return QUs{detail::parse_axis(arg, n)};
    if (kind == "p") {
        const auto comma = arg.find(',');
        if (comma == std::string::npos) throw DomainError("p profile needs 'p:gamma,delta'");
        return PGammaDelta{detail::parse_number(arg.substr(0, comma)), detail::parse_number(arg.substr(comma + 1))};
    }
    throw DomainError("unknown profile kind '" + kind + "'");
}

// Constant of the finite-sum representation of (-Delta)^s u_{s+j}.
inline double c_nsj(int n, double s, int j)
{
    return std::pow(2.0, 2.0 * s - 1.0) * gamma(0.5 * n + s) * gamma(1.0 + s + j)
           / (std::pow(std::numbers::pi, 0.5 * (n - 1)) * gamma(0.5 + s) * gamma(1.0 + j));
}

// (-Delta)^s on ellipsoid-supported profiles for one (E_a, s).
class FractionalLaplacian {
public:
    FractionalLaplacian(EllipsoidSpec E, double s, int resolution = 0)
        : FractionalLaplacian(E, s, make_jtable(E, s, resolution), resolution)
    {
    }

    FractionalLaplacian(EllipsoidSpec E, double s, JTable jt, int resolution = 0)
        : E_(std::move(E)), s_(s), jt_(std::move(jt))
    {
        if (!(s > 0.0)) throw DomainError("FractionalLaplacian: need s > 0");
        if (E_.n < 2) throw DomainError("FractionalLaplacian: need n >= 2");
        rule_ = surface_rule(E_, s_, resolution);
        gk_ = gamma(1.0 + s_) * k_ns(E_.n, s_);
        for (int j = -1; j < 3; ++j) rows_.push_back(build_row(j));
    }

    const EllipsoidSpec& ellipsoid() const { return E_; }
    double order() const { return s_; }
    int dim() const { return E_.n; }
    const JTable& table() const { return jt_; }
    const SurfaceRule& rule() const { return rule_; }

    // Gamma(1+s) k_{n,s}
    double scale() const { return gk_; }
    double torsion_constant() const { return gk_ * jt_.J0; }

    double u_beta(std::span<const double> x, double beta) const
    {
        const double u1 = 1.0 - E_.norm_sq(x);
        if (u1 <= 0.0) return 0.0;
        return std::pow(u1, beta);
    }

    double torsion_value(std::span<const double> x) const { return u_beta(x, s_) / torsion_constant(); }

    double eval(const Profile& p, std::span<const double> x) const
    {
        const double us = u_beta(x, s_);
        struct V {
            const FractionalLaplacian& L;
            std::span<const double> x;
            double us;
            double operator()(const UBeta& v) const { return L.u_beta(x, v.beta); }
            double operator()(const XiUs& v) const { return (1.0 - L.sqa(v.k) * x[v.k]) * us; }
            double operator()(const XiSqUs& v) const
            {
                const double t = 1.0 - L.sqa(v.k) * x[v.k];
                return t * t * us;
            }
            double operator()(const QUs& v) const { return L.qsum(x, v.k) * us; }
            double operator()(const PGammaDelta& v) const
            {
                const double t = 1.0 - L.sqa(0) * x[0];
                return (t * t + v.gamma * t - v.delta * L.qsum(x, 0)) * us;
            }
            double operator()(const Shifted& v) const { return L.eval(*v.base, x) - v.eps * us; }
        };
        check_axis(p);
        return std::visit(V{*this, x, us}, p.kind);
    }

    // Surface-integral formula for general beta > -1.
    double lap_u_beta(std::span<const double> x, double beta) const
    {
        if (!(beta > -1.0)) throw DomainError("lap_u_beta: need beta > -1");
        const double u1 = interior_u1(x);
        const double rg = gamma_reciprocal(1.0 + beta - s_);
        if (rg == 0.0) return 0.0;
        const double pre = k_ns(E_.n, s_) * gamma(1.0 + beta) * rg;
        const double a = s_ + 0.5, b = s_ - beta;
        const double integral = rule_.integrate_mu([&](std::span<const double> th) {
            const double d = E_.dot(x, th);
            const double w = d * d;
            const double v = u1 + w;
            return std::pow(v, beta - s_) * hyp2f1(a, b, 0.5, w / v);
        });
        return pre * integral;
    }

    // Row j of the explicit table of (-Delta)^s u_{s+j}, j <= 2, as a polynomial.
    const Polynomial& table_row(int j) const
    {
        if (j > 2) throw DomainError("table_row: only j <= 2 is tabulated");
        return rows_[std::max(j, -1) + 1];
    }



    // (-Delta)^s u_beta as a polynomial when beta - s is an integer <= 2.
    std::optional<Polynomial> lap_u_beta_polynomial(double beta) const
    {
        // beta is often formed as s + j in floating point
        const double j = std::round(beta - s_);
        if (std::abs(beta - s_ - j) > 1e-12 * std::max(1.0, std::abs(beta)) || j > 2.0) return std::nullopt;
        return table_row(static_cast<int>(j));
    }

    // Finite-sum representation with per-point quadrature, any j >= 0.
    double lap_u_s_plus_j_sum(std::span<const double> x, int j) const
    {
        if (j < 0) throw DomainError("lap_u_s_plus_j_sum: need j >= 0");
        const double u1 = interior_u1(x);
        std::vector<double> coef(j + 1);
        for (int k = 0; k <= j; ++k)
            coef[k] = ((k % 2) ? -1.0 : 1.0) * gamma(s_ + 0.5 + k) / gamma(0.5 + k) * binomial(j, k);
        const double integral = rule_.integrate_mu([&](std::span<const double> th) {
            const double d = E_.dot(x, th);
            const double w = d * d;
            double acc = 0.0;
            for (int k = 0; k <= j; ++k) acc += coef[k] * std::pow(u1 + w, j - k) * std::pow(w, k);
            return acc;
        });
        return c_nsj(E_.n, s_, j) * integral;
    }

    double lap_u_s_plus_j(std::span<const double> x, int j) const
    {
        if (!(s_ + j > -1.0)) throw DomainError("lap_u_s_plus_j: need s + j > -1");
        interior_u1(x);
        if (j <= 2) return table_row(j)(x);
        return lap_u_s_plus_j_sum(x, j);
    }

    // (-Delta)^s (x_i u_beta)
    double lap_recurrence_first(std::span<const double> x, double beta, int i) const
    {
        if (!(beta > 0.0)) throw DomainError("lap_recurrence_first: need beta > 0");
        interior_u1(x);
        const double d = grad_lap_u_beta(x, beta + 1.0, i);
        return -d / (2.0 * (beta + 1.0) * E_.axes[i]);
    }

    // (-Delta)^s (x_i x_j u_beta)
    double lap_recurrence_second(std::span<const double> x, double beta, int i, int j) const
    {
        if (!(beta > 0.0)) throw DomainError("lap_recurrence_second: need beta > 0");
        interior_u1(x);
        double r = hess_lap_u_beta(x, beta + 2.0, i, j) / (2.0 * (beta + 2.0) * E_.axes[j]);
        if (i == j) r += lap_value(x, beta + 1.0);
        return r / (2.0 * (beta + 1.0) * E_.axes[i]);
    }

    // (-Delta)^s of (1 - sqrt(a_k) x_k) u_s
    QuadraticCoefficients poly1(int k) const
    {
        check_axis(k);
        QuadraticCoefficients q(E_.n);
        q.constant = jt_.J0;
        q.linear[k] = -(jt_.J0 + 2.0 * s_ * jt_.J1[k]) * sqa(k);
        return q * gk_;
    }

    // (-Delta)^s of (1 - sqrt(a_k) x_k)^2 u_s
    QuadraticCoefficients poly2(int k) const
    {
        check_axis(k);
        const double J0 = jt_.J0, J1 = jt_.J1[k], J2 = jt_.J2[k], s = s_;
        QuadraticCoefficients q(E_.n);
        q.constant = J0 - s * J1;
        q.linear[k] = -2.0 * (J0 + 2.0 * s * J1) * sqa(k);
        q.quadratic[k] = (J0 + 5.0 * s * J1 + 2.0 * s * (s - 1.0) * J2) * E_.axes[k];
        for (int i = 0; i < E_.n; ++i) {
            if (i == k) continue;
            const double ai = E_.axes[i];
            q.quadratic[i] = s * (J1 + 2.0 * (s - 1.0) * ai * E_.axes[k] * jt_.mixed(i, k)) * ai;
        }
        return q * gk_;
    }

    // (-Delta)^s of u_s sum_{i != k} a_i x_i^2
    QuadraticCoefficients q(int k) const
    {
        check_axis(k);
        const double J0 = jt_.J0, J1k = jt_.J1[k], J2k = jt_.J2[k], s = s_;
        QuadraticCoefficients r(E_.n);
        r.constant = -s * (J0 - J1k);
        r.quadratic[k] = s * (J0 - J1k + 2.0 * (s - 1.0) * (J1k - J2k)) * E_.axes[k];
        for (int i = 0; i < E_.n; ++i) {
            if (i == k) continue;
            const double ai = E_.axes[i];
            double cross = 0.0;
            for (int h = 0; h < E_.n; ++h)
                if (h != k && h != i) cross += ai * E_.axes[h] * jt_.mixed(h, i);
            r.quadratic[i] = ((s + 1.0) * J0 + 4.0 * s * jt_.J1[i] - s * J1k + 2.0 * s * (s - 1.0) * jt_.J2[i]
                              + 2.0 * s * (s - 1.0) * cross)
                             * ai;
        }
        return r * gk_;
    }

    double lap_poly1(std::span<const double> x, int k) const { return poly1(k)(checked(x)); }
    double lap_poly2(std::span<const double> x, int k) const { return poly2(k)(checked(x)); }
    double lap_q(std::span<const double> x, int k) const { return q(k)(checked(x)); }

    // Explicit coefficients of (-Delta)^s p when they are a diagonal quadratic.
    std::optional<QuadraticCoefficients> coefficients(const Profile& p) const
    {
        check_axis(p);
        struct V {
            const FractionalLaplacian& L;
            std::optional<QuadraticCoefficients> operator()(const UBeta& v) const
            {
                auto poly = L.lap_u_beta_polynomial(v.beta);
                if (!poly || poly->degree() > 2) return std::nullopt;
                return QuadraticCoefficients::from_polynomial(*poly);
            }
            std::optional<QuadraticCoefficients> operator()(const XiUs& v) const { return L.poly1(v.k); }
            std::optional<QuadraticCoefficients> operator()(const XiSqUs& v) const { return L.poly2(v.k); }
            std::optional<QuadraticCoefficients> operator()(const QUs& v) const { return L.q(v.k); }
            std::optional<QuadraticCoefficients> operator()(const PGammaDelta& v) const
            {
                return L.poly2(0) + L.poly1(0) * v.gamma - L.q(0) * v.delta;
            }
            std::optional<QuadraticCoefficients> operator()(const Shifted& v) const
            {
                auto base = L.coefficients(*v.base);
                if (!base) return std::nullopt;
                base->constant -= v.eps * L.torsion_constant();
                return base;
            }
        };
        return std::visit(V{*this}, p.kind);
    }

    // (-Delta)^s p at an interior point, from the closed forms.
    double apply(const Profile& p, std::span<const double> x) const
    {
        interior_u1(x);
        if (auto c = coefficients(p)) return (*c)(x);
        if (auto* v = std::get_if<UBeta>(&p.kind)) return lap_value(x, v->beta);
        auto* sh = std::get_if<Shifted>(&p.kind);
        return apply(*sh->base, x) - sh->eps * torsion_constant();
    }

    // Derivatives of (-Delta)^s u_beta: exact for tabulated rows, else Richardson-extrapolated
    // central differences of the surface-integral formula.
    double grad_lap_u_beta(std::span<const double> x, double beta, int i, bool analytic = true) const
    {
        check_axis(i);
        if (auto p = lap_u_beta_polynomial(beta); p && analytic) return p->derivative(i)(x);
        auto f = [&](double h) {
            Point xp(x.begin(), x.end()), xm(x.begin(), x.end());
            xp[i] += h;
            xm[i] -= h;
            return (lap_u_beta(xp, beta) - lap_u_beta(xm, beta)) / (2.0 * h);
        };
        const double h = 1e-5;
        return (4.0 * f(0.5 * h) - f(h)) / 3.0;
    }

    double hess_lap_u_beta(std::span<const double> x, double beta, int i, int j, bool analytic = true) const
    {
        check_axis(i);
        check_axis(j);
        if (auto p = lap_u_beta_polynomial(beta); p && analytic) return p->derivative(i).derivative(j)(x);
        auto f = [&](double h) {
            auto at = [&](double di, double dj) {
                Point y(x.begin(), x.end());
                y[i] += di;
                y[j] += dj;
                return lap_u_beta(y, beta);
            };
            if (i == j) return (at(h, 0) - 2.0 * at(0, 0) + at(-h, 0)) / (h * h);
            return (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4.0 * h * h);
        };
        const double h = 1e-3;
        return (4.0 * f(0.5 * h) - f(h)) / 3.0;
    }
private:
    EllipsoidSpec E_;
    double s_;
    JTable jt_;
    SurfaceRule rule_;
    double gk_ = 0.0;
    std::vector<Polynomial> rows_;

    Polynomial build_row(int j) const
    {
        const int n = E_.n;
        if (j == 0) return Polynomial::constant(n, torsion_constant());
        Polynomial u1 = Polynomial::constant(n, 1.0);
        Polynomial wJ1(n);
        for (int i = 0; i < n; ++i) {
            u1 -= Polynomial::variable(n, i) * Polynomial::variable(n, i) * E_.axes[i];
            wJ1 += Polynomial::variable(n, i) * Polynomial::variable(n, i) * (E_.axes[i] * jt_.J1[i]);
        }
        const double J0 = jt_.J0;
        if (j == 1) return (u1 * J0 - wJ1 * (2.0 * s_)) * (gamma(2.0 + s_) * k_ns(n, s_));
        if (j == 2) {
            Polynomial w2(n);
            for (int i = 0; i < n; ++i)
                for (int h = 0; h < n; ++h) {
                    Polynomial::Monomial m(n, 0);
                    m[i] += 2;
                    m[h] += 2;
                    const double c = i == h ? E_.axes[i] * E_.axes[i] * jt_.J2[i]
                                            : 3.0 * E_.axes[i] * E_.axes[i] * E_.axes[h] * E_.axes[h] * jt_.mixed(i, h);
                    w2.add_term(m, c);
                }
            Polynomial r = u1 * u1 * J0 - u1 * wJ1 * (4.0 * s_) + w2 * (4.0 * s_ * (s_ - 1.0) / 3.0);
            return r * (0.5 * gamma(3.0 + s_) * k_ns(n, s_));
        }
        return Polynomial(n);
    }


    double sqa(int k) const { return std::sqrt(E_.axes[k]); }

    double qsum(std::span<const double> x, int k) const
    {
        double r = 0.0;
        for (int i = 0; i < E_.n; ++i)
            if (i != k) r += E_.axes[i] * x[i] * x[i];
        return r;
    }

    void check_axis(int k) const
    {
        if (k < 0 || k >= E_.n) throw DomainError("axis index " + std::to_string(k) + " out of range");
    }

    void check_axis(const Profile& p) const
    {
        if (auto* v = std::get_if<XiUs>(&p.kind)) check_axis(v->k);
        if (auto* v = std::get_if<XiSqUs>(&p.kind)) check_axis(v->k);
        if (auto* v = std::get_if<QUs>(&p.kind)) check_axis(v->k);
        if (auto* v = std::get_if<Shifted>(&p.kind)) check_axis(*v->base);
        if (auto* v = std::get_if<UBeta>(&p.kind); v && !(v->beta > -1.0))
            throw DomainError("UBeta: need beta > -1");
    }

    double interior_u1(std::span<const double> x) const
    {
        if (static_cast<int>(x.size()) != E_.n) throw DomainError("point has wrong dimension");
        const double u1 = 1.0 - E_.norm_sq(x);
        if (!(u1 > 0.0)) throw DomainError("point is not inside the ellipsoid");
        return u1;
    }

    std::span<const double> checked(std::span<const double> x) const
    {
        interior_u1(x);
        return x;
    }

    double lap_value(std::span<const double> x, double beta) const
    {
        if (auto p = lap_u_beta_polynomial(beta)) return (*p)(x);
        return lap_u_beta(x, beta);
    }

};

// The specialised displays for axes (1,...,1,a), divided by Gamma(1+s) k_{n,s}.
struct EccentricDisplays {
    QuadraticCoefficients p1_first;  // (1 - x_1) u_s
    QuadraticCoefficients p2_first;  // (1 - x_1)^2 u_s
    QuadraticCoefficients q_first;   // u_s (sum_{1<i<n} x_i^2 + a x_n^2)
    QuadraticCoefficients p1_last;   // (1 - sqrt(a) x_n) u_s
    QuadraticCoefficients p2_last;   // (1 - sqrt(a) x_n)^2 u_s
};

inline EccentricDisplays eccentric_displays(const JTable& t)
{
    const int n = t.n;
    const double s = t.s, a = t.axes[n - 1];
    const double J0 = t.J0, J1 = t.J1[0], J2 = t.J2[0], J1n = t.J1[n - 1], J2n = t.J2[n - 1];
    const double aMn1 = a * t.mixed(n - 1, 0);
    EccentricDisplays d{QuadraticCoefficients(n), QuadraticCoefficients(n), QuadraticCoefficients(n),
                        QuadraticCoefficients(n), QuadraticCoefficients(n)};

    d.p1_first.constant = J0;
    d.p1_first.linear[0] = -(J0 + 2 * s * J1);

    d.p2_first.constant = J0 - s * J1;
    d.p2_first.linear[0] = -2 * (J0 + 2 * s * J1);
    d.p2_first.quadratic[0] = J0 + 5 * s * J1 + 2 * s * (s - 1) * J2;
    for (int i = 1; i < n - 1; ++i) d.p2_first.quadratic[i] = s * (J1 + 2 * (s - 1) * t.mixed(i, 0));
    d.p2_first.quadratic[n - 1] = s * (J1 + 2 * (s - 1) * aMn1) * a;

    d.q_first.constant = -s * (J0 - J1);
    d.q_first.quadratic[0] = s * (J0 - J1 + 2 * (s - 1) * (J1 - J2));
    for (int i = 1; i < n - 1; ++i) {
        double cross = 0.0;
        for (int h = 1; h < n - 1; ++h)
            if (h != i) cross += t.mixed(h, i);
        d.q_first.quadratic[i] = (s + 1) * J0 + 4 * s * t.J1[i] - s * J1 + 2 * s * (s - 1) * t.J2[i]
                                 + 2 * s * (s - 1) * cross + 2 * s * (s - 1) * aMn1;
    }
    d.q_first.quadratic[n - 1] =
        ((s + 1) * J0 + 4 * s * J1n - s * J1 + 2 * s * (s - 1) * J1n - 2 * s * (s - 1) * aMn1) * a;

    d.p1_last.constant = J0;
    d.p1_last.linear[n - 1] = -(J0 + 2 * s * J1n) * std::sqrt(a);

    d.p2_last.constant = J0 - s * J1n;
    d.p2_last.linear[n - 1] = -2 * (J0 + 2 * s * J1n) * std::sqrt(a);
    d.p2_last.quadratic[n - 1] = (J0 + 5 * s * J1n + 2 * s * (s - 1) * J2n) * a;
    for (int i = 0; i < n - 1; ++i) d.p2_last.quadratic[i] = s * (J1n + 2 * (s - 1) / (n - 1) * (J1n - J2n));
    return d;
}

} // namespace fraclap
