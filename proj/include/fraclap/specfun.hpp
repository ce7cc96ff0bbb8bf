#pragma once

#include <cmath>
#include <algorithm>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <numbers>

#include "fraclap/errors.hpp"

namespace fraclap {

inline bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }
inline bool is_integer(double x) { return std::isfinite(x) && x == std::floor(x); }

// Gamma(z); negative non-integer arguments are recursed up from (0,1].
inline double gamma(double z)
{
    if (std::isnan(z)) return z;
    if (is_nonpositive_integer(z))
        throw PoleError("gamma: pole at z = " + detail::fmt_double(z));
    if (z > 0.0) return std::tgamma(z);
    double denom = 1.0;
    double t = z;
    while (t <= 0.0) {
        denom *= t;
        t += 1.0;
    }
    return std::tgamma(t) / denom;
}

// 1/Gamma(z), exactly zero at the poles.
inline double gamma_reciprocal(double z)
{
    if (is_nonpositive_integer(z)) return 0.0;
    if (z > 171.0) return std::exp(-std::lgamma(z));
    return 1.0 / gamma(z);
}

// log|Gamma(z)| and the sign of Gamma(z).
inline double lgamma_signed(double z, int& sign)
{
    if (is_nonpositive_integer(z))
        throw PoleError("lgamma: pole at z = " + detail::fmt_double(z));
    sign = 1;
    if (z < 0.0 && static_cast<long long>(std::floor(z)) % 2 != 0) sign = -1;
    return std::lgamma(z);
}

inline double beta(double p, double q)
{
    int sp, sq, spq;
    double lp = lgamma_signed(p, sp);
    double lq = lgamma_signed(q, sq);
    if (is_nonpositive_integer(p + q)) return 0.0;
    double lpq = lgamma_signed(p + q, spq);
    return sp * sq * spq * std::exp(lp + lq - lpq);
}

inline double pochhammer(double q, int k)
{
    if (k < 0) throw DomainError("pochhammer: negative k");
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= q + i;
    return r;
}

inline double binomial(int n, int k)
{
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return std::round(r);
}

struct Hyp2F1Args {
    double a = 0.0;
    double b = 0.0;
    double c = 1.0;
    double z = 0.0;
};

struct Hyp2F1Options {
    std::size_t max_terms = 1000000;
    double rel_tol = std::numeric_limits<double>::epsilon();
};

namespace detail {

inline double log1p_over(double u) { return u == 0.0 ? 1.0 : std::log1p(u) / u; }
inline double expm1_over(double v) { return v == 0.0 ? 1.0 : std::expm1(v) / v; }

// [lnGamma(x+eps) - lnGamma(x)] / eps, with the eps -> 0 limit psi(x).
// x and x + eps must not be separated by a pole.
inline double lgamma_diff_over_eps(double x, double eps)
{
    double shift = 0.0;
    while (x < 15.0) {
        shift += log1p_over(eps / x) / x;
        x += 1.0;
    }
    const double u = eps / x;
    double r = (x - 0.5) / x * log1p_over(u) + std::log(x + eps) - 1.0;
    // B_{2k} / (2k (2k-1))
    static constexpr double bern[] = {1.0 / 12.0,         -1.0 / 360.0,   1.0 / 1260.0,
                                      -1.0 / 1680.0,      1.0 / 1188.0,   -691.0 / 360360.0,
                                      1.0 / 156.0,        -3617.0 / 122400.0};
    double xp = 1.0 / x;
    for (int k = 1; k <= 8; ++k) {
        const double e = 1.0 - 2.0 * k;
        const double v = e * std::log1p(u);
        r += bern[k - 1] * xp * (expm1_over(v) * e * log1p_over(u)) / x;
        xp /= x * x;
    }
    return r - shift;
}

inline double hyp2f1_terminating(double a, double b, double c, double z)
{
    double na = is_nonpositive_integer(a) ? -a : std::numeric_limits<double>::infinity();
    double nb = is_nonpositive_integer(b) ? -b : std::numeric_limits<double>::infinity();
    const int N = static_cast<int>(std::min(na, nb));
    if (is_nonpositive_integer(c) && -c < N)
        throw PoleError("hyp2f1: c is a nonpositive integer before the series terminates");
    double sum = 1.0, term = 1.0;
    for (int k = 0; k < N; ++k) {
        term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * z;
        sum += term;
    }
    return sum;
}

inline double hyp2f1_series(double a, double b, double c, double z, const Hyp2F1Options& opt = {})
{
    if (is_nonpositive_integer(a) || is_nonpositive_integer(b))
        return hyp2f1_terminating(a, b, c, z);
    if (is_nonpositive_integer(c)) throw PoleError("hyp2f1: c is a nonpositive integer");
    double sum = 1.0, term = 1.0;
    for (std::size_t k = 0; k < opt.max_terms; ++k) {
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
        sum += term;
        if (std::abs(term) <= opt.rel_tol * std::abs(sum) && k > 2) return sum;
    }
    throw NonConvergence("hyp2f1: series did not converge, z = " + fmt_double(z));
}

// Some x + j and x + j + eps (j >= 0) lie on opposite sides of a pole.
inline bool straddles_pole(double x, double eps)
{
    const double lo = std::min(x, x + eps), hi = std::max(x, x + eps);
    return std::ceil(lo) <= std::min(hi, 0.0);
}

// Tail of the 1-z expansion when c-a-b = N + eps with N >= 0 and |eps| small.
// Both halves of the connection formula are folded into one series whose terms
// stay finite as eps -> 0, so the logarithmic case is just eps == 0.
inline double hyp2f1_near_integer(double a, double b, double c, double w, int N, double eps,
                                  const Hyp2F1Options& opt)
{
    const double m = N + eps;
    const double gc = gamma(c);
    double finite = 0.0;
    if (N > 0) {
        double sum = 0.0, term = 1.0;
        for (int k = 0; k < N; ++k) {
            sum += term;
            if (k + 1 < N) term *= (a + k) * (b + k) / ((1.0 - m + k) * (k + 1.0)) * w;
        }
        finite = gc * gamma(m) * gamma_reciprocal(c - a) * gamma_reciprocal(c - b) * sum;
    }
    const double G = gc * gamma_reciprocal(a + N + eps) * gamma_reciprocal(b + N + eps);
    if (G == 0.0) return finite;
    if (straddles_pole(a + N, eps) || straddles_pole(b + N, eps))
        throw NonConvergence("hyp2f1: parameters too close to a pole for the 1-z expansion");

    const double sinc_inv =
        eps == 0.0 ? 1.0 : std::numbers::pi * eps / std::sin(std::numbers::pi * eps);
    const double xa = a + N, xb = b + N;
    double Da = lgamma_diff_over_eps(xa, eps);
    double Db = lgamma_diff_over_eps(xb, eps);
    double D1 = lgamma_diff_over_eps(1.0 + N, eps);
    double De = lgamma_diff_over_eps(1.0 - eps, eps);
    const double lw = std::log(w);

    double P = pochhammer(a, N) * pochhammer(b, N) * gamma_reciprocal(N + 1.0)
               * gamma_reciprocal(1.0 - eps);
    double sum = 0.0;
    for (std::size_t j = 0; j < opt.max_terms; ++j) {
        const double L = Da + Db + lw - D1 - De;
        const double t = -P * L * expm1_over(eps * L);
        sum += t;
        if (j > 2 && std::abs(t) <= opt.rel_tol * std::abs(sum)) {
            const double sign = (N % 2 == 0) ? 1.0 : -1.0;
            return finite + sign * sinc_inv * G * std::pow(w, N) * sum;
        }
        const double jj = static_cast<double>(j);
        P *= (xa + jj) * (xb + jj) * w / ((1.0 + N + jj) * (1.0 + jj - eps));
        Da += log1p_over(eps / (xa + jj)) / (xa + jj);
        Db += log1p_over(eps / (xb + jj)) / (xb + jj);
        D1 += log1p_over(eps / (1.0 + N + jj)) / (1.0 + N + jj);
        De += log1p_over(eps / (1.0 - eps + jj)) / (1.0 - eps + jj);
    }
    throw NonConvergence("hyp2f1: logarithmic series did not converge");
}

// The z -> 1-z connection formula; valid for any z < 1, accurate for z > 0.5.
inline double hyp2f1_reflected(double a, double b, double c, double z, const Hyp2F1Options& opt = {})
{
    const double w = 1.0 - z;
    const double m = c - a - b;
    const double Nr = std::round(m);
    const double eps = m - Nr;
    if (std::abs(eps) > 0.1) {
        double t1 = 0.0, t2 = 0.0;
        const double g1 = gamma_reciprocal(c - a) * gamma_reciprocal(c - b);
        if (g1 != 0.0) t1 = gamma(c) * gamma(m) * g1 * hyp2f1_series(a, b, 1.0 - m, w, opt);
        const double g2 = gamma_reciprocal(a) * gamma_reciprocal(b);
        if (g2 != 0.0)
            t2 = std::pow(w, m) * gamma(c) * gamma(-m) * g2 * hyp2f1_series(c - a, c - b, 1.0 + m, w, opt);
        return t1 + t2;
    }
    if (Nr < 0.0) {
        // Euler's transformation flips the sign of c - a - b.
        return std::pow(w, m) * hyp2f1_reflected(c - a, c - b, c, z, opt);
    }
    const int N = static_cast<int>(Nr);
    return hyp2f1_near_integer(a, b, c, w, N, eps, opt);
}

} // namespace detail

inline double hyp2f1(const Hyp2F1Args& p, const Hyp2F1Options& opt = {})
{
    const double a = p.a, b = p.b, c = p.c, z = p.z;
    if (!(z <= 1.0)) throw DomainError("hyp2f1: z must be <= 1, got " + detail::fmt_double(z));
    if (is_nonpositive_integer(a) || is_nonpositive_integer(b))
        return detail::hyp2f1_terminating(a, b, c, z);
    if (is_nonpositive_integer(c)) throw PoleError("hyp2f1: c is a nonpositive integer");
    if (z == 0.0) return 1.0;
    if (z == 1.0) {
        if (c - a - b <= 0.0) throw DomainError("hyp2f1: divergent at z = 1");
        return gamma(c) * gamma(c - a - b) * gamma_reciprocal(c - a) * gamma_reciprocal(c - b);
    }
    if (z < -0.5) {
        // Pfaff: lands in (1/3, 1)
        return std::pow(1.0 - z, -a) * hyp2f1({a, c - b, c, z / (z - 1.0)}, opt);
    }
    if (z <= 0.5) return detail::hyp2f1_series(a, b, c, z, opt);
    return detail::hyp2f1_reflected(a, b, c, z, opt);
}

inline double hyp2f1(double a, double b, double c, double z) { return hyp2f1(Hyp2F1Args{a, b, c, z}); }

// Normalization of the hypersingular representation with differences of order 2m.
inline double c_nms(int n, int m, double s)
{
    if (n < 1) throw DomainError("c_nms: n must be >= 1");
    if (m < 1) throw DomainError("c_nms: m must be >= 1");
    if (!(s > 0.0) || !(s < m)) throw DomainError("c_nms: need 0 < s < m");
    const double pi = std::numbers::pi;
    const double half_n = 0.5 * n;
    if (!is_integer(s)) {
        double sum = 0.0;
        for (int k = 1; k <= m; ++k)
            sum += ((k % 2) ? -1.0 : 1.0) * binomial(2 * m, m - k) * std::pow(k, 2.0 * s);
        return std::pow(4.0, s) * gamma(half_n + s) / (std::pow(pi, half_n) * gamma(-s)) / sum;
    }
    if (s > m - 1) throw DomainError("c_nms: integer s requires s <= m - 1");
    const int si = static_cast<int>(s);
    double sum = 0.0;
    for (int k = 2; k <= m; ++k) {
        const int e = k - si + 1;
        sum += ((e % 2 != 0) ? -1.0 : 1.0) * binomial(2 * m, m - k) * std::pow(k, 2.0 * s) * std::log(k);
    }
    return std::pow(4.0, s) * gamma(half_n + s) * gamma(s + 1.0) / (2.0 * std::pow(pi, half_n)) / sum;
}

inline double k_ns(int n, double s)
{
    if (n < 1) throw DomainError("k_ns: n must be >= 1");
    if (!(s > 0.0)) throw DomainError("k_ns: s must be > 0");
    return std::pow(2.0, 2.0 * s - 1.0) * gamma(0.5 * n + s) / std::pow(std::numbers::pi, 0.5 * n);
}

} // namespace fraclap
