#pragma once

#include <boost/math/special_functions/legendre.hpp>
#include <cmath>
#include <map>
#include <numbers>
#include <mutex>
#include <utility>
#include <vector>

#include "fraclap/errors.hpp"

namespace fraclap {

struct Rule1D {
    std::vector<double> x;
    std::vector<double> w;
};

// n-point Gauss-Legendre on [-1, 1], cached per n.
inline const Rule1D& gauss_legendre(int n)
{
    static std::map<int, Rule1D> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    if (n < 1) throw DomainError("gauss_legendre: need n >= 1");
    Rule1D r;
    auto zeros = boost::math::legendre_p_zeros<double>(n);
    for (double z : zeros) {
        double dp = boost::math::legendre_p_prime(n, z);
        double w = 2.0 / ((1.0 - z * z) * dp * dp);
        r.x.push_back(z);
        r.w.push_back(w);
        if (z != 0.0) {
            r.x.push_back(-z);
            r.w.push_back(w);
        }
    }
    return cache.emplace(n, std::move(r)).first->second;
}

// Composite rule: `per_panel` Gauss points on each [b[i], b[i+1]].
inline Rule1D composite_gauss(const std::vector<double>& breaks, int per_panel)
{
    const Rule1D& g = gauss_legendre(per_panel);
    Rule1D r;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double h = 0.5 * (breaks[i + 1] - breaks[i]);
        const double mid = 0.5 * (breaks[i + 1] + breaks[i]);
        for (std::size_t k = 0; k < g.x.size(); ++k) {
            r.x.push_back(mid + h * g.x[k]);
            r.w.push_back(h * g.w[k]);
        }
    }
    return r;
}

// Fixed-level tanh-sinh on [a, b]; f(x, dist) receives the distance to the
// nearer endpoint so that endpoint singularities can be evaluated accurately.
template <class F>
double tanh_sinh_fixed(F&& f, double a, double b, double h = 1.0 / 16.0, double tmax = 3.2)
{
    const double half = 0.5 * (b - a);
    const double hp = 0.5 * std::numbers::pi;
    double sum = 0.0;
    const int K = static_cast<int>(std::ceil(tmax / h));
    for (int k = -K; k <= K; ++k) {
        const double t = k * h;
        const double u = hp * std::sinh(t);
        const double ch = std::cosh(u);
        // 1 - |x| on the reference interval, without cancellation
        const double comp = 1.0 / (std::exp(std::abs(u)) * ch);
        const double wt = hp * std::cosh(t) / (ch * ch);
        if (comp <= 0.0) continue;
        const double dist = half * comp;
        const double x = t < 0 ? a + dist : b - dist;
        sum += wt * f(x, dist);
    }
    return sum * h * half;
}

} // namespace fraclap
