#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <vector>

#include "fraclap/errors.hpp"

namespace fraclap {

// Sparse polynomial in n real variables.
class Polynomial {
public:
    using Monomial = std::vector<int>;

    explicit Polynomial(int n = 0) : n_(n) {}

    static Polynomial constant(int n, double c)
    {
        Polynomial p(n);
        p.add_term(Monomial(n, 0), c);
        return p;
    }

    static Polynomial variable(int n, int i, double c = 1.0)
    {
        Monomial m(n, 0);
        m[i] = 1;
        Polynomial p(n);
        p.add_term(m, c);
        return p;
    }

    int dim() const { return n_; }
    const std::map<Monomial, double>& terms() const { return terms_; }

    void add_term(const Monomial& m, double c)
    {
        if (c == 0.0) return;
        terms_[m] += c;
    }

    double coefficient(const Monomial& m) const
    {
        auto it = terms_.find(m);
        return it == terms_.end() ? 0.0 : it->second;
    }

    int degree() const
    {
        int d = 0;
        for (auto& [m, c] : terms_) {
            if (c == 0.0) continue;
            int t = 0;
            for (int e : m) t += e;
            d = std::max(d, t);
        }
        return d;
    }

    Polynomial& operator+=(const Polynomial& o)
    {
        for (auto& [m, c] : o.terms_) add_term(m, c);
        return *this;
    }
    Polynomial& operator-=(const Polynomial& o)
    {
        for (auto& [m, c] : o.terms_) add_term(m, -c);
        return *this;
    }
    Polynomial& operator*=(double k)
    {
        for (auto& [m, c] : terms_) c *= k;
        return *this;
    }

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(Polynomial a, double k) { return a *= k; }
    friend Polynomial operator*(double k, Polynomial a) { return a *= k; }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b)
    {
        Polynomial r(std::max(a.n_, b.n_));
        for (auto& [ma, ca] : a.terms_)
            for (auto& [mb, cb] : b.terms_) {
                Monomial m(ma);
                for (std::size_t i = 0; i < m.size(); ++i) m[i] += mb[i];
                r.add_term(m, ca * cb);
            }
        return r;
    }

    Polynomial derivative(int i) const
    {
        Polynomial r(n_);
        for (auto& [m, c] : terms_) {
            if (m[i] == 0) continue;
            Monomial d(m);
            d[i] -= 1;
            r.add_term(d, c * m[i]);
        }
        return r;
    }

    double operator()(std::span<const double> x) const
    {
        double acc = 0.0;
        for (auto& [m, c] : terms_) {
            double t = c;
            for (int i = 0; i < n_; ++i)
                for (int e = 0; e < m[i]; ++e) t *= x[i];
            acc += t;
        }
        return acc;
    }

private:
    int n_;
    std::map<Monomial, double> terms_;
};

// c + sum_i l_i x_i + sum_i q_i x_i^2 (no cross terms).
struct QuadraticCoefficients {
    double constant = 0.0;
    std::vector<double> linear;
    std::vector<double> quadratic;

    explicit QuadraticCoefficients(int n = 0) : linear(n, 0.0), quadratic(n, 0.0) {}

    int dim() const { return static_cast<int>(linear.size()); }

    double operator()(std::span<const double> x) const
    {
        double r = constant;
        for (int i = 0; i < dim(); ++i) r += (linear[i] + quadratic[i] * x[i]) * x[i];
        return r;
    }

    QuadraticCoefficients& operator*=(double k)
    {
        constant *= k;
        for (auto& v : linear) v *= k;
        for (auto& v : quadratic) v *= k;
        return *this;
    }
    QuadraticCoefficients& operator+=(const QuadraticCoefficients& o)
    {
        constant += o.constant;
        for (int i = 0; i < dim(); ++i) {
            linear[i] += o.linear[i];
            quadratic[i] += o.quadratic[i];
        }
        return *this;
    }
    friend QuadraticCoefficients operator*(QuadraticCoefficients a, double k) { return a *= k; }
    friend QuadraticCoefficients operator*(double k, QuadraticCoefficients a) { return a *= k; }
    friend QuadraticCoefficients operator+(QuadraticCoefficients a, const QuadraticCoefficients& b) { return a += b; }
    friend QuadraticCoefficients operator-(QuadraticCoefficients a, const QuadraticCoefficients& b)
    {
        return a += b * -1.0;
    }

    Polynomial to_polynomial() const
    {
        const int n = dim();
        Polynomial p = Polynomial::constant(n, constant);
        for (int i = 0; i < n; ++i) {
            Polynomial::Monomial m(n, 0);
            m[i] = 1;
            p.add_term(m, linear[i]);
            m[i] = 2;
            p.add_term(m, quadratic[i]);
        }
        return p;
    }

    // Throws unless p has degree <= 2 and no cross terms (up to `tol`).
    static QuadraticCoefficients from_polynomial(const Polynomial& p, double tol = 0.0)
    {
        const int n = p.dim();
        QuadraticCoefficients q(n);
        for (auto& [m, c] : p.terms()) {
            int deg = 0, nz = 0, axis = -1;
            for (int i = 0; i < n; ++i)
                if (m[i] > 0) {
                    deg += m[i];
                    ++nz;
                    axis = i;
                }
            if (deg == 0)
                q.constant += c;
            else if (nz == 1 && deg == 1)
                q.linear[axis] += c;
            else if (nz == 1 && deg == 2)
                q.quadratic[axis] += c;
            else if (std::abs(c) > tol)
                throw DomainError("from_polynomial: not a diagonal quadratic");
        }
        return q;
    }
};

} // namespace fraclap
