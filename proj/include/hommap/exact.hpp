#pragma once

// Exact arithmetic for checking the coefficient recurrences: rationals, the
// quadratic field Q(sqrt(D)), and a direct polynomial recomposition of the
// defining equation f o S - S o Lambda truncated at the series order.

#include "hommap/linalg.hpp"
#include "hommap/manifold4d.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <vector>

namespace hommap::exact {

using Rational = boost::multiprecision::cpp_rational;

/// Rational scalar living in this namespace so that the generic solvers find
/// its pivot_magnitude through ADL.
struct Rat {
    Rational v{0};

    Rat() = default;
    Rat(int x) : v(x) {}
    Rat(Rational x) : v(std::move(x)) {}
    Rat(long long num, long long den) : v(Rational(num) / Rational(den)) {}

    double to_double() const { return static_cast<double>(v); }

    friend Rat operator+(const Rat& a, const Rat& b) { return Rat(a.v + b.v); }
    friend Rat operator-(const Rat& a, const Rat& b) { return Rat(a.v - b.v); }
    friend Rat operator-(const Rat& a) { return Rat(Rational(-a.v)); }
    friend Rat operator*(const Rat& a, const Rat& b) { return Rat(a.v * b.v); }
    friend Rat operator/(const Rat& a, const Rat& b) { return Rat(a.v / b.v); }
    friend bool operator==(const Rat& a, const Rat& b) { return a.v == b.v; }
    friend bool operator!=(const Rat& a, const Rat& b) { return a.v != b.v; }
    friend double pivot_magnitude(const Rat& x) { return std::abs(x.to_double()); }
};

/// p + q sqrt(D) for a fixed non-square D > 0.
template <long D>
struct QuadraticSurd {
    Rational p{0}, q{0};

    QuadraticSurd() = default;
    QuadraticSurd(int v) : p(v) {}
    QuadraticSurd(Rational p_, Rational q_ = 0) : p(std::move(p_)), q(std::move(q_)) {}

    QuadraticSurd conj() const { return {p, -q}; }
    Rational norm() const { return p * p - Rational(D) * q * q; }
    double to_double() const { return static_cast<double>(p) + static_cast<double>(q) * std::sqrt(double(D)); }

    friend QuadraticSurd operator+(const QuadraticSurd& a, const QuadraticSurd& b) { return {a.p + b.p, a.q + b.q}; }
    friend QuadraticSurd operator-(const QuadraticSurd& a, const QuadraticSurd& b) { return {a.p - b.p, a.q - b.q}; }
    friend QuadraticSurd operator-(const QuadraticSurd& a) { return {-a.p, -a.q}; }
    friend QuadraticSurd operator*(const QuadraticSurd& a, const QuadraticSurd& b)
    {
        return {a.p * b.p + Rational(D) * a.q * b.q, a.p * b.q + a.q * b.p};
    }
    friend QuadraticSurd operator/(const QuadraticSurd& a, const QuadraticSurd& b)
    {
        const Rational n = b.norm();
        QuadraticSurd t = a * b.conj();
        return {t.p / n, t.q / n};
    }
    friend bool operator==(const QuadraticSurd& a, const QuadraticSurd& b) { return a.p == b.p && a.q == b.q; }
    friend bool operator!=(const QuadraticSurd& a, const QuadraticSurd& b) { return !(a == b); }
    friend double pivot_magnitude(const QuadraticSurd& x)
    {
        // Magnitude via the conjugate product avoids cancellation for tiny
        // values: |x| = |N(x)| / |conj(x)|.
        if (x.p == 0 && x.q == 0)
            return 0.0;
        const double c = std::abs(x.conj().to_double());
        return c > 0.0 ? std::abs(static_cast<double>(x.norm())) / c : std::abs(x.to_double());
    }
};

template <class T>
bool is_zero(const T& x)
{
    return x == T(0);
}

// ---------------------------------------------------------------------------
// Univariate truncated polynomials.

template <class T>
std::vector<T> mul(const std::vector<T>& a, const std::vector<T>& b, int order)
{
    std::vector<T> out(order + 1, T(0));
    for (int i = 0; i <= order && i < static_cast<int>(a.size()); ++i) {
        if (is_zero(a[i]))
            continue;
        for (int j = 0; i + j <= order && j < static_cast<int>(b.size()); ++j)
            out[i + j] = out[i + j] + a[i] * b[j];
    }
    return out;
}

/// Coefficients of f(S(t)) - S(lambda t) for the planar map, up to `order`.
template <class T>
std::vector<std::vector<T>> planar_defect(const T& c, const T& delta, const T& lambda, const std::vector<T>& a,
                                          const std::vector<T>& b, int order)
{
    auto b3 = mul(mul(b, b, order), b, order);
    std::vector<T> r1(order + 1, T(0)), r2(order + 1, T(0));
    T lp = T(1);
    for (int n = 0; n <= order; ++n) {
        r1[n] = b[n] - lp * a[n];
        r2[n] = -delta * a[n] + c * b[n] + T(3) * b3[n] - lp * b[n];
        lp = lp * lambda;
    }
    return {r1, r2};
}

// ---------------------------------------------------------------------------
// Bivariate truncated polynomials on the triangular degree-major layout.

template <class T>
std::vector<T> mul2(const std::vector<T>& a, const std::vector<T>& b, int order)
{
    std::vector<T> out(tri_size(order), T(0));
    for (int d1 = 0; d1 <= order; ++d1)
        for (int m1 = 0; m1 <= d1; ++m1) {
            const T& x = a[tri_index(d1 - m1, m1)];
            if (is_zero(x))
                continue;
            for (int d2 = 0; d1 + d2 <= order; ++d2)
                for (int m2 = 0; m2 <= d2; ++m2) {
                    auto& o = out[tri_index(d1 - m1 + d2 - m2, m1 + m2)];
                    o = o + x * b[tri_index(d2 - m2, m2)];
                }
        }
    return out;
}

/// Coefficient grids of f(S(u,v)) - S(lA u, lB v) for the coupled map.
template <class T>
std::array<std::vector<T>, 4> coupled_defect(const T& c, const T& delta, const T& b, const T& lambda_a,
                                             const T& lambda_b, const std::array<std::vector<T>, 4>& g, int order)
{
    auto cube = [&](const std::vector<T>& x) { return mul2(mul2(x, x, order), x, order); };
    const auto c2 = cube(g[1]);
    const auto c4 = cube(g[3]);
    std::array<std::vector<T>, 4> r;
    for (auto& v : r)
        v.assign(tri_size(order), T(0));
    std::vector<T> pa(order + 1, T(1)), pb(order + 1, T(1));
    for (int k = 1; k <= order; ++k) {
        pa[k] = pa[k - 1] * lambda_a;
        pb[k] = pb[k - 1] * lambda_b;
    }
    for (int d = 0; d <= order; ++d)
        for (int m = 0; m <= d; ++m) {
            const int n = d - m;
            const std::size_t i = tri_index(n, m);
            const T L = pa[n] * pb[m];
            const T &x1 = g[0][i], &y1 = g[1][i], &x2 = g[2][i], &y2 = g[3][i];
            r[0][i] = y1 - L * x1;
            r[1][i] = c * y1 - delta * x1 + T(3) * c2[i] + b * (y1 - y2) - L * y1;
            r[2][i] = y2 - L * x2;
            r[3][i] = c * y2 - delta * x2 + T(3) * c4[i] - b * (y1 - y2) - L * y2;
        }
    return r;
}

template <class Grid>
bool all_zero(const Grid& grids)
{
    for (const auto& g : grids)
        for (const auto& x : g)
            if (!is_zero(x))
                return false;
    return true;
}

} // namespace hommap::exact
