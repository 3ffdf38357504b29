#pragma once

// Small dense fixed-size linear algebra. Everything here is generic in the
// scalar so that the coefficient recurrences can also run in exact arithmetic.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <utility>

namespace hommap {

template <std::size_t N, class T = double>
using Vec = std::array<T, N>;

template <std::size_t R, std::size_t C, class T = double>
using Matrix = std::array<std::array<T, C>, R>;

/// Magnitude used for pivot selection and singularity tests. Exact scalar
/// types provide their own overload found by ADL.
inline double pivot_magnitude(double x) noexcept { return std::abs(x); }

template <std::size_t N, class T>
struct LinearSolve {
    Vec<N, T> x;
    T det;
};

/// Gaussian elimination with partial pivoting. Returns the solution together
/// with the determinant of `a`; when `a` is exactly singular the solution is
/// left zero and `det` is zero.
template <std::size_t N, class T>
LinearSolve<N, T> solve(Matrix<N, N, T> a, Vec<N, T> rhs)
{
    T det = T(1);
    for (std::size_t col = 0; col < N; ++col) {
        std::size_t piv = col;
        double best = pivot_magnitude(a[col][col]);
        for (std::size_t r = col + 1; r < N; ++r) {
            double m = pivot_magnitude(a[r][col]);
            if (m > best) {
                best = m;
                piv = r;
            }
        }
        if (a[piv][col] == T(0))
            return {Vec<N, T>{}, T(0)};
        if (piv != col) {
            std::swap(a[piv], a[col]);
            std::swap(rhs[piv], rhs[col]);
            det = -det;
        }
        det = det * a[col][col];
        for (std::size_t r = col + 1; r < N; ++r) {
            if (a[r][col] == T(0))
                continue;
            T f = a[r][col] / a[col][col];
            for (std::size_t k = col; k < N; ++k)
                a[r][k] = a[r][k] - f * a[col][k];
            rhs[r] = rhs[r] - f * rhs[col];
        }
    }
    Vec<N, T> x{};
    for (std::size_t i = N; i-- > 0;) {
        T s = rhs[i];
        for (std::size_t k = i + 1; k < N; ++k)
            s = s - a[i][k] * x[k];
        x[i] = s / a[i][i];
    }
    return {x, det};
}

template <std::size_t N>
double determinant(const Matrix<N, N>& a)
{
    return solve(a, Vec<N>{}).det;
}

template <std::size_t R, std::size_t K, std::size_t C>
Matrix<R, C> operator*(const Matrix<R, K>& a, const Matrix<K, C>& b)
{
    Matrix<R, C> out{};
    for (std::size_t i = 0; i < R; ++i)
        for (std::size_t j = 0; j < C; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < K; ++k)
                s += a[i][k] * b[k][j];
            out[i][j] = s;
        }
    return out;
}

template <std::size_t R, std::size_t C>
Vec<R> operator*(const Matrix<R, C>& a, const Vec<C>& v)
{
    Vec<R> out{};
    for (std::size_t i = 0; i < R; ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < C; ++k)
            s += a[i][k] * v[k];
        out[i] = s;
    }
    return out;
}

template <std::size_t N>
Vec<N> operator+(Vec<N> a, const Vec<N>& b)
{
    for (std::size_t i = 0; i < N; ++i)
        a[i] += b[i];
    return a;
}

template <std::size_t N>
Vec<N> operator-(Vec<N> a, const Vec<N>& b)
{
    for (std::size_t i = 0; i < N; ++i)
        a[i] -= b[i];
    return a;
}

template <std::size_t N>
Vec<N> operator*(double s, Vec<N> a)
{
    for (auto& x : a)
        x *= s;
    return a;
}

template <std::size_t N>
Vec<N> operator-(Vec<N> a)
{
    for (auto& x : a)
        x = -x;
    return a;
}

template <std::size_t N>
double norm(const Vec<N>& v)
{
    double s = 0.0;
    for (double x : v)
        s += x * x;
    return std::sqrt(s);
}

template <std::size_t N>
double max_abs(const Vec<N>& v)
{
    double m = 0.0;
    for (double x : v)
        m = std::max(m, std::abs(x));
    return m;
}

template <std::size_t N>
bool all_finite(const Vec<N>& v)
{
    for (double x : v)
        if (!std::isfinite(x))
            return false;
    return true;
}

template <std::size_t N>
Matrix<N, N> identity()
{
    Matrix<N, N> m{};
    for (std::size_t i = 0; i < N; ++i)
        m[i][i] = 1.0;
    return m;
}

template <std::size_t R, std::size_t C>
Vec<R> column(const Matrix<R, C>& m, std::size_t j)
{
    Vec<R> v{};
    for (std::size_t i = 0; i < R; ++i)
        v[i] = m[i][j];
    return v;
}

} // namespace hommap
