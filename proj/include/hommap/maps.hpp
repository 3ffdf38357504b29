#pragma once

// The planar cubic generalized Henon map
//     f(x, y) = (y, -delta*x + c*y + 3*y^3)
// and the four-dimensional map built from two copies of it with linear
// coupling b. Both have a hyperbolic fixed point at the origin for the
// parameter ranges used throughout the library.

#include "hommap/error.hpp"
#include "hommap/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace hommap {

struct MapParams2D {
    double c = -2.5;
    double delta = 1.0;
};

struct MapParams4D {
    double c = -2.5;
    double delta = 1.0;
    double b = 0.1;
};

using Point2D = Vec<2>;
using Point4D = Vec<4>;

/// Which normal mode of the linearization an eigenpair belongs to. The 4-D
/// map decouples at the origin into a symmetric (y1 = y2) and an
/// antisymmetric (y1 = -y2) mode.
enum class Mode { planar, symmetric, antisymmetric };

template <std::size_t N>
struct EigenPair {
    double value = 0.0;
    Vec<N> vector{};
    Mode mode = Mode::planar;
};

/// Eigen-decomposition of the origin Jacobian split by stability. Within each
/// group pairs are ordered by descending |lambda|. Unstable eigenvectors are
/// oriented with a positive first nonzero component, stable ones with a
/// negative first nonzero component; at delta = 1 this makes the stable
/// vector of the planar map the coordinate swap of the unstable one.
template <std::size_t N>
struct SpectrumAtOrigin {
    std::vector<EigenPair<N>> unstable;
    std::vector<EigenPair<N>> stable;
};

namespace detail {

inline std::string fmt_double(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// Real roots of lambda^2 - p*lambda + q = 0, ordered by descending modulus.
/// Uses the cancellation-free form of the quadratic formula.
inline std::pair<double, double> mode_roots(double p, double q)
{
    double disc = p * p - 4.0 * q;
    double sq = std::sqrt(disc);
    double big = 0.5 * (p + std::copysign(sq, p));
    if (big == 0.0)
        return {0.0, 0.0};
    return {big, q / big};
}

template <std::size_t N>
Vec<N> orient(Vec<N> v, bool unstable)
{
    for (double x : v) {
        if (x == 0.0)
            continue;
        bool positive = x > 0.0;
        if (positive != unstable)
            v = -v;
        break;
    }
    return v;
}

template <class Point>
Point checked(Point p, const char* what)
{
    if (!all_finite(p))
        throw DivergenceError(std::string(what) + ": iterate is no longer finite");
    return p;
}

} // namespace detail

inline void validate(const MapParams2D& p)
{
    if (!(p.delta > 0.0 && p.delta <= 1.0))
        throw ConfigError("delta must lie in (0, 1], got " + detail::fmt_double(p.delta));
    if (!(p.c * p.c - 4.0 * p.delta > 0.0))
        throw NonHyperbolicError("origin is not a real saddle: c^2 - 4 delta <= 0");
}

inline void validate(const MapParams4D& p)
{
    if (!(p.delta > 0.0 && p.delta <= 1.0))
        throw ConfigError("delta must lie in (0, 1], got " + detail::fmt_double(p.delta));
    if (!(p.b >= 0.0))
        throw ConfigError("coupling b must be non-negative, got " + detail::fmt_double(p.b));
    for (double trace : {p.c, p.c + 2.0 * p.b}) {
        if (!(trace * trace - 4.0 * p.delta > 0.0))
            throw NonHyperbolicError("origin is not hyperbolic: a mode quadratic has complex roots");
        auto [big, small] = detail::mode_roots(trace, p.delta);
        if (!(std::abs(big) > 1.0 && std::abs(small) < 1.0))
            throw NonHyperbolicError("origin is not hyperbolic: a mode eigenvalue lies on the unit circle");
    }
}

// ---------------------------------------------------------------------------
// Planar map

inline Point2D image(const MapParams2D& p, const Point2D& pt)
{
    const double x = pt[0], y = pt[1];
    return detail::checked(Point2D{y, -p.delta * x + p.c * y + 3.0 * y * y * y}, "map2d");
}

inline Point2D preimage(const MapParams2D& p, const Point2D& pt)
{
    if (p.delta == 0.0)
        throw NonInvertibleError("map is not invertible for delta = 0");
    const double x = pt[0], y = pt[1];
    return detail::checked(Point2D{(p.c * x - y + 3.0 * x * x * x) / p.delta, x}, "map2d inverse");
}

inline Matrix<2, 2> jacobian(const MapParams2D& p, const Point2D& pt)
{
    const double y = pt[1];
    return {{{0.0, 1.0}, {-p.delta, p.c + 9.0 * y * y}}};
}

/// Differential of the inverse map evaluated at `pt` (a point of the image).
inline Matrix<2, 2> inverse_jacobian(const MapParams2D& p, const Point2D& pt)
{
    if (p.delta == 0.0)
        throw NonInvertibleError("map is not invertible for delta = 0");
    const double x = pt[0];
    return {{{(p.c + 9.0 * x * x) / p.delta, -1.0 / p.delta}, {1.0, 0.0}}};
}

inline std::vector<Point2D> fixed_points(const MapParams2D& p)
{
    std::vector<Point2D> out{{0.0, 0.0}};
    const double r = 1.0 - p.c + p.delta;
    if (r > 0.0) {
        const double s = std::sqrt(r / 3.0);
        out.push_back({s, s});
        out.push_back({-s, -s});
    }
    return out;
}

inline SpectrumAtOrigin<2> eigen_origin(const MapParams2D& p)
{
    if (!(p.c * p.c - 4.0 * p.delta > 0.0))
        throw NonHyperbolicError("origin is not a real saddle: c^2 - 4 delta <= 0");
    auto [big, small] = detail::mode_roots(p.c, p.delta);
    if (!(std::abs(big) > 1.0 && std::abs(small) < 1.0))
        throw NonHyperbolicError("origin is not a saddle: an eigenvalue lies on the unit circle");
    auto vec = [](double lambda, bool unstable) {
        const double n = std::sqrt(1.0 + lambda * lambda);
        return detail::orient(Point2D{1.0 / n, lambda / n}, unstable);
    };
    SpectrumAtOrigin<2> s;
    s.unstable.push_back({big, vec(big, true), Mode::planar});
    s.stable.push_back({small, vec(small, false), Mode::planar});
    return s;
}

// ---------------------------------------------------------------------------
// Coupled map

inline Point4D image(const MapParams4D& p, const Point4D& pt)
{
    const double x1 = pt[0], y1 = pt[1], x2 = pt[2], y2 = pt[3];
    const double coupling = p.b * (y1 - y2);
    return detail::checked(Point4D{y1, p.c * y1 - p.delta * x1 + 3.0 * y1 * y1 * y1 + coupling,
                                   y2, p.c * y2 - p.delta * x2 + 3.0 * y2 * y2 * y2 - coupling},
                           "map4d");
}

inline Point4D preimage(const MapParams4D& p, const Point4D& pt)
{
    if (p.delta == 0.0)
        throw NonInvertibleError("map is not invertible for delta = 0");
    const double x1 = pt[0], y1 = pt[1], x2 = pt[2], y2 = pt[3];
    const double cb = p.c + p.b;
    return detail::checked(Point4D{(cb * x1 + 3.0 * x1 * x1 * x1 - p.b * x2 - y1) / p.delta, x1,
                                   (cb * x2 + 3.0 * x2 * x2 * x2 - p.b * x1 - y2) / p.delta, x2},
                           "map4d inverse");
}

inline Matrix<4, 4> jacobian(const MapParams4D& p, const Point4D& pt)
{
    const double y1 = pt[1], y2 = pt[3];
    return {{{0.0, 1.0, 0.0, 0.0},
             {-p.delta, p.c + p.b + 9.0 * y1 * y1, 0.0, -p.b},
             {0.0, 0.0, 0.0, 1.0},
             {0.0, -p.b, -p.delta, p.c + p.b + 9.0 * y2 * y2}}};
}

inline Matrix<4, 4> inverse_jacobian(const MapParams4D& p, const Point4D& pt)
{
    if (p.delta == 0.0)
        throw NonInvertibleError("map is not invertible for delta = 0");
    const double x1 = pt[0], x2 = pt[2];
    const double cb = p.c + p.b;
    return {{{(cb + 9.0 * x1 * x1) / p.delta, -1.0 / p.delta, -p.b / p.delta, 0.0},
             {1.0, 0.0, 0.0, 0.0},
             {-p.b / p.delta, 0.0, (cb + 9.0 * x2 * x2) / p.delta, -1.0 / p.delta},
             {0.0, 0.0, 1.0, 0.0}}};
}

inline SpectrumAtOrigin<4> eigen_origin(const MapParams4D& p)
{
    SpectrumAtOrigin<4> s;
    for (Mode mode : {Mode::symmetric, Mode::antisymmetric}) {
        const double trace = mode == Mode::symmetric ? p.c : p.c + 2.0 * p.b;
        if (!(trace * trace - 4.0 * p.delta > 0.0))
            throw NonHyperbolicError("origin is not hyperbolic: a mode quadratic has complex roots");
        auto [big, small] = detail::mode_roots(trace, p.delta);
        if (!(std::abs(big) > 1.0 && std::abs(small) < 1.0))
            throw NonHyperbolicError("origin is not hyperbolic: a mode eigenvalue lies on the unit circle");
        const double sign = mode == Mode::symmetric ? 1.0 : -1.0;
        auto vec = [sign](double lambda, bool unstable) {
            const double n = std::sqrt(2.0 * (1.0 + lambda * lambda));
            return detail::orient(Point4D{1.0 / n, lambda / n, sign / n, sign * lambda / n}, unstable);
        };
        s.unstable.push_back({big, vec(big, true), mode});
        s.stable.push_back({small, vec(small, false), mode});
    }
    auto by_modulus = [](const auto& a, const auto& b) { return std::abs(a.value) > std::abs(b.value); };
    std::stable_sort(s.unstable.begin(), s.unstable.end(), by_modulus);
    std::stable_sort(s.stable.begin(), s.stable.end(), by_modulus);
    return s;
}

} // namespace hommap
