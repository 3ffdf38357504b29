#pragma once

// One-dimensional stable and unstable manifolds of the planar map's origin as
// truncated power series S(t) = (sum a_n t^n, sum b_n t^n) satisfying the
// conjugacy f(S(t)) = S(lambda t).

#include "hommap/error.hpp"
#include "hommap/linalg.hpp"
#include "hommap/maps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace hommap {

enum class Branch { unstable, stable };

inline const char* to_string(Branch b) { return b == Branch::unstable ? "unstable" : "stable"; }

/// Resonance is declared when a coefficient system's determinant falls below this.
inline constexpr double resonance_threshold = 1e-12;

template <class T>
struct PlanarCoefficients {
    std::vector<T> a;
    std::vector<T> b;
};

/// Order-by-order solution of the conjugacy equation for the planar map.
/// For n >= 2 the pair (a_n, b_n) solves
///     -lambda^n a_n + b_n = 0
///     -delta a_n + (c - lambda^n) b_n = -3 [b^3]_n
/// where [b^3]_n only involves b_1 .. b_{n-2} because b_0 = 0.
/// Works for any field-like scalar; `pivot_magnitude` must be callable on it.
template <class T>
PlanarCoefficients<T> solve_planar_coefficients(const T& c, const T& delta, const T& lambda,
                                                const T& a1, const T& b1, int order)
{
    PlanarCoefficients<T> out;
    out.a.assign(order + 1, T(0));
    out.b.assign(order + 1, T(0));
    if (order >= 1) {
        out.a[1] = a1;
        out.b[1] = b1;
    }
    T lambda_pow = lambda;
    const auto& b = out.b;
    for (int n = 2; n <= order; ++n) {
        lambda_pow = lambda_pow * lambda;
        T cube = T(0);
        for (int i = 1; i <= n - 2; ++i)
            for (int j = 1; i + j <= n - 1; ++j)
                cube = cube + b[i] * b[j] * b[n - i - j];
        Matrix<2, 2, T> m{{{-lambda_pow, T(1)}, {-delta, c - lambda_pow}}};
        Vec<2, T> rhs{T(0), T(-3) * cube};
        auto sol = solve(m, rhs);
        if (pivot_magnitude(sol.det) < resonance_threshold)
            throw ResonanceError("resonant coefficient system at order n = " + std::to_string(n), n);
        out.a[n] = sol.x[0];
        out.b[n] = sol.x[1];
    }
    return out;
}

struct Series2D {
    static constexpr std::size_t dim = 2;
    static constexpr std::size_t arg_dim = 1;
    using params_type = MapParams2D;
    using point_type = Point2D;
    using args_type = Vec<1>;

    Branch branch = Branch::unstable;
    double lambda = 0.0;
    std::vector<double> coeffs_a;
    std::vector<double> coeffs_b;
    MapParams2D params;
    int order = 0;
};

/// Builds the degree-`order` parametrization of the requested branch. The
/// order-one term is `scale` times the oriented unit eigenvector; rescaling
/// by s multiplies the degree-n coefficients by s^n.
inline Series2D compute_coeffs_2d(const MapParams2D& p, Branch branch, int order, double scale = 1.0)
{
    if (order < 1)
        throw ConfigError("series order must be at least 1");
    validate(p);
    auto spec = eigen_origin(p);
    const auto& pair = branch == Branch::unstable ? spec.unstable.front() : spec.stable.front();
    auto co = solve_planar_coefficients<double>(p.c, p.delta, pair.value, scale * pair.vector[0],
                                                scale * pair.vector[1], order);
    return {branch, pair.value, std::move(co.a), std::move(co.b), p, order};
}

/// Area-preserving case only: the stable branch is the coordinate swap of the
/// unstable one (and vice versa), with the reciprocal eigenvalue.
inline Series2D series_from_symmetry(const Series2D& s)
{
    if (s.params.delta != 1.0)
        throw SymmetryNotApplicableError("swap symmetry requires delta = 1");
    Series2D out = s;
    out.branch = s.branch == Branch::unstable ? Branch::stable : Branch::unstable;
    out.lambda = 1.0 / s.lambda;
    std::swap(out.coeffs_a, out.coeffs_b);
    return out;
}

namespace detail {

inline double horner(const std::vector<double>& co, double t)
{
    double r = 0.0;
    for (std::size_t k = co.size(); k-- > 0;)
        r = r * t + co[k];
    return r;
}

inline double horner_derivative(const std::vector<double>& co, double t)
{
    double r = 0.0;
    for (std::size_t k = co.size(); k-- > 1;)
        r = r * t + static_cast<double>(k) * co[k];
    return r;
}

} // namespace detail

inline Point2D evaluate(const Series2D& s, double t)
{
    return {detail::horner(s.coeffs_a, t), detail::horner(s.coeffs_b, t)};
}

inline Vec<2> tangent(const Series2D& s, double t)
{
    return {detail::horner_derivative(s.coeffs_a, t), detail::horner_derivative(s.coeffs_b, t)};
}

inline Point2D evaluate(const Series2D& s, const Vec<1>& args) { return evaluate(s, args[0]); }

inline Matrix<2, 1> parameter_jacobian(const Series2D& s, const Vec<1>& args)
{
    auto t = tangent(s, args[0]);
    return {{{t[0]}, {t[1]}}};
}

/// Parameters mapped by the linear conjugacy, i.e. lambda * t.
inline Vec<1> conjugate_args(const Series2D& s, const Vec<1>& args) { return {s.lambda * args[0]}; }

inline Vec<1> inverse_conjugate_args(const Series2D& s, const Vec<1>& args) { return {args[0] / s.lambda}; }

/// E(t) = |f(P(t)) - P(lambda t)|.
inline double defining_error(const Series2D& s, double t)
{
    return norm(image(s.params, evaluate(s, t)) - evaluate(s, s.lambda * t));
}

inline double defining_error(const Series2D& s, const Vec<1>& args) { return defining_error(s, args[0]); }

struct ValidityProfile {
    std::vector<std::pair<double, double>> samples; // (t, E(t))
    double tau = 0.0;
    double epsilon = 0.0;
};

inline constexpr int default_validity_samples = 1000;

/// Samples E on a uniform grid over [-t_max, t_max] and certifies tau, the
/// largest sampled radius below which every sample is under epsilon.
inline ValidityProfile validity_profile_2d(const Series2D& s, double epsilon, double t_max,
                                           int n_samples = default_validity_samples)
{
    if (!(epsilon > 0.0))
        throw ConfigError("epsilon must be positive");
    if (n_samples < 2)
        throw ConfigError("validity profile needs at least two samples");
    ValidityProfile prof;
    prof.epsilon = epsilon;
    prof.samples.reserve(n_samples);
    for (int i = 0; i < n_samples; ++i) {
        double t = -t_max + 2.0 * t_max * i / (n_samples - 1);
        double e;
        try {
            e = defining_error(s, t);
        } catch (const DivergenceError&) {
            e = std::numeric_limits<double>::infinity();
        }
        prof.samples.emplace_back(t, std::isnan(e) ? std::numeric_limits<double>::infinity() : e);
    }
    auto by_radius = prof.samples;
    std::stable_sort(by_radius.begin(), by_radius.end(),
                     [](const auto& x, const auto& y) { return std::abs(x.first) < std::abs(y.first); });
    double tau = 0.0;
    for (std::size_t i = 0; i < by_radius.size();) {
        // Samples at equal |t| are certified together.
        double r = std::abs(by_radius[i].first);
        bool ok = true;
        std::size_t j = i;
        for (; j < by_radius.size() && std::abs(by_radius[j].first) == r; ++j)
            ok = ok && by_radius[j].second < epsilon;
        if (!ok)
            break;
        tau = r;
        i = j;
    }
    prof.tau = tau;
    return prof;
}

} // namespace hommap
