#pragma once

// Two-dimensional stable and unstable manifolds of the coupled map's origin as
// bivariate truncated power series S(u, v) with f(S(u, v)) = S(lA u, lB v).

#include "hommap/error.hpp"
#include "hommap/linalg.hpp"
#include "hommap/manifold2d.hpp"
#include "hommap/maps.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

namespace hommap {

/// Position of u^n v^m in degree-major triangular storage.
constexpr std::size_t tri_index(int n, int m) noexcept
{
    const auto d = static_cast<std::size_t>(n + m);
    return d * (d + 1) / 2 + static_cast<std::size_t>(m);
}

constexpr std::size_t tri_size(int order) noexcept { return tri_index(0, order) + 1; }

/// Order in which the monomials of one total degree are visited. Each degree
/// only depends on lower degrees, so both must give identical coefficients.
enum class DegreeTraversal { ascending_n, descending_n };

template <class T>
struct CoupledCoefficients {
    int order = 0;
    std::array<std::vector<T>, 4> grids; // a1..a4, degree-major triangular
};

/// Order-by-order solution of the conjugacy equation for the coupled map.
/// For every monomial u^n v^m of degree >= 2 the four unknowns satisfy
///     -L a1 + a2                     = 0
///     -delta a1 + (c+b-L) a2 - b a4  = -3 [a2^3]_{nm}
///     -L a3 + a4                     = 0
///     -b a2 - delta a3 + (c+b-L) a4  = -3 [a4^3]_{nm}
/// with L = lA^n lB^m. The cubes only involve strictly lower degrees since
/// every a_i^{00} vanishes; they are maintained degree by degree through the
/// running squares.
template <class T>
CoupledCoefficients<T> solve_coupled_coefficients(const T& c, const T& delta, const T& b,
                                                  const T& lambda_a, const T& lambda_b,
                                                  const Vec<4, T>& vec_a, const Vec<4, T>& vec_b,
                                                  int order,
                                                  DegreeTraversal traversal = DegreeTraversal::ascending_n)
{
    CoupledCoefficients<T> out;
    out.order = order;
    const std::size_t size = tri_size(order);
    for (auto& g : out.grids)
        g.assign(size, T(0));
    if (order >= 1)
        for (int i = 0; i < 4; ++i) {
            out.grids[i][tri_index(1, 0)] = vec_a[i];
            out.grids[i][tri_index(0, 1)] = vec_b[i];
        }

    std::vector<T> pow_a(order + 1, T(1)), pow_b(order + 1, T(1));
    for (int k = 1; k <= order; ++k) {
        pow_a[k] = pow_a[k - 1] * lambda_a;
        pow_b[k] = pow_b[k - 1] * lambda_b;
    }

    const auto& a2 = out.grids[1];
    const auto& a4 = out.grids[3];
    std::vector<T> sq2(size, T(0)), sq4(size, T(0));

    // Degree-d part of x*y restricted to factors of degree >= lo.
    auto product_at = [](const std::vector<T>& x, const std::vector<T>& y, int n, int m, int lo) {
        const int d = n + m;
        T s = T(0);
        for (int i = 0; i <= n; ++i)
            for (int j = 0; j <= m; ++j) {
                const int dx = i + j;
                if (dx < lo || d - dx < 1)
                    continue;
                s = s + x[tri_index(i, j)] * y[tri_index(n - i, m - j)];
            }
        return s;
    };

    for (int d = 2; d <= order; ++d) {
        if (d - 1 >= 2)
            for (int n = 0; n <= d - 1; ++n) {
                const int m = d - 1 - n;
                sq2[tri_index(n, m)] = product_at(a2, a2, n, m, 1);
                sq4[tri_index(n, m)] = product_at(a4, a4, n, m, 1);
            }
        for (int k = 0; k <= d; ++k) {
            const int n = traversal == DegreeTraversal::ascending_n ? k : d - k;
            const int m = d - n;
            const T cube2 = product_at(sq2, a2, n, m, 2);
            const T cube4 = product_at(sq4, a4, n, m, 2);
            const T L = pow_a[n] * pow_b[m];
            const T diag = c + b - L;
            Matrix<4, 4, T> sys{{{-L, T(1), T(0), T(0)},
                                 {-delta, diag, T(0), -b},
                                 {T(0), T(0), -L, T(1)},
                                 {T(0), -b, -delta, diag}}};
            Vec<4, T> rhs{T(0), T(-3) * cube2, T(0), T(-3) * cube4};
            auto sol = solve(sys, rhs);
            if (pivot_magnitude(sol.det) < resonance_threshold)
                throw ResonanceError("resonant coefficient system at (n, m) = (" + std::to_string(n) + ", " +
                                         std::to_string(m) + ")",
                                     n, m);
            for (int i = 0; i < 4; ++i)
                out.grids[i][tri_index(n, m)] = sol.x[i];
        }
    }
    return out;
}

struct Series4D {
    static constexpr std::size_t dim = 4;
    static constexpr std::size_t arg_dim = 2;
    using params_type = MapParams4D;
    using point_type = Point4D;
    using args_type = Vec<2>;

    Branch branch = Branch::unstable;
    Vec<2> lambdas{}; // (symmetric-mode, antisymmetric-mode) eigenvalue
    std::array<std::vector<double>, 4> coeffs;
    MapParams4D params;
    int order = 0;

    double coeff(int i, int n, int m) const { return coeffs[i][tri_index(n, m)]; }
};

/// The first parameter follows the symmetric mode, the second the
/// antisymmetric mode; at b = 0 this reproduces the product structure of two
/// planar manifolds.
inline Series4D compute_coeffs_4d(const MapParams4D& p, Branch branch, int order,
                                  DegreeTraversal traversal = DegreeTraversal::ascending_n)
{
    if (order < 1)
        throw ConfigError("series order must be at least 1");
    validate(p);
    auto spec = eigen_origin(p);
    const auto& group = branch == Branch::unstable ? spec.unstable : spec.stable;
    auto pick = [&](Mode mode) {
        return *std::find_if(group.begin(), group.end(), [mode](const auto& e) { return e.mode == mode; });
    };
    const auto sym = pick(Mode::symmetric);
    const auto anti = pick(Mode::antisymmetric);
    auto co = solve_coupled_coefficients<double>(p.c, p.delta, p.b, sym.value, anti.value, sym.vector,
                                                 anti.vector, order, traversal);
    Series4D s;
    s.branch = branch;
    s.lambdas = {sym.value, anti.value};
    s.coeffs = std::move(co.grids);
    s.params = p;
    s.order = order;
    return s;
}

inline Point4D evaluate(const Series4D& s, double u, double v)
{
    Point4D out{};
    const int N = s.order;
    for (int i = 0; i < 4; ++i) {
        const auto& g = s.coeffs[i];
        double r = 0.0;
        for (int n = N; n >= 0; --n) {
            double q = 0.0;
            for (int m = N - n; m >= 0; --m)
                q = q * v + g[tri_index(n, m)];
            r = r * u + q;
        }
        out[i] = r;
    }
    return out;
}

/// Columns are dS/du and dS/dv.
inline Matrix<4, 2> parameter_jacobian(const Series4D& s, double u, double v)
{
    Matrix<4, 2> out{};
    const int N = s.order;
    for (int i = 0; i < 4; ++i) {
        const auto& g = s.coeffs[i];
        double du = 0.0, dv = 0.0;
        for (int n = N; n >= 0; --n) {
            double q = 0.0, dq = 0.0;
            for (int m = N - n; m >= 0; --m) {
                q = q * v + g[tri_index(n, m)];
                if (m >= 1)
                    dq = dq * v + m * g[tri_index(n, m)];
            }
            if (n >= 1)
                du = du * u + n * q;
            dv = dv * u + dq;
        }
        out[i][0] = du;
        out[i][1] = dv;
    }
    return out;
}

inline Point4D evaluate(const Series4D& s, const Vec<2>& args) { return evaluate(s, args[0], args[1]); }

inline Matrix<4, 2> parameter_jacobian(const Series4D& s, const Vec<2>& args)
{
    return parameter_jacobian(s, args[0], args[1]);
}

inline Vec<2> conjugate_args(const Series4D& s, const Vec<2>& args)
{
    return {s.lambdas[0] * args[0], s.lambdas[1] * args[1]};
}

inline Vec<2> inverse_conjugate_args(const Series4D& s, const Vec<2>& args)
{
    return {args[0] / s.lambdas[0], args[1] / s.lambdas[1]};
}

/// E(u, v) = |f(P(u, v)) - P(lA u, lB v)|.
inline double defining_error(const Series4D& s, const Vec<2>& args)
{
    return norm(image(s.params, evaluate(s, args)) - evaluate(s, conjugate_args(s, args)));
}

struct PolarValidityProfile {
    std::vector<double> thetas;
    std::vector<std::vector<std::pair<double, double>>> rays; // per theta: (r, E)
    double r_valid = 0.0;
    double epsilon = 0.0;
};

/// 17 uniform angles over [0, pi]; E is even under (u, v) -> (-u, -v), so
/// this half-turn covers every direction.
inline std::vector<double> default_thetas()
{
    std::vector<double> t;
    for (int k = 0; k <= 16; ++k)
        t.push_back(std::numbers::pi * k / 16.0);
    return t;
}

inline constexpr double default_r_max = 2.0;

namespace detail {

inline double certified_radius(const std::vector<std::pair<double, double>>& ray, double epsilon)
{
    double r_ok = 0.0;
    for (const auto& [r, e] : ray) {
        if (!(e < epsilon))
            break;
        r_ok = r;
    }
    return r_ok;
}

} // namespace detail

inline PolarValidityProfile validity_profile_4d(const Series4D& s, double epsilon, double r_max = default_r_max,
                                                std::vector<double> thetas = default_thetas(),
                                                int n_samples = 401)
{
    if (!(epsilon > 0.0))
        throw ConfigError("epsilon must be positive");
    if (n_samples < 2)
        throw ConfigError("validity profile needs at least two samples per ray");
    PolarValidityProfile prof;
    prof.epsilon = epsilon;
    prof.thetas = std::move(thetas);
    prof.rays.resize(prof.thetas.size());
    double common = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < prof.thetas.size(); ++k) {
        const double ct = std::cos(prof.thetas[k]), st = std::sin(prof.thetas[k]);
        auto& ray = prof.rays[k];
        for (int i = 0; i < n_samples; ++i) {
            const double r = r_max * i / (n_samples - 1);
            double e;
            try {
                e = defining_error(s, Vec<2>{r * ct, r * st});
            } catch (const DivergenceError&) {
                e = std::numeric_limits<double>::infinity();
            }
            ray.emplace_back(r, std::isnan(e) ? std::numeric_limits<double>::infinity() : e);
        }
        common = std::min(common, detail::certified_radius(ray, epsilon));
    }
    prof.r_valid = prof.thetas.empty() ? 0.0 : common;
    return prof;
}

} // namespace hommap
