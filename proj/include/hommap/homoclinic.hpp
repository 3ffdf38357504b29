#pragma once

// Homoclinic points as non-trivial zeros of the manifold mismatch
//     Phi(x_u, x_s) = f^{n_u}(P^u(x_u)) - f^{-n_s}(P^s(x_s)),
// solved by damped Newton iteration on the series parameters.

#include "hommap/error.hpp"
#include "hommap/linalg.hpp"
#include "hommap/manifold2d.hpp"
#include "hommap/manifold4d.hpp"
#include "hommap/maps.hpp"
#include "hommap/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hommap {

template <class Series>
inline constexpr std::size_t root_dim = 2 * Series::arg_dim;

template <class Series>
using RootParams = Vec<root_dim<Series>>;

template <class Series>
struct MismatchProblem {
    Series unstable;
    Series stable;
    int n_u = 0;
    int n_s = 0;
};

namespace detail {

inline bool same_params(const MapParams2D& a, const MapParams2D& b) { return a.c == b.c && a.delta == b.delta; }

inline bool same_params(const MapParams4D& a, const MapParams4D& b)
{
    return a.c == b.c && a.delta == b.delta && a.b == b.b;
}

template <class Series>
std::pair<typename Series::args_type, typename Series::args_type> split(const RootParams<Series>& x)
{
    typename Series::args_type u{}, s{};
    for (std::size_t i = 0; i < Series::arg_dim; ++i) {
        u[i] = x[i];
        s[i] = x[Series::arg_dim + i];
    }
    return {u, s};
}

} // namespace detail

template <class Series>
MismatchProblem<Series> make_problem(Series unstable, Series stable, int n_u = 0, int n_s = 0)
{
    if (unstable.branch != Branch::unstable || stable.branch != Branch::stable)
        throw ConfigError("mismatch problem needs an (unstable, stable) pair of series");
    if (!detail::same_params(unstable.params, stable.params))
        throw ConfigError("both series must be built for the same map parameters");
    if (n_u < 0 || n_s < 0)
        throw ConfigError("extra map applications must be non-negative");
    return {std::move(unstable), std::move(stable), n_u, n_s};
}

template <class Series>
typename Series::point_type unstable_end(const MismatchProblem<Series>& prob, const typename Series::args_type& a)
{
    auto p = evaluate(prob.unstable, a);
    for (int k = 0; k < prob.n_u; ++k)
        p = image(prob.unstable.params, p);
    return p;
}

template <class Series>
typename Series::point_type stable_end(const MismatchProblem<Series>& prob, const typename Series::args_type& a)
{
    auto p = evaluate(prob.stable, a);
    for (int k = 0; k < prob.n_s; ++k)
        p = preimage(prob.stable.params, p);
    return p;
}

template <class Series>
typename Series::point_type mismatch(const MismatchProblem<Series>& prob, const RootParams<Series>& x)
{
    auto [au, as] = detail::split<Series>(x);
    return unstable_end(prob, au) - stable_end(prob, as);
}

namespace detail {

/// Tangent columns of f^{n_u} o P^u (first block) and f^{-n_s} o P^s (second block).
template <class Series>
std::pair<Matrix<Series::dim, Series::arg_dim>, Matrix<Series::dim, Series::arg_dim>>
chained_tangents(const MismatchProblem<Series>& prob, const RootParams<Series>& x)
{
    auto [au, as] = split<Series>(x);
    auto pu = evaluate(prob.unstable, au);
    auto ju = parameter_jacobian(prob.unstable, au);
    for (int k = 0; k < prob.n_u; ++k) {
        ju = jacobian(prob.unstable.params, pu) * ju;
        pu = image(prob.unstable.params, pu);
    }
    auto ps = evaluate(prob.stable, as);
    auto js = parameter_jacobian(prob.stable, as);
    for (int k = 0; k < prob.n_s; ++k) {
        js = inverse_jacobian(prob.stable.params, ps) * js;
        ps = preimage(prob.stable.params, ps);
    }
    return {ju, js};
}

} // namespace detail

/// Columns D(f^{n_u}) dP^u followed by -D(f^{-n_s}) dP^s.
template <class Series>
Matrix<Series::dim, Series::dim> mismatch_jacobian(const MismatchProblem<Series>& prob,
                                                   const RootParams<Series>& x)
{
    auto [ju, js] = detail::chained_tangents(prob, x);
    Matrix<Series::dim, Series::dim> j{};
    for (std::size_t r = 0; r < Series::dim; ++r)
        for (std::size_t k = 0; k < Series::arg_dim; ++k) {
            j[r][k] = ju[r][k];
            j[r][Series::arg_dim + k] = -js[r][k];
        }
    return j;
}

/// Determinant of the unstable tangents followed by the stable tangents at
/// the root; zero at a homoclinic tangency.
template <class Series>
double transversality_det(const MismatchProblem<Series>& prob, const RootParams<Series>& x)
{
    auto [ju, js] = detail::chained_tangents(prob, x);
    Matrix<Series::dim, Series::dim> j{};
    for (std::size_t r = 0; r < Series::dim; ++r)
        for (std::size_t k = 0; k < Series::arg_dim; ++k) {
            j[r][k] = ju[r][k];
            j[r][Series::arg_dim + k] = js[r][k];
        }
    return determinant(j);
}

struct SolverOptions {
    /// Componentwise residual bound for accepting a root.
    double tol = 1e-13;
    int max_iters = 50;
    int max_halvings = 30;
    /// Roots closer than this to the origin are the trivial solution.
    double trivial_radius = 1e-6;
    /// Defining-equation error bound that delimits the trusted series domain.
    double trust_epsilon = 1e-11;
    int trust_samples = 64;
};

template <class Series>
struct NewtonResult {
    RootParams<Series> x{};
    typename Series::point_type residual{};
    int iters = 0;
    bool converged = false;
};

/// Damped Newton iteration: full steps are halved while the residual norm
/// fails to decrease.
template <class Series>
NewtonResult<Series> newton_solve(const MismatchProblem<Series>& prob, RootParams<Series> x,
                                  const SolverOptions& opt = {})
{
    auto safe_mismatch = [&](const RootParams<Series>& y, bool& ok) {
        try {
            auto f = mismatch(prob, y);
            ok = all_finite(f);
            return f;
        } catch (const DivergenceError&) {
            ok = false;
            return typename Series::point_type{};
        }
    };
    NewtonResult<Series> res;
    bool ok = true;
    auto f = safe_mismatch(x, ok);
    if (!ok) {
        res.x = x;
        return res;
    }
    for (int it = 0; it <= opt.max_iters; ++it) {
        res.x = x;
        res.residual = f;
        res.iters = it;
        if (max_abs(f) < opt.tol) {
            res.converged = true;
            return res;
        }
        if (it == opt.max_iters)
            break;
        auto step = solve(mismatch_jacobian(prob, x), -f);
        if (step.det == 0.0 || !all_finite(step.x))
            break;
        const double f_norm = norm(f);
        double damping = 1.0;
        bool accepted = false;
        for (int h = 0; h <= opt.max_halvings; ++h, damping *= 0.5) {
            auto trial = x + damping * step.x;
            bool trial_ok = true;
            auto ft = safe_mismatch(trial, trial_ok);
            if (trial_ok && norm(ft) < f_norm) {
                x = trial;
                f = ft;
                accepted = true;
                break;
            }
        }
        if (!accepted)
            break;
    }
    return res;
}

template <class Series>
struct HomoclinicSolution {
    RootParams<Series> root_params{};
    typename Series::point_type point{};
    /// Largest residual component.
    double residual = 0.0;
    double transversality_det = 0.0;
    int newton_iters = 0;
    /// Largest defining-equation error seen by the validity guard on each branch.
    double unstable_error = 0.0;
    double stable_error = 0.0;
};

namespace detail {

/// Samples E along the segment from 0 to `end`; returns the max error, or
/// throws once the bound is exceeded.
template <class Series>
double guard_segment(const Series& s, const typename Series::args_type& end, const SolverOptions& opt,
                     const char* which)
{
    double worst = 0.0;
    for (int k = 1; k <= opt.trust_samples; ++k) {
        const double frac = static_cast<double>(k) / opt.trust_samples;
        auto a = frac * end;
        double e;
        try {
            e = defining_error(s, a);
        } catch (const DivergenceError&) {
            e = std::numeric_limits<double>::infinity();
        }
        if (!(e < opt.trust_epsilon))
            throw OutsideValidityError(std::string(which) + " series argument lies outside the trusted domain; error " +
                                           fmt_double(e) + " exceeds the bound at radius " + fmt_double(norm(a)),
                                       norm(a));
        worst = std::max(worst, e);
    }
    return worst;
}

} // namespace detail

/// Newton from `seed`, then acceptance checks: converged below tolerance,
/// away from the trivial root, and inside the trusted domain of both series.
/// An unstable argument x is trusted when E stays small up to the preimage
/// parameter x / lambda (P(x) is then the image of an accurate point); a
/// stable argument when E stays small up to x itself.
template <class Series>
HomoclinicSolution<Series> find_homoclinic(const MismatchProblem<Series>& prob, const RootParams<Series>& seed,
                                           const SolverOptions& opt = {})
{
    if (!all_finite(seed))
        throw ConfigError("Newton seed must be finite");
    auto res = newton_solve(prob, seed, opt);
    if (!res.converged)
        throw NoConvergenceError("Newton iteration did not reach residual " + detail::fmt_double(opt.tol) +
                                 " within " + std::to_string(opt.max_iters) + " iterations (last residual " +
                                 detail::fmt_double(max_abs(res.residual)) + ")");
    if (norm(res.x) < opt.trivial_radius)
        throw TrivialRootError("Newton iteration converged to the trivial root at the origin");
    auto [au, as] = detail::split<Series>(res.x);
    HomoclinicSolution<Series> sol;
    sol.unstable_error = detail::guard_segment(prob.unstable, inverse_conjugate_args(prob.unstable, au), opt, "unstable");
    sol.stable_error = detail::guard_segment(prob.stable, as, opt, "stable");
    sol.root_params = res.x;
    sol.point = unstable_end(prob, au);
    sol.residual = max_abs(res.residual);
    sol.transversality_det = transversality_det(prob, res.x);
    sol.newton_iters = res.iters;
    return sol;
}

template <class Series>
struct SeedCandidate {
    RootParams<Series> x{};
    double residual_norm = 0.0;
};

template <class Series>
struct SeedGridOptions {
    /// Per-coordinate lower and upper bounds of the root parameters.
    RootParams<Series> lower{};
    RootParams<Series> upper{};
    /// Cells per axis; the grid has resolution + 1 nodes per axis.
    int resolution = 32;
    /// Nodes closer than this to the origin are skipped (they lead Newton to the trivial root).
    double exclusion_radius = 0.5;
    /// Nodes with a larger mismatch norm are dropped.
    double cutoff = std::numeric_limits<double>::infinity();
    unsigned threads = 1;
};

/// Grid nodes ranked by ascending |Phi|; ties go to the larger first
/// coordinate so the ranking is deterministic under the odd symmetry.
template <class Series>
std::vector<SeedCandidate<Series>> seed_grid(const MismatchProblem<Series>& prob, const SeedGridOptions<Series>& g)
{
    constexpr std::size_t K = root_dim<Series>;
    if (g.resolution < 1)
        throw ConfigError("seed grid resolution must be at least 1");
    const std::size_t per_axis = static_cast<std::size_t>(g.resolution) + 1;
    std::size_t total = 1;
    for (std::size_t k = 0; k < K; ++k)
        total *= per_axis;
    std::vector<std::optional<SeedCandidate<Series>>> slots(total);
    parallel_for(total, g.threads, [&](std::size_t idx) {
        RootParams<Series> x{};
        std::size_t rem = idx;
        for (std::size_t k = 0; k < K; ++k) {
            const std::size_t i = rem % per_axis;
            rem /= per_axis;
            x[k] = g.lower[k] + (g.upper[k] - g.lower[k]) * static_cast<double>(i) / g.resolution;
        }
        if (norm(x) < g.exclusion_radius)
            return;
        double r;
        try {
            r = norm(mismatch(prob, x));
        } catch (const DivergenceError&) {
            return;
        }
        if (std::isfinite(r) && r <= g.cutoff)
            slots[idx] = SeedCandidate<Series>{x, r};
    });
    std::vector<SeedCandidate<Series>> out;
    for (auto& s : slots)
        if (s)
            out.push_back(*s);
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.residual_norm != b.residual_norm)
            return a.residual_norm < b.residual_norm;
        return a.x > b.x;
    });
    return out;
}

/// Tries the ranked seeds in order and returns the first accepted root.
template <class Series>
std::optional<HomoclinicSolution<Series>> search_homoclinic(const MismatchProblem<Series>& prob,
                                                            const std::vector<SeedCandidate<Series>>& seeds,
                                                            const SolverOptions& opt = {},
                                                            std::size_t max_attempts = 64)
{
    std::size_t tried = 0;
    for (const auto& s : seeds) {
        if (tried++ >= max_attempts)
            break;
        try {
            return find_homoclinic(prob, s.x, opt);
        } catch (const Error&) {
        }
    }
    return std::nullopt;
}

template <class Series>
struct SeedOutcome {
    std::optional<HomoclinicSolution<Series>> solution;
    std::string failure;
};

/// Runs find_homoclinic from every seed; outcomes are in seed order.
template <class Series>
std::vector<SeedOutcome<Series>> solve_from_seeds(const MismatchProblem<Series>& prob,
                                                  const std::vector<SeedCandidate<Series>>& seeds,
                                                  const SolverOptions& opt = {}, unsigned threads = 1)
{
    std::vector<SeedOutcome<Series>> out(seeds.size());
    parallel_for(seeds.size(), threads, [&](std::size_t i) {
        try {
            out[i].solution = find_homoclinic(prob, seeds[i].x, opt);
        } catch (const std::exception& e) {
            out[i].failure = e.what();
        }
    });
    return out;
}

struct DistanceProfile {
    std::vector<std::pair<int, double>> entries; // (n, d_n), ascending n
    double min_distance = 0.0;
    int argmin = 0;
};

inline constexpr double default_escape_radius = 1e3;

/// d_n = |f^n(point)| for n in [n_min, n_max]; a direction stops early once
/// an iterate leaves the escape radius.
template <class Params, class Point>
DistanceProfile distance_profile(const Params& params, const Point& point, int n_min, int n_max,
                                 double escape_radius = default_escape_radius)
{
    DistanceProfile prof;
    std::vector<std::pair<int, double>> back;
    auto walk = [&](int count, bool forward, std::vector<std::pair<int, double>>& sink) {
        Point p = point;
        for (int k = 1; k <= count; ++k) {
            try {
                p = forward ? image(params, p) : preimage(params, p);
            } catch (const DivergenceError&) {
                return;
            }
            const double d = norm(p);
            sink.emplace_back(forward ? k : -k, d);
            if (!(d <= escape_radius))
                return;
        }
    };
    walk(std::max(0, -n_min), false, back);
    std::reverse(back.begin(), back.end());
    prof.entries = std::move(back);
    if (n_min <= 0 && n_max >= 0)
        prof.entries.emplace_back(0, norm(point));
    std::vector<std::pair<int, double>> fwd;
    walk(std::max(0, n_max), true, fwd);
    prof.entries.insert(prof.entries.end(), fwd.begin(), fwd.end());
    std::erase_if(prof.entries, [&](const auto& e) { return e.first < n_min || e.first > n_max; });
    prof.min_distance = std::numeric_limits<double>::infinity();
    for (const auto& [n, d] : prof.entries)
        if (d < prof.min_distance) {
            prof.min_distance = d;
            prof.argmin = n;
        }
    return prof;
}

} // namespace hommap
