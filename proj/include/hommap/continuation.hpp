#pragma once

// Parameter continuation of homoclinic roots with step halving on failure,
// and the square-root law fit of the transversality determinant near a
// homoclinic tangency.

#include "hommap/error.hpp"
#include "hommap/homoclinic.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hommap {

enum class ContinuationParam { delta, b };

inline const char* to_string(ContinuationParam p) { return p == ContinuationParam::delta ? "delta" : "b"; }

template <class Series>
using ProblemFamily = std::function<MismatchProblem<Series>(double)>;

inline MapParams2D with_param(MapParams2D p, ContinuationParam which, double value)
{
    if (which != ContinuationParam::delta)
        throw ConfigError("the planar map can only be continued in delta");
    p.delta = value;
    return p;
}

inline MapParams4D with_param(MapParams4D p, ContinuationParam which, double value)
{
    (which == ContinuationParam::delta ? p.delta : p.b) = value;
    return p;
}

inline ProblemFamily<Series2D> make_family(const MapParams2D& base, ContinuationParam which, int order,
                                           int n_u = 0, int n_s = 0)
{
    return [=](double value) {
        auto p = with_param(base, which, value);
        return make_problem(compute_coeffs_2d(p, Branch::unstable, order), compute_coeffs_2d(p, Branch::stable, order),
                            n_u, n_s);
    };
}

inline ProblemFamily<Series4D> make_family(const MapParams4D& base, ContinuationParam which, int order,
                                           int n_u = 0, int n_s = 0)
{
    return [=](double value) {
        auto p = with_param(base, which, value);
        return make_problem(compute_coeffs_4d(p, Branch::unstable, order), compute_coeffs_4d(p, Branch::stable, order),
                            n_u, n_s);
    };
}

template <class Series>
struct ContinuationRecord {
    double param_value = 0.0;
    std::optional<HomoclinicSolution<Series>> solution;
    double step_used = 0.0;
};

struct ContinuationOptions {
    double initial_step = 1e-3;
    double min_step = 1e-6;
    /// A step is rejected when the root moves further than
    /// max(jump_factor * step, jump_floor) in root-parameter norm.
    double jump_factor = 10.0;
    double jump_floor = 0.25;
    SolverOptions solver;
};

namespace detail {

template <class Series>
std::optional<HomoclinicSolution<Series>> try_solve(const ProblemFamily<Series>& family, double value,
                                                    const RootParams<Series>& seed, const SolverOptions& opt)
{
    try {
        return find_homoclinic(family(value), seed, opt);
    } catch (const Error&) {
        return std::nullopt;
    }
}

} // namespace detail

/// Steps the parameter from `start` toward `end`, re-solving from the
/// previous root. A failed or branch-jumping step is retried with half the
/// step; the run ends at `end` or when the step would drop below min_step, in
/// which case a final record without solution marks the failing value.
template <class Series>
std::vector<ContinuationRecord<Series>> continue_parameter(const ProblemFamily<Series>& family, double start,
                                                           double end, const RootParams<Series>& seed,
                                                           const ContinuationOptions& opt = {})
{
    if (!(opt.min_step > 0.0) || !(opt.initial_step >= opt.min_step))
        throw ConfigError("continuation needs 0 < min_step <= initial_step");
    std::optional<HomoclinicSolution<Series>> first;
    std::string why;
    try {
        first = find_homoclinic(family(start), seed, opt.solver);
    } catch (const Error& e) {
        why = e.what();
    }
    if (!first)
        throw CannotBeginError("no homoclinic root at the starting parameter " + detail::fmt_double(start) + ": " + why);

    std::vector<ContinuationRecord<Series>> records;
    records.push_back({start, first, 0.0});
    const double dir = end >= start ? 1.0 : -1.0;
    double current = start;
    double step = opt.initial_step;
    RootParams<Series> x = first->root_params;
    while (current != end) {
        double next = current + dir * step;
        if ((next - end) * dir > 0.0)
            next = end;
        const double taken = std::abs(next - current);
        auto sol = detail::try_solve(family, next, x, opt.solver);
        if (sol && norm(sol->root_params - x) <= std::max(opt.jump_factor * taken, opt.jump_floor)) {
            records.push_back({next, sol, taken});
            current = next;
            x = sol->root_params;
            continue;
        }
        if (step * 0.5 < opt.min_step) {
            records.push_back({next, std::nullopt, taken});
            break;
        }
        step *= 0.5;
    }
    return records;
}

/// Last parameter value with a solution.
template <class Series>
double last_success(const std::vector<ContinuationRecord<Series>>& records)
{
    for (auto it = records.rbegin(); it != records.rend(); ++it)
        if (it->solution)
            return it->param_value;
    throw CannotBeginError("continuation has no successful record");
}

/// Follows the branch through the given parameter values in order, starting
/// from `seed`; stops at the first failure.
template <class Series>
std::vector<ContinuationRecord<Series>> sample_branch(const ProblemFamily<Series>& family,
                                                      const std::vector<double>& values, RootParams<Series> seed,
                                                      const SolverOptions& opt = {})
{
    std::vector<ContinuationRecord<Series>> out;
    double prev = values.empty() ? 0.0 : values.front();
    for (double v : values) {
        auto sol = detail::try_solve(family, v, seed, opt);
        out.push_back({v, sol, std::abs(v - prev)});
        prev = v;
        if (!sol)
            break;
        seed = sol->root_params;
    }
    return out;
}

struct TangencyFit {
    double amplitude_a = 0.0;
    double delta_c = 0.0;
    double residual_rms = 0.0;
    int points_used = 0;
};

inline constexpr double default_fit_window = 5e-5;
inline constexpr int default_fit_points = 21;

/// Uniformly resamples [delta_last, delta_last + window] of a decreasing
/// delta continuation, returning (delta, det) rows for the fit.
template <class Series>
std::vector<std::pair<double, double>> tangency_table(const ProblemFamily<Series>& family,
                                                      const std::vector<ContinuationRecord<Series>>& records,
                                                      double window = default_fit_window,
                                                      int n_points = default_fit_points, const SolverOptions& opt = {})
{
    if (n_points < 3)
        throw ConfigError("tangency table needs at least three points");
    const double lo = last_success(records);
    const double hi = lo + window;
    // Seed from the successful record closest above the window.
    const ContinuationRecord<Series>* from = nullptr;
    for (const auto& r : records)
        if (r.solution && r.param_value >= hi && (!from || r.param_value < from->param_value))
            from = &r;
    if (!from)
        for (const auto& r : records)
            if (r.solution && (!from || r.param_value > from->param_value))
                from = &r;
    std::vector<double> values;
    for (int i = 0; i < n_points; ++i)
        values.push_back(hi - window * i / (n_points - 1));
    if (from->param_value > hi)
        values.insert(values.begin(), from->param_value);
    auto rows = sample_branch(family, values, from->solution->root_params, opt);
    std::vector<std::pair<double, double>> table;
    for (const auto& r : rows)
        if (r.solution && r.param_value <= hi)
            table.emplace_back(r.param_value, r.solution->transversality_det);
    return table;
}

/// Least-squares fit of det^2 = a^2 (delta - delta_c), linear in delta.
inline TangencyFit fit_sqrt_law(const std::vector<std::pair<double, double>>& rows)
{
    std::vector<std::pair<double, double>> pts;
    for (const auto& [d, det] : rows)
        if (det != 0.0)
            pts.emplace_back(d, det * det);
    if (pts.size() < 3)
        throw FitInvalidError("square-root fit needs at least three records with nonzero determinant");
    const double n = static_cast<double>(pts.size());
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : pts) {
        mx += x;
        my += y;
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [x, y] : pts) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if (!(sxx > 0.0))
        throw FitInvalidError("square-root fit needs at least two distinct parameter values");
    const double slope = sxy / sxx;
    if (!(slope > 0.0))
        throw FitInvalidError("det^2 does not grow with delta; data inconsistent with a quadratic tangency");
    const double intercept = my - slope * mx;
    TangencyFit fit;
    fit.amplitude_a = std::sqrt(slope);
    fit.delta_c = -intercept / slope;
    double ss = 0.0;
    for (const auto& [x, y] : pts) {
        const double r = y - (slope * x + intercept);
        ss += r * r;
    }
    fit.residual_rms = std::sqrt(ss / n);
    fit.points_used = static_cast<int>(pts.size());
    for (const auto& [x, y] : pts)
        if (!(fit.delta_c < x))
            throw FitInvalidError("fitted critical parameter does not lie below the fitted records");
    return fit;
}

} // namespace hommap
