#pragma once

// Standard ways of obtaining the published homoclinic branches: the planar
// root from a coarse seed grid, and the coupled branch grown from the
// uncoupled product of two planar roots.

#include "hommap/continuation.hpp"
#include "hommap/homoclinic.hpp"

#include <cmath>

namespace hommap {

inline SeedGridOptions<Series2D> planar_grid(unsigned threads = 1)
{
    SeedGridOptions<Series2D> g;
    g.lower = {-1.6, -1.6};
    g.upper = {1.6, 1.6};
    g.resolution = 32;
    g.threads = threads;
    return g;
}

inline SeedGridOptions<Series4D> coupled_grid(unsigned threads = 1)
{
    SeedGridOptions<Series4D> g;
    g.lower = {-1.2, -1.2, -1.2, -1.2};
    g.upper = {1.2, 1.2, 1.2, 1.2};
    g.resolution = 6;
    g.threads = threads;
    return g;
}

/// Best-ranked accepted root of the planar map from the coarse grid.
inline HomoclinicSolution<Series2D> planar_root(const MapParams2D& p, int order = 100, unsigned threads = 1,
                                                const SolverOptions& opt = {})
{
    auto prob = make_family(p, ContinuationParam::delta, order)(p.delta);
    auto sol = search_homoclinic(prob, seed_grid(prob, planar_grid(threads)), opt);
    if (!sol)
        throw NoConvergenceError("no homoclinic root found from the planar seed grid");
    return *sol;
}

/// Seeds for the uncoupled 4-D map from a planar root (t, -t): the first
/// chain is reached along u = v, the second along u = -v.
inline RootParams<Series4D> uncoupled_seed(double t, bool first_chain)
{
    const double h = t / std::sqrt(2.0);
    return first_chain ? RootParams<Series4D>{h, h, -h, -h} : RootParams<Series4D>{h, -h, -h, h};
}

struct CoupledBranch {
    std::vector<ContinuationRecord<Series4D>> b_run;
    std::vector<ContinuationRecord<Series4D>> delta_run;
};

inline constexpr double default_b_step = 5e-3;

/// Grows the first-chain homoclinic branch: b from 0 to target.b at
/// delta = 1, then delta from 1 toward delta_end at fixed b.
inline CoupledBranch coupled_branch(const MapParams4D& target, double delta_end, int order = 50,
                                    const ContinuationOptions& delta_opt = {}, int planar_order = 100)
{
    const auto planar = planar_root(MapParams2D{target.c, 1.0}, planar_order, 1, delta_opt.solver);
    CoupledBranch br;
    ContinuationOptions bopt = delta_opt;
    bopt.initial_step = default_b_step;
    auto bfam = make_family(MapParams4D{target.c, 1.0, 0.0}, ContinuationParam::b, order);
    br.b_run = continue_parameter(bfam, 0.0, target.b, uncoupled_seed(planar.root_params[0], true), bopt);
    if (!br.b_run.back().solution || br.b_run.back().param_value != target.b)
        throw NoConvergenceError("coupling continuation failed before b = " + detail::fmt_double(target.b));
    auto dfam = make_family(MapParams4D{target.c, 1.0, target.b}, ContinuationParam::delta, order);
    br.delta_run = continue_parameter(dfam, 1.0, delta_end, br.b_run.back().solution->root_params, delta_opt);
    return br;
}

/// Root of the coupled branch at exactly (target.b, target.delta).
inline HomoclinicSolution<Series4D> coupled_branch_root(const MapParams4D& target, int order = 50,
                                                        const ContinuationOptions& opt = {})
{
    auto br = coupled_branch(target, target.delta, order, opt);
    const auto& last = br.delta_run.back();
    if (!last.solution || last.param_value != target.delta)
        throw NoConvergenceError("the coupled branch ends before delta = " + detail::fmt_double(target.delta) +
                                 " (last root at delta = " + detail::fmt_double(last_success(br.delta_run)) + ")");
    return *last.solution;
}

} // namespace hommap
