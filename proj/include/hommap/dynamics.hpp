#pragma once

// Orbit iteration and figure data: phase portraits, the horseshoe strips of
// the rescaled cubic map, 3-D slices of 4-D orbits and manifold meshes.

#include "hommap/error.hpp"
#include "hommap/linalg.hpp"
#include "hommap/manifold2d.hpp"
#include "hommap/manifold4d.hpp"
#include "hommap/maps.hpp"
#include "hommap/parallel.hpp"

#include <cmath>
#include <map>
#include <optional>
#include <vector>

namespace hommap {

inline constexpr double default_orbit_escape_radius = 1e3;

template <class Point>
struct OrbitRecord {
    std::vector<Point> points;
    bool escaped = false;
    std::optional<int> escape_index;
};

/// points[0] is the start; points[k] is the k-th image. Iteration stops at
/// the first image whose norm exceeds escape_radius (that image is kept).
/// An overflow to non-finite values also counts as an escape at that index;
/// the non-finite image is not stored.
template <class Params, class Point>
OrbitRecord<Point> iterate_orbit(const Params& p, const Point& start, int n_steps,
                                 double escape_radius = default_orbit_escape_radius)
{
    if (!all_finite(start))
        throw ConfigError("orbit start must be finite");
    OrbitRecord<Point> orbit;
    orbit.points.reserve(static_cast<std::size_t>(std::max(n_steps, 0)) + 1);
    orbit.points.push_back(start);
    Point cur = start;
    for (int k = 1; k <= n_steps; ++k) {
        try {
            cur = image(p, cur);
        } catch (const DivergenceError&) {
            orbit.escaped = true;
            orbit.escape_index = k;
            break;
        }
        orbit.points.push_back(cur);
        if (norm(cur) > escape_radius) {
            orbit.escaped = true;
            orbit.escape_index = k;
            break;
        }
    }
    return orbit;
}

// ---------------------------------------------------------------------------
// Horseshoe strips of fhat(x,y) = (y, -delta x + 3a^3 y^3 - 5/2 a y) on
// Q = [-1/2, 1/2]^2.

struct HorseshoeMap {
    double a = 5.0;
    double delta = 1.0;

    double p(double y) const { return 3.0 * a * a * a * y * y * y - 2.5 * a * y; }
    Point2D forward(const Point2D& q) const { return {q[1], -delta * q[0] + p(q[1])}; }
    Point2D backward(const Point2D& q) const { return {(p(q[0]) - q[1]) / delta, q[0]}; }
};

inline bool in_unit_square(const Point2D& q) { return std::abs(q[0]) <= 0.5 && std::abs(q[1]) <= 0.5; }

/// 0: outside Q; 1: in Q; 2: in Q and in fhat(Q); 3: also in fhat^{-1}(Q).
inline int horseshoe_level(const HorseshoeMap& h, const Point2D& q)
{
    if (!in_unit_square(q))
        return 0;
    if (!in_unit_square(h.backward(q)))
        return 1;
    return in_unit_square(h.forward(q)) ? 3 : 2;
}

struct HorseshoeSets {
    int grid_n = 0;
    double spacing = 0.0;
    std::vector<Point2D> square;       // Q
    std::vector<Point2D> strips;       // Q cap fhat(Q), vertical strips
    std::vector<Point2D> intersection; // fhat^{-1}(Q) cap Q cap fhat(Q)
};

inline HorseshoeSets horseshoe_strips(double a = 5.0, int grid_n = 1000, double delta = 1.0)
{
    if (grid_n < 2)
        throw ConfigError("horseshoe grid needs at least 2 nodes per axis");
    if (!(delta > 0.0))
        throw ConfigError("horseshoe delta must be positive");
    const HorseshoeMap h{a, delta};
    HorseshoeSets s;
    s.grid_n = grid_n;
    s.spacing = 1.0 / (grid_n - 1);
    s.square.reserve(static_cast<std::size_t>(grid_n) * grid_n);
    for (int j = 0; j < grid_n; ++j)
        for (int i = 0; i < grid_n; ++i) {
            const Point2D q{-0.5 + i * s.spacing, -0.5 + j * s.spacing};
            s.square.push_back(q);
            const int level = horseshoe_level(h, q);
            if (level >= 2)
                s.strips.push_back(q);
            if (level == 3)
                s.intersection.push_back(q);
        }
    return s;
}

/// Gap-separated runs of sorted coordinates; a gap is anything wider than
/// 1.5 grid spacings.
inline std::vector<std::pair<double, double>> runs(std::vector<double> xs, double spacing)
{
    std::sort(xs.begin(), xs.end());
    std::vector<std::pair<double, double>> out;
    for (double x : xs) {
        if (out.empty() || x - out.back().second > 1.5 * spacing)
            out.emplace_back(x, x);
        else
            out.back().second = x;
    }
    return out;
}

/// Bands of a grid point set along each grid row, keyed by row y. The strips
/// touch near the top and bottom edges of Q, so counting is done per row.
inline std::map<double, std::vector<std::pair<double, double>>> row_bands(const std::vector<Point2D>& set,
                                                                          double spacing)
{
    std::map<double, std::vector<double>> rows;
    for (const auto& q : set)
        rows[q[1]].push_back(q[0]);
    std::map<double, std::vector<std::pair<double, double>>> out;
    for (auto& [y, xs] : rows)
        out[y] = runs(std::move(xs), spacing);
    return out;
}

/// Most frequent per-row band count (ties resolved toward more bands).
inline int band_count(const std::vector<Point2D>& set, double spacing)
{
    std::map<int, int> freq;
    for (const auto& [y, bands] : row_bands(set, spacing))
        ++freq[static_cast<int>(bands.size())];
    int best = 0, best_n = -1;
    for (const auto& [count, n] : freq)
        if (n >= best_n) {
            best = count;
            best_n = n;
        }
    return best;
}

/// Bands of the projection onto the x axis.
inline std::vector<std::pair<double, double>> projected_bands(const std::vector<Point2D>& set, double spacing)
{
    std::vector<double> xs;
    xs.reserve(set.size());
    for (const auto& q : set)
        xs.push_back(q[0]);
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    return runs(std::move(xs), spacing);
}

// ---------------------------------------------------------------------------
// Phase-space slice of 4-D orbits.

struct SlicePoint {
    double x1 = 0.0, y1 = 0.0, x2 = 0.0;
    int source_index = 0;
    int seed_index = 0;
};

inline const double default_slice_y2 = -1.0 / std::sqrt(6.0);
inline constexpr double default_slice_tolerance = 1e-4;

struct SliceOptions {
    int n_steps = 100000;
    double y2_star = default_slice_y2;
    double tolerance = default_slice_tolerance;
    double escape_radius = default_orbit_escape_radius;
    unsigned threads = 1;
};

/// Iterates every seed (iterate 0 is the seed itself) and keeps the points
/// with |y2 - y2_star| < tolerance, grouped by seed in input order.
inline std::vector<SlicePoint> slice_4d(const MapParams4D& p, const std::vector<Point4D>& seeds,
                                        const SliceOptions& opt = {})
{
    if (!(opt.tolerance > 0.0))
        throw ConfigError("slice tolerance must be positive");
    validate(p);
    std::vector<std::vector<SlicePoint>> per_seed(seeds.size());
    parallel_for(seeds.size(), opt.threads, [&](std::size_t s) {
        Point4D q = seeds[s];
        for (int k = 0; k <= opt.n_steps; ++k) {
            if (k > 0) {
                try {
                    q = image(p, q);
                } catch (const DivergenceError&) {
                    break;
                }
                if (norm(q) > opt.escape_radius)
                    break;
            }
            if (std::abs(q[3] - opt.y2_star) < opt.tolerance)
                per_seed[s].push_back({q[0], q[1], q[2], k, static_cast<int>(s)});
        }
    });
    std::vector<SlicePoint> out;
    for (auto& v : per_seed)
        out.insert(out.end(), v.begin(), v.end());
    return out;
}

// ---------------------------------------------------------------------------
// Manifold sampling.

struct CurveSample {
    std::vector<double> t;
    std::vector<Point2D> points;
};

/// Series evaluated at `resolution` uniform nodes of [t_lo, t_hi].
inline CurveSample sample_manifold_grid(const Series2D& s, double t_lo, double t_hi, int resolution)
{
    if (resolution < 2)
        throw ConfigError("manifold grid needs at least 2 nodes");
    CurveSample out;
    for (int i = 0; i < resolution; ++i) {
        const double t = t_lo + (t_hi - t_lo) * i / (resolution - 1);
        out.t.push_back(t);
        out.points.push_back(evaluate(s, t));
    }
    return out;
}

struct MeshNode {
    double u = 0.0, v = 0.0;
    Point4D point{};
};

/// Row-major: row r holds v = v_min + r dv, column c holds u = u_min + c du.
struct ManifoldMesh {
    int rows = 0, cols = 0;
    double u_min = 0.0, u_max = 0.0, v_min = 0.0, v_max = 0.0;
    std::vector<MeshNode> nodes;

    const MeshNode& at(int r, int c) const { return nodes[static_cast<std::size_t>(r) * cols + c]; }
};

inline constexpr int default_mesh_resolution = 200;

inline ManifoldMesh sample_manifold_grid(const Series4D& s, double u_min, double u_max, double v_min, double v_max,
                                         int rows = default_mesh_resolution, int cols = default_mesh_resolution)
{
    if (rows < 2 || cols < 2)
        throw ConfigError("manifold mesh needs at least 2 nodes per axis");
    ManifoldMesh m{rows, cols, u_min, u_max, v_min, v_max, {}};
    m.nodes.reserve(static_cast<std::size_t>(rows) * cols);
    for (int r = 0; r < rows; ++r) {
        const double v = v_min + (v_max - v_min) * r / (rows - 1);
        for (int c = 0; c < cols; ++c) {
            const double u = u_min + (u_max - u_min) * c / (cols - 1);
            m.nodes.push_back({u, v, evaluate(s, u, v)});
        }
    }
    return m;
}

/// Images of the fundamental segment between t_max / mu and t_max, where mu
/// is the expansion of the map that grows the branch (f for unstable, f^{-1}
/// for stable). Entry k is the k-th image; a polyline ends early if it
/// overflows.
inline std::vector<std::vector<Point2D>> iterate_manifold_segment(const Series2D& s, double t_max, int iterates,
                                                                  int samples = 400)
{
    if (samples < 2 || iterates < 0)
        throw ConfigError("segment iteration needs samples >= 2 and iterates >= 0");
    const double mu = s.branch == Branch::unstable ? s.lambda : 1.0 / s.lambda;
    const auto base = sample_manifold_grid(s, t_max / mu, t_max, samples).points;
    std::vector<std::vector<Point2D>> out{base};
    for (int k = 1; k <= iterates; ++k) {
        std::vector<Point2D> next;
        for (const auto& q : out.back()) {
            try {
                next.push_back(s.branch == Branch::unstable ? image(s.params, q) : preimage(s.params, q));
            } catch (const DivergenceError&) {
                break;
            }
        }
        out.push_back(std::move(next));
    }
    return out;
}

} // namespace hommap
