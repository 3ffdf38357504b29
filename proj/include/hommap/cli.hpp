#pragma once

// Command-line front end. Every subcommand reads a flat key=value
// configuration: built-in defaults, then an optional --config file, then
// flags. The resolved configuration is embedded in every output file.

#include "hommap/continuation.hpp"
#include "hommap/dynamics.hpp"
#include "hommap/error.hpp"
#include "hommap/homoclinic.hpp"
#include "hommap/io.hpp"
#include "hommap/manifold2d.hpp"
#include "hommap/manifold4d.hpp"
#include "hommap/maps.hpp"
#include "hommap/pipelines.hpp"
#include "hommap/reference_suite.hpp"

#include <CLI11.hpp>

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace hommap::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_computation = 1;
inline constexpr int exit_config = 2;

inline constexpr const char* output_dir_env = "HOMMAP_OUTPUT_DIR";

struct KeySpec {
    std::string key;
    std::string default_value;
    std::string help;
};

inline std::string flag_name(const std::string& key)
{
    std::string f = "--" + key;
    for (auto& ch : f)
        if (ch == '_')
            ch = '-';
    return f;
}

inline std::string trim(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos)
        return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

/// key=value lines; blank lines and lines starting with '#' are ignored.
inline ConfigMap read_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read config file " + path);
    ConfigMap out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#')
            continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
        std::string key = trim(t.substr(0, eq));
        for (auto& ch : key)
            if (ch == '-')
                ch = '_';
        out[key] = trim(t.substr(eq + 1));
    }
    return out;
}

class RunConfig {
public:
    ConfigMap values;

    const std::string& str(const std::string& key) const
    {
        auto it = values.find(key);
        if (it == values.end())
            throw ConfigError("missing configuration key " + key);
        return it->second;
    }

    bool is_auto(const std::string& key) const { return str(key) == "auto"; }

    static double parse_number(const std::string& key, const std::string& text)
    {
        const std::string t = trim(text);
        char* end = nullptr;
        errno = 0;
        const double v = std::strtod(t.c_str(), &end);
        if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v))
            throw ConfigError("key " + key + ": '" + text + "' is not a finite number");
        return v;
    }

    double num(const std::string& key) const { return parse_number(key, str(key)); }

    int integer(const std::string& key) const
    {
        const double v = num(key);
        if (v != std::floor(v) || std::abs(v) > 1e9)
            throw ConfigError("key " + key + ": '" + str(key) + "' is not an integer");
        return static_cast<int>(v);
    }

    std::vector<double> list(const std::string& key) const
    {
        std::vector<double> out;
        std::stringstream ss(str(key));
        std::string item;
        while (std::getline(ss, item, ','))
            out.push_back(parse_number(key, item));
        return out;
    }

    /// Semicolon-separated points, each a comma-separated list.
    std::vector<std::vector<double>> points(const std::string& key) const
    {
        std::vector<std::vector<double>> out;
        std::stringstream ss(str(key));
        std::string item;
        while (std::getline(ss, item, ';')) {
            if (trim(item).empty())
                continue;
            std::vector<double> p;
            std::stringstream inner(item);
            std::string x;
            while (std::getline(inner, x, ','))
                p.push_back(parse_number(key, x));
            out.push_back(std::move(p));
        }
        return out;
    }

    /// Replaces an "auto" value by the resolved one so outputs record it.
    void resolve(const std::string& key, const std::string& value)
    {
        if (is_auto(key))
            values[key] = value;
    }
};

struct Context {
    std::ostream& out;
    std::ostream& err;
    std::filesystem::path out_dir;
    unsigned threads = 1;
};

template <std::size_t N>
std::string join(const Vec<N>& v, const char* sep = ",")
{
    std::string s;
    for (std::size_t i = 0; i < N; ++i) {
        if (i)
            s += sep;
        s += fmt17(v[i]);
    }
    return s;
}

// ---------------------------------------------------------------------------
// Validation helpers; everything thrown here is a configuration error.

template <class Fn>
auto checked_config(Fn&& fn) -> decltype(fn())
{
    try {
        return fn();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
}

inline void require(bool ok, const std::string& message)
{
    if (!ok)
        throw ConfigError(message);
}

inline bool is_4d(const RunConfig& cfg)
{
    const auto& m = cfg.str("map");
    require(m == "2d" || m == "4d", "key map must be 2d or 4d, got '" + m + "'");
    return m == "4d";
}

inline MapParams2D params2d(const RunConfig& cfg)
{
    MapParams2D p{cfg.num("c"), cfg.num("delta")};
    checked_config([&] {
        validate(p);
        return 0;
    });
    return p;
}

inline MapParams4D params4d(const RunConfig& cfg)
{
    MapParams4D p{cfg.num("c"), cfg.num("delta"), cfg.num("b")};
    checked_config([&] {
        validate(p);
        return 0;
    });
    return p;
}

inline int series_order(RunConfig& cfg)
{
    cfg.resolve("order", is_4d(cfg) ? "50" : "100");
    const int n = cfg.integer("order");
    require(n >= 1, "key order must be at least 1");
    return n;
}

inline Branch branch_of(const RunConfig& cfg)
{
    const auto& b = cfg.str("branch");
    require(b == "unstable" || b == "stable", "key branch must be unstable or stable");
    return b == "unstable" ? Branch::unstable : Branch::stable;
}

inline SolverOptions solver_options(const RunConfig& cfg)
{
    SolverOptions s;
    s.tol = cfg.num("tol");
    s.max_iters = cfg.integer("max_iters");
    s.trust_epsilon = cfg.num("trust_epsilon");
    require(s.tol > 0.0, "key tol must be positive");
    require(s.max_iters >= 1, "key max_iters must be at least 1");
    require(s.trust_epsilon > 0.0, "key trust_epsilon must be positive");
    return s;
}

template <std::size_t N>
Vec<N> as_vec(const std::vector<double>& v, const std::string& key)
{
    require(v.size() == N, "key " + key + " needs " + std::to_string(N) + " comma-separated values");
    Vec<N> out{};
    std::copy(v.begin(), v.end(), out.begin());
    return out;
}

inline void write_out(const Context& ctx, const std::string& name, const std::string& text)
{
    write_text((ctx.out_dir / name).string(), text);
    ctx.out << "wrote " << (ctx.out_dir / name).string() << "\n";
}

// ---------------------------------------------------------------------------
// Subcommands.

inline std::vector<KeySpec> map_keys()
{
    return {{"map", "2d", "map selector: 2d or 4d"},
            {"c", "-2.5", "linear coefficient c"},
            {"delta", "1", "dissipation delta"},
            {"b", "0.1", "coupling b (4d only)"},
            {"order", "auto", "series order N (auto: 100 for 2d, 50 for 4d)"}};
}

inline std::vector<KeySpec> solver_keys()
{
    return {{"tol", "1e-13", "componentwise residual tolerance"},
            {"max_iters", "50", "Newton iteration limit"},
            {"trust_epsilon", "1e-11", "defining-equation error bound of the trusted series domain"}};
}

inline int cmd_manifold(RunConfig& cfg, Context& ctx)
{
    const int order = series_order(cfg);
    const Branch br = branch_of(cfg);
    const double eps = cfg.num("epsilon");
    const int samples = cfg.integer("samples");
    require(eps > 0.0, "key epsilon must be positive");
    require(samples >= 2, "key samples must be at least 2");
    if (!is_4d(cfg)) {
        const auto p = params2d(cfg);
        cfg.resolve("radius", "2");
        const double t_max = cfg.num("radius");
        require(t_max > 0.0, "key radius must be positive");
        auto s = compute_coeffs_2d(p, br, order);
        auto prof = validity_profile_2d(s, eps, t_max, samples);
        write_out(ctx, "manifold.json",
                  document("manifold", cfg.values, {{"series", to_json(s)}, {"profile", to_json(prof)}}).dump(2) + "\n");
        ctx.out << "tau = " << fmt17(prof.tau) << " at epsilon = " << fmt17(eps) << "\n";
    } else {
        const auto p = params4d(cfg);
        cfg.resolve("radius", fmt17(default_r_max));
        const double r_max = cfg.num("radius");
        require(r_max > 0.0, "key radius must be positive");
        auto s = compute_coeffs_4d(p, br, order);
        auto prof = validity_profile_4d(s, eps, r_max, default_thetas(), samples);
        write_out(ctx, "manifold.json",
                  document("manifold", cfg.values, {{"series", to_json(s)}, {"profile", to_json(prof)}}).dump(2) + "\n");
        ctx.out << "r_valid = " << fmt17(prof.r_valid) << " at epsilon = " << fmt17(eps) << "\n";
    }
    return exit_ok;
}

inline ContinuationOptions continuation_options(const RunConfig& cfg, const SolverOptions& solver)
{
    ContinuationOptions o;
    o.solver = solver;
    o.initial_step = cfg.num("initial_step");
    o.min_step = cfg.num("min_step");
    o.jump_factor = cfg.num("jump_factor");
    o.jump_floor = cfg.num("jump_floor");
    require(o.min_step > 0.0 && o.initial_step >= o.min_step, "need 0 < min_step <= initial_step");
    require(o.jump_factor > 0.0 && o.jump_floor >= 0.0, "jump_factor must be positive and jump_floor non-negative");
    return o;
}

template <class Series>
void require_grid(const SeedGridOptions<Series>& g)
{
    require(g.resolution >= 1, "key resolution must be at least 1");
    for (std::size_t k = 0; k < g.lower.size(); ++k)
        require(g.lower[k] < g.upper[k], "seed grid lower bounds must lie below the upper bounds");
}

template <class Series>
std::string solution_summary(const HomoclinicSolution<Series>& s)
{
    return "root_params = (" + join(s.root_params, ", ") + ")\npoint = (" + join(s.point, ", ") +
           ")\nresidual = " + fmt17(s.residual) + "\ntransversality_det = " + fmt17(s.transversality_det) + "\n";
}

inline std::string distance_csv(const DistanceProfile& prof, const ConfigMap& cfg)
{
    CsvWriter csv("homoclinic", cfg, {"n", "d_n"});
    for (const auto& [n, d] : prof.entries)
        csv.row(std::vector<std::string>{std::to_string(n), fmt17(d)});
    return csv.text();
}

inline int cmd_homoclinic(RunConfig& cfg, Context& ctx)
{
    const int order = series_order(cfg);
    const auto solver = solver_options(cfg);
    const int n_u = cfg.integer("n_u"), n_s = cfg.integer("n_s");
    require(n_u >= 0 && n_s >= 0, "keys n_u and n_s must be non-negative");
    const int n_min = cfg.integer("n_min"), n_max = cfg.integer("n_max");
    require(n_min <= n_max, "key n_min must not exceed n_max");
    const double escape = cfg.num("escape_radius");
    require(escape > 0.0, "key escape_radius must be positive");
    const bool four = is_4d(cfg);
    cfg.resolve("strategy", four ? "branch" : "grid");
    const auto& strategy = cfg.str("strategy");
    require(strategy == "grid" || strategy == "branch" || strategy == "seed", "key strategy must be grid, branch or seed");
    require(strategy != "seed" || !cfg.is_auto("root_seed"), "strategy seed needs root_seed");
    if (!four) {
        const auto p = params2d(cfg);
        require(strategy != "branch", "strategy branch is only defined for the 4d map");
        auto g = planar_grid(ctx.threads);
        cfg.resolve("lower", "-1.6,-1.6");
        cfg.resolve("upper", "1.6,1.6");
        cfg.resolve("resolution", "32");
        g.lower = as_vec<2>(cfg.list("lower"), "lower");
        g.upper = as_vec<2>(cfg.list("upper"), "upper");
        g.resolution = cfg.integer("resolution");
        require_grid(g);
        std::optional<RootParams<Series2D>> seed;
        if (strategy == "seed")
            seed = as_vec<2>(cfg.list("root_seed"), "root_seed");
        auto prob = make_problem(compute_coeffs_2d(p, Branch::unstable, order), compute_coeffs_2d(p, Branch::stable, order),
                                 n_u, n_s);
        HomoclinicSolution<Series2D> sol;
        if (seed) {
            sol = find_homoclinic(prob, *seed, solver);
        } else {
            auto found = search_homoclinic(prob, seed_grid(prob, g), solver);
            if (!found)
                throw NoConvergenceError("no homoclinic root found from any seed-grid node");
            sol = *found;
        }
        auto prof = distance_profile(p, sol.point, n_min, n_max, escape);
        write_out(ctx, "homoclinic.json",
                  document("homoclinic", cfg.values,
                           {{"params", to_json(p)}, {"solution", to_json(sol)}, {"distance_min", prof.min_distance},
                            {"distance_argmin", prof.argmin}})
                          .dump(2) +
                      "\n");
        write_out(ctx, "distance.csv", distance_csv(prof, cfg.values));
        ctx.out << solution_summary(sol);
        return exit_ok;
    }
    const auto p = params4d(cfg);
    auto g = coupled_grid(ctx.threads);
    cfg.resolve("lower", "-1.2,-1.2,-1.2,-1.2");
    cfg.resolve("upper", "1.2,1.2,1.2,1.2");
    cfg.resolve("resolution", "6");
    g.lower = as_vec<4>(cfg.list("lower"), "lower");
    g.upper = as_vec<4>(cfg.list("upper"), "upper");
    g.resolution = cfg.integer("resolution");
    require_grid(g);
    std::optional<RootParams<Series4D>> seed;
    if (strategy == "seed")
        seed = as_vec<4>(cfg.list("root_seed"), "root_seed");
    auto prob = make_problem(compute_coeffs_4d(p, Branch::unstable, order), compute_coeffs_4d(p, Branch::stable, order),
                             n_u, n_s);
    HomoclinicSolution<Series4D> sol;
    if (seed) {
        sol = find_homoclinic(prob, *seed, solver);
    } else if (strategy == "branch") {
        require(n_u == 0 && n_s == 0, "strategy branch follows the n_u = n_s = 0 mismatch");
        ContinuationOptions copt;
        copt.solver = solver;
        sol = coupled_branch_root(p, order, copt);
    } else {
        auto found = search_homoclinic(prob, seed_grid(prob, g), solver);
        if (!found)
            throw NoConvergenceError("no homoclinic root found from any seed-grid node");
        sol = *found;
    }
    auto prof = distance_profile(p, sol.point, n_min, n_max, escape);
    write_out(ctx, "homoclinic.json",
              document("homoclinic", cfg.values,
                       {{"params", to_json(p)}, {"solution", to_json(sol)}, {"distance_min", prof.min_distance},
                        {"distance_argmin", prof.argmin}})
                      .dump(2) +
                  "\n");
    write_out(ctx, "distance.csv", distance_csv(prof, cfg.values));
    ctx.out << solution_summary(sol);
    return exit_ok;
}

template <class Series>
std::string continuation_csv(const std::vector<ContinuationRecord<Series>>& recs, const std::string& param,
                             const ConfigMap& cfg)
{
    std::vector<std::string> cols{param};
    const std::size_t k = root_dim<Series>;
    for (std::size_t i = 0; i < k; ++i)
        cols.push_back("root" + std::to_string(i + 1));
    for (std::size_t i = 0; i < Series::dim; ++i)
        cols.push_back("point" + std::to_string(i + 1));
    for (const char* c : {"residual", "det", "step", "found"})
        cols.push_back(c);
    CsvWriter csv("continue", cfg, cols);
    for (const auto& r : recs) {
        std::vector<std::string> row{fmt17(r.param_value)};
        if (r.solution) {
            for (double x : r.solution->root_params)
                row.push_back(fmt17(x));
            for (double x : r.solution->point)
                row.push_back(fmt17(x));
            row.push_back(fmt17(r.solution->residual));
            row.push_back(fmt17(r.solution->transversality_det));
        } else {
            row.insert(row.end(), k + Series::dim + 2, "nan");
        }
        row.push_back(fmt17(r.step_used));
        row.push_back(r.solution ? "1" : "0");
        csv.row(row);
    }
    return csv.text();
}

template <class Series>
int finish_continuation(RunConfig& cfg, Context& ctx, const ProblemFamily<Series>& fam,
                        const std::vector<ContinuationRecord<Series>>& recs, bool fit, const SolverOptions& solver)
{
    write_out(ctx, "continuation.csv", continuation_csv(recs, cfg.str("param"), cfg.values));
    const double last = last_success(recs);
    ctx.out << "last success at " << cfg.str("param") << " = " << fmt17(last) << "\n";
    if (recs.back().solution)
        ctx.out << "reached the end of the range without failure\n";
    else
        ctx.out << "first failure at " << fmt17(recs.back().param_value) << "\n";
    if (!fit)
        return exit_ok;
    const int points = cfg.integer("fit_points");
    const double window = cfg.num("window");
    auto table = tangency_table(fam, recs, window, points, solver);
    auto result = fit_sqrt_law(table);
    Json rows = Json::array();
    for (const auto& [d, det] : table)
        rows.push_back({d, det});
    write_out(ctx, "fit.json",
              document("continue", cfg.values,
                       {{"fit", to_json(result)},
                        {"last_success", last},
                        {"first_failure", recs.back().solution ? Json(nullptr) : Json(recs.back().param_value)},
                        {"table", rows}})
                      .dump(2) +
                  "\n");
    ctx.out << "fitted delta_c = " << fmt17(result.delta_c) << ", a = " << fmt17(result.amplitude_a) << "\n";
    return exit_ok;
}

inline int cmd_continue(RunConfig& cfg, Context& ctx)
{
    const int order = series_order(cfg);
    const auto solver = solver_options(cfg);
    const auto& param = cfg.str("param");
    require(param == "delta" || param == "b", "key param must be delta or b");
    const ContinuationParam which = param == "delta" ? ContinuationParam::delta : ContinuationParam::b;
    const bool four = is_4d(cfg);
    require(four || which == ContinuationParam::delta, "the 2d map can only be continued in delta");
    cfg.resolve("from", which == ContinuationParam::delta ? "1" : "0");
    cfg.resolve("to", which == ContinuationParam::b ? "0.1" : (four ? "0.99" : "0.9"));
    cfg.resolve("initial_step", which == ContinuationParam::delta ? "0.001" : "0.005");
    const double from = cfg.num("from"), to = cfg.num("to");
    const auto copt = continuation_options(cfg, solver);
    require(cfg.integer("fit_points") >= 3, "key fit_points must be at least 3");
    require(cfg.num("window") > 0.0, "key window must be positive");
    const bool fit = which == ContinuationParam::delta && to < from;
    if (!four) {
        cfg.values["delta"] = cfg.str("from");
        const auto p = params2d(cfg);
        checked_config([&] {
            validate(with_param(p, which, to));
            return 0;
        });
        auto fam = make_family(p, which, order);
        RootParams<Series2D> seed;
        if (!cfg.is_auto("root_seed"))
            seed = as_vec<2>(cfg.list("root_seed"), "root_seed");
        else
            seed = planar_root(p, order, ctx.threads, solver).root_params;
        auto recs = continue_parameter(fam, from, to, seed, copt);
        return finish_continuation(cfg, ctx, fam, recs, fit, solver);
    }
    cfg.values[param] = cfg.str("from");
    const auto p = params4d(cfg);
    checked_config([&] {
        validate(with_param(p, which, to));
        return 0;
    });
    auto fam = make_family(p, which, order);
    RootParams<Series4D> seed;
    if (!cfg.is_auto("root_seed")) {
        seed = as_vec<4>(cfg.list("root_seed"), "root_seed");
    } else if (which == ContinuationParam::b && from == 0.0 && p.delta == 1.0) {
        seed = uncoupled_seed(planar_root(MapParams2D{p.c, 1.0}, 100, ctx.threads, solver).root_params[0], true);
    } else {
        ContinuationOptions bopt;
        bopt.solver = solver;
        seed = coupled_branch_root(p, order, bopt).root_params;
    }
    auto recs = continue_parameter(fam, from, to, seed, copt);
    return finish_continuation(cfg, ctx, fam, recs, fit, solver);
}

template <std::size_t N>
std::vector<Vec<N>> point_list(const RunConfig& cfg, const std::string& key)
{
    std::vector<Vec<N>> out;
    for (const auto& p : cfg.points(key))
        out.push_back(as_vec<N>(p, key));
    require(!out.empty(), "key " + key + " needs at least one point");
    return out;
}

inline std::string elliptic_seeds()
{
    const double e = 1.0 / std::sqrt(6.0);
    std::string s;
    for (int k = 1; k <= 5; ++k) {
        if (k > 1)
            s += ";";
        s += fmt17(e + 0.01 * k) + "," + fmt17(-e) + "," + fmt17(e) + "," + fmt17(-e);
    }
    return s;
}

inline int cmd_orbit(RunConfig& cfg, Context& ctx)
{
    const int steps = cfg.integer("n_steps");
    const double escape = cfg.num("escape_radius");
    require(steps >= 0, "key n_steps must be non-negative");
    require(escape > 0.0, "key escape_radius must be positive");
    const bool four = is_4d(cfg);
    cfg.resolve("start", four ? elliptic_seeds() : "0.6,-0.6");
    auto run = [&](const auto& p, const auto& starts, std::vector<std::string> coords) {
        std::vector<std::string> cols{"orbit", "k"};
        cols.insert(cols.end(), coords.begin(), coords.end());
        CsvWriter csv("orbit", cfg.values, cols);
        for (std::size_t i = 0; i < starts.size(); ++i) {
            auto o = iterate_orbit(p, starts[i], steps, escape);
            for (std::size_t k = 0; k < o.points.size(); ++k) {
                std::vector<std::string> row{std::to_string(i), std::to_string(k)};
                for (double x : o.points[k])
                    row.push_back(fmt17(x));
                csv.row(row);
            }
            ctx.out << "orbit " << i << ": "
                    << (o.escaped ? "escaped at iterate " + std::to_string(*o.escape_index)
                                  : "bounded for " + std::to_string(steps) + " iterates")
                    << "\n";
        }
        write_out(ctx, "orbit.csv", csv.text());
    };
    if (four)
        run(params4d(cfg), point_list<4>(cfg, "start"), {"x1", "y1", "x2", "y2"});
    else
        run(params2d(cfg), point_list<2>(cfg, "start"), {"x", "y"});
    return exit_ok;
}

inline int cmd_horseshoe(RunConfig& cfg, Context& ctx)
{
    const double a = cfg.num("a"), delta = cfg.num("delta");
    const int n = cfg.integer("grid_n");
    require(n >= 2, "key grid_n must be at least 2");
    require(delta > 0.0, "key delta must be positive");
    auto sets = horseshoe_strips(a, n, delta);
    CsvWriter csv("horseshoe", cfg.values, {"x", "y", "level"});
    const HorseshoeMap h{a, delta};
    for (const auto& q : sets.strips)
        csv.row(std::vector<std::string>{fmt17(q[0]), fmt17(q[1]), std::to_string(horseshoe_level(h, q))});
    write_out(ctx, "horseshoe.csv", csv.text());
    auto bands_json = [](const std::vector<std::pair<double, double>>& b) {
        Json out = Json::array();
        for (const auto& [lo, hi] : b)
            out.push_back({lo, hi});
        return out;
    };
    std::map<std::string, int> hist;
    for (const auto& [y, b] : row_bands(sets.strips, sets.spacing))
        ++hist[std::to_string(b.size())];
    const int bands = band_count(sets.strips, sets.spacing);
    write_out(ctx, "horseshoe.json",
              document("horseshoe", cfg.values,
                       {{"counts", {{"square", sets.square.size()}, {"strips", sets.strips.size()},
                                    {"intersection", sets.intersection.size()}}},
                        {"strip_band_count", bands},
                        {"rows_by_band_count", hist},
                        {"intersection_columns", bands_json(projected_bands(sets.intersection, sets.spacing))}})
                      .dump(2) +
                  "\n");
    ctx.out << "vertical strips: " << bands << "\n";
    return exit_ok;
}

inline int cmd_slice(RunConfig& cfg, Context& ctx)
{
    const auto p = params4d(cfg);
    SliceOptions o;
    o.n_steps = cfg.integer("n_steps");
    cfg.resolve("y2_star", fmt17(default_slice_y2));
    o.y2_star = cfg.num("y2_star");
    o.tolerance = cfg.num("tolerance");
    o.escape_radius = cfg.num("escape_radius");
    o.threads = ctx.threads;
    require(o.n_steps >= 0, "key n_steps must be non-negative");
    require(o.tolerance > 0.0, "key tolerance must be positive");
    cfg.resolve("seeds", elliptic_seeds());
    auto pts = slice_4d(p, point_list<4>(cfg, "seeds"), o);
    CsvWriter csv("slice", cfg.values, {"seed", "n", "x1", "y1", "x2"});
    for (const auto& s : pts)
        csv.row(std::vector<std::string>{std::to_string(s.seed_index), std::to_string(s.source_index), fmt17(s.x1),
                                         fmt17(s.y1), fmt17(s.x2)});
    write_out(ctx, "slice.csv", csv.text());
    ctx.out << pts.size() << " slice points\n";
    return exit_ok;
}

inline int cmd_mesh(RunConfig& cfg, Context& ctx)
{
    const int order = series_order(cfg);
    const Branch br = branch_of(cfg);
    if (!is_4d(cfg)) {
        const auto p = params2d(cfg);
        const double t_max = cfg.num("t_max");
        const int iterates = cfg.integer("iterates"), samples = cfg.integer("samples");
        require(t_max > 0.0, "key t_max must be positive");
        require(iterates >= 0 && samples >= 2, "need iterates >= 0 and samples >= 2");
        auto segs = iterate_manifold_segment(compute_coeffs_2d(p, br, order), t_max, iterates, samples);
        CsvWriter csv("mesh", cfg.values, {"iterate", "index", "x", "y"});
        for (std::size_t k = 0; k < segs.size(); ++k)
            for (std::size_t i = 0; i < segs[k].size(); ++i)
                csv.row(std::vector<std::string>{std::to_string(k), std::to_string(i), fmt17(segs[k][i][0]),
                                                 fmt17(segs[k][i][1])});
        write_out(ctx, "manifold_curve.csv", csv.text());
        return exit_ok;
    }
    const auto p = params4d(cfg);
    const auto ub = as_vec<2>(cfg.list("u_bounds"), "u_bounds"), vb = as_vec<2>(cfg.list("v_bounds"), "v_bounds");
    const int rows = cfg.integer("rows"), cols = cfg.integer("cols");
    require(ub[0] < ub[1] && vb[0] < vb[1], "mesh bounds must be increasing");
    require(rows >= 2 && cols >= 2, "keys rows and cols must be at least 2");
    auto mesh = sample_manifold_grid(compute_coeffs_4d(p, br, order), ub[0], ub[1], vb[0], vb[1], rows, cols);
    write_out(ctx, "mesh.txt", mesh_text(mesh, "mesh", cfg.values));
    return exit_ok;
}

inline int cmd_reproduce(RunConfig& cfg, Context& ctx)
{
    reference::SuiteOptions o;
    o.threads = ctx.threads;
    const double seed = cfg.num("seed");
    require(seed >= 0 && seed == std::floor(seed), "key seed must be a non-negative integer");
    o.rng_seed = static_cast<std::uint64_t>(seed);
    auto results = reference::run_suite(o);
    Json rows = Json::array();
    int failed = 0;
    for (const auto& r : results) {
        ctx.out << reference::format_line(r) << "\n";
        rows.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
        failed += !r.passed;
    }
    ctx.out << (results.size() - failed) << "/" << results.size() << " criteria passed\n";
    write_out(ctx, "reproduce.json", document("reproduce-paper", cfg.values, {{"criteria", rows}}).dump(2) + "\n");
    return failed ? exit_computation : exit_ok;
}

// ---------------------------------------------------------------------------
// Dispatch.

struct Command {
    std::string name;
    std::string help;
    std::vector<KeySpec> keys;
    std::function<int(RunConfig&, Context&)> run;
};

inline std::vector<KeySpec> concat(std::vector<std::vector<KeySpec>> parts)
{
    std::vector<KeySpec> out;
    for (auto& p : parts)
        out.insert(out.end(), p.begin(), p.end());
    return out;
}

inline std::vector<Command> commands()
{
    const std::vector<KeySpec> common{{"out", "auto", "output directory (auto: $HOMMAP_OUTPUT_DIR or .)"},
                                      {"threads", "0", "worker threads (0: hardware concurrency)"},
                                      {"seed", "20240601", "random seed"}};
    return {
        {"manifold",
         "series coefficients and validity profile",
         concat({common, map_keys(),
                 {{"branch", "unstable", "unstable or stable"},
                  {"epsilon", "1e-15", "validity threshold"},
                  {"radius", "auto", "largest sampled |t| (2d) or r (4d)"},
                  {"samples", "1000", "samples per profile (per ray in 4d)"}}}),
         cmd_manifold},
        {"homoclinic",
         "homoclinic point and distance profile",
         concat({common, map_keys(), solver_keys(),
                 {{"strategy", "auto", "grid, branch (4d) or seed (auto: grid for 2d, branch for 4d)"},
                  {"root_seed", "auto", "explicit Newton seed, comma-separated"},
                  {"lower", "auto", "seed-grid lower bounds"},
                  {"upper", "auto", "seed-grid upper bounds"},
                  {"resolution", "auto", "seed-grid cells per axis"},
                  {"n_u", "0", "extra forward map applications"},
                  {"n_s", "0", "extra backward map applications"},
                  {"n_min", "-20", "first iterate of the distance profile"},
                  {"n_max", "20", "last iterate of the distance profile"},
                  {"escape_radius", "1000", "distance-profile escape radius"}}}),
         cmd_homoclinic},
        {"continue",
         "parameter continuation and tangency fit",
         concat({common, map_keys(), solver_keys(),
                 {{"param", "delta", "delta or b"},
                  {"from", "auto", "start value"},
                  {"to", "auto", "end value"},
                  {"initial_step", "auto", "initial step (auto: 1e-3 for delta, 5e-3 for b)"},
                  {"min_step", "1e-6", "smallest step before giving up"},
                  {"jump_factor", "10", "branch-jump threshold in units of the step"},
                  {"jump_floor", "0.25", "absolute floor of the branch-jump threshold"},
                  {"window", fmt17(default_fit_window), "fit window above the last success"},
                  {"fit_points", std::to_string(default_fit_points), "resampled points in the fit window"},
                  {"root_seed", "auto", "root at the start value, comma-separated"}}}),
         cmd_continue},
        {"orbit",
         "orbit iteration with escape detection",
         concat({common, map_keys(),
                 {{"start", "auto", "start points, ';'-separated"},
                  {"n_steps", "1000", "iterates per orbit"},
                  {"escape_radius", "1000", "escape radius"}}}),
         cmd_orbit},
        {"horseshoe",
         "horseshoe strips of the rescaled map",
         concat({common,
                 {{"a", "5", "rescaling a"}, {"delta", "1", "dissipation delta"}, {"grid_n", "1000", "nodes per axis"}}}),
         cmd_horseshoe},
        {"slice",
         "3-D phase-space slice of 4-D orbits",
         concat({common,
                 {{"c", "-2.5", "linear coefficient c"},
                  {"delta", "1", "dissipation delta"},
                  {"b", "0.1", "coupling b"},
                  {"seeds", "auto", "4-D seed points, ';'-separated"},
                  {"n_steps", "100000", "iterates per seed"},
                  {"y2_star", "auto", "slice level (auto: -1/sqrt(6))"},
                  {"tolerance", fmt17(default_slice_tolerance), "slice half-width"},
                  {"escape_radius", "1000", "escape radius"}}}),
         cmd_slice},
        {"mesh",
         "manifold mesh (4d) or iterated manifold curve (2d)",
         concat({common, map_keys(),
                 {{"branch", "unstable", "unstable or stable"},
                  {"u_bounds", "-1,1", "4d: u range"},
                  {"v_bounds", "-1,1", "4d: v range"},
                  {"rows", std::to_string(default_mesh_resolution), "4d: nodes along v"},
                  {"cols", std::to_string(default_mesh_resolution), "4d: nodes along u"},
                  {"t_max", "0.42", "2d: outer end of the fundamental segment"},
                  {"iterates", "6", "2d: images of the fundamental segment"},
                  {"samples", "400", "2d: nodes on the fundamental segment"}}}),
         cmd_mesh},
        {"reproduce-paper", "run the reference suite and print a pass/fail table", common, cmd_reproduce},
    };
}

inline int run(const std::vector<std::string>& argv, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    CLI::App app{"Invariant manifolds, homoclinic points and tangencies of cubic Henon-type maps", "hommap"};
    app.require_subcommand(1);
    auto cmds = commands();
    struct Bound {
        CLI::App* app;
        std::string config_file;
        std::map<std::string, std::optional<std::string>> flags;
    };
    std::vector<Bound> bound(cmds.size());
    for (std::size_t i = 0; i < cmds.size(); ++i) {
        auto* sub = app.add_subcommand(cmds[i].name, cmds[i].help);
        bound[i].app = sub;
        sub->add_option("--config", bound[i].config_file, "key=value configuration file");
        for (const auto& k : cmds[i].keys) {
            auto& slot = bound[i].flags[k.key];
            sub->add_option_function<std::string>(
                flag_name(k.key), [&slot](const std::string& v) { slot = v; },
                k.help + " [default: " + k.default_value + "]");
        }
    }
    std::vector<std::string> args(argv.rbegin(), argv.rend());
    if (!args.empty())
        args.pop_back(); // program name
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return exit_config;
    }
    for (std::size_t i = 0; i < cmds.size(); ++i) {
        if (!bound[i].app->parsed())
            continue;
        RunConfig cfg;
        Context ctx{out, err, {}, 1};
        try {
            for (const auto& k : cmds[i].keys)
                cfg.values[k.key] = k.default_value;
            if (!bound[i].config_file.empty())
                for (const auto& [key, value] : read_config_file(bound[i].config_file)) {
                    if (!cfg.values.count(key))
                        throw ConfigError("unknown key '" + key + "' in " + bound[i].config_file + " for " +
                                          cmds[i].name);
                    cfg.values[key] = value;
                }
            for (const auto& [key, value] : bound[i].flags)
                if (value)
                    cfg.values[key] = *value;
            if (cfg.is_auto("out")) {
                const char* env = std::getenv(output_dir_env);
                cfg.values["out"] = env && *env ? env : ".";
            }
            ctx.out_dir = cfg.str("out");
            const int threads = cfg.integer("threads");
            require(threads >= 0, "key threads must be non-negative");
            ctx.threads = threads ? static_cast<unsigned>(threads) : std::max(1u, std::thread::hardware_concurrency());
            std::filesystem::create_directories(ctx.out_dir);
        } catch (const Error& e) {
            err << "configuration error: " << e.what() << "\n";
            return exit_config;
        } catch (const std::filesystem::filesystem_error& e) {
            err << "configuration error: " << e.what() << "\n";
            return exit_config;
        }
        try {
            return cmds[i].run(cfg, ctx);
        } catch (const ConfigError& e) {
            err << "configuration error: " << e.what() << "\n";
            return exit_config;
        } catch (const Error& e) {
            err << "error: " << e.what() << "\n";
            return exit_computation;
        }
    }
    return exit_config;
}

inline int run(int argc, char** argv)
{
    return run(std::vector<std::string>(argv, argv + argc));
}

} // namespace hommap::cli
