#pragma once

// JSON and CSV serialization. Every document carries a format version and
// the resolved run configuration.

#include "hommap/continuation.hpp"
#include "hommap/dynamics.hpp"
#include "hommap/error.hpp"
#include "hommap/homoclinic.hpp"
#include "hommap/manifold2d.hpp"
#include "hommap/manifold4d.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <vector>

namespace hommap {

inline constexpr int format_version = 1;

using Json = nlohmann::json;
using ConfigMap = std::map<std::string, std::string>;

inline Json to_json(const MapParams2D& p) { return {{"c", p.c}, {"delta", p.delta}}; }
inline Json to_json(const MapParams4D& p) { return {{"c", p.c}, {"delta", p.delta}, {"b", p.b}}; }

inline Json to_json(const Series2D& s)
{
    return {{"branch", to_string(s.branch)}, {"lambda", s.lambda},   {"order", s.order},
            {"coeffs_a", s.coeffs_a},        {"coeffs_b", s.coeffs_b}, {"params", to_json(s.params)}};
}

/// Grids are degree-major, m ascending within a degree: (0,0), (1,0), (0,1), (2,0), ...
inline Json to_json(const Series4D& s)
{
    Json grids = Json::array();
    for (const auto& g : s.coeffs)
        grids.push_back(g);
    return {{"branch", to_string(s.branch)},
            {"lambdas", {s.lambdas[0], s.lambdas[1]}},
            {"order", s.order},
            {"coeffs", grids},
            {"params", to_json(s.params)}};
}

inline Json to_json(const ValidityProfile& v)
{
    Json samples = Json::array();
    for (const auto& [t, e] : v.samples)
        samples.push_back({t, e});
    return {{"epsilon", v.epsilon}, {"tau", v.tau}, {"samples", samples}};
}

inline Json to_json(const PolarValidityProfile& v)
{
    Json rays = Json::array();
    for (const auto& ray : v.rays) {
        Json r = Json::array();
        for (const auto& [rad, e] : ray)
            r.push_back({rad, e});
        rays.push_back(r);
    }
    return {{"epsilon", v.epsilon}, {"r_valid", v.r_valid}, {"thetas", v.thetas}, {"rays", rays}};
}

template <class Series>
Json to_json(const HomoclinicSolution<Series>& s)
{
    return {{"root_params", s.root_params},
            {"point", s.point},
            {"residual", s.residual},
            {"det", s.transversality_det},
            {"iters", s.newton_iters},
            {"unstable_error", s.unstable_error},
            {"stable_error", s.stable_error}};
}

inline Json to_json(const TangencyFit& f)
{
    return {{"amplitude_a", f.amplitude_a},
            {"delta_c", f.delta_c},
            {"residual_rms", f.residual_rms},
            {"points_used", f.points_used}};
}

inline Json document(const std::string& command, const ConfigMap& config, Json result)
{
    return {{"format_version", format_version}, {"command", command}, {"config", config}, {"result", std::move(result)}};
}

inline void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot open output file " + path);
    out << text;
    if (!out)
        throw Error("failed writing output file " + path);
}

inline void write_json(const std::string& path, const Json& doc) { write_text(path, doc.dump(2) + "\n"); }

inline std::string fmt17(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// CSV with '#' comment lines for version and config, then a header row.
class CsvWriter {
public:
    CsvWriter(const std::string& command, const ConfigMap& config, const std::vector<std::string>& columns)
    {
        text_ += "# format_version=" + std::to_string(format_version) + "\n";
        text_ += "# command=" + command + "\n";
        for (const auto& [k, v] : config)
            text_ += "# " + k + "=" + v + "\n";
        row(columns);
    }

    void row(const std::vector<std::string>& cells)
    {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i)
                text_ += ',';
            text_ += cells[i];
        }
        text_ += '\n';
    }

    void row(const std::vector<double>& cells)
    {
        std::vector<std::string> s;
        s.reserve(cells.size());
        for (double x : cells)
            s.push_back(fmt17(x));
        row(s);
    }

    const std::string& text() const { return text_; }
    void save(const std::string& path) const { write_text(path, text_); }

private:
    std::string text_;
};

/// Mesh file: comment lines, then "rows cols u_min u_max v_min v_max", then
/// one row-major record "u v x1 y1 x2 y2" per node.
inline std::string mesh_text(const ManifoldMesh& m, const std::string& command, const ConfigMap& config)
{
    std::string out = "# format_version=" + std::to_string(format_version) + "\n# command=" + command + "\n";
    for (const auto& [k, v] : config)
        out += "# " + k + "=" + v + "\n";
    out += std::to_string(m.rows) + " " + std::to_string(m.cols) + " " + fmt17(m.u_min) + " " + fmt17(m.u_max) + " " +
           fmt17(m.v_min) + " " + fmt17(m.v_max) + "\n";
    for (const auto& n : m.nodes) {
        out += fmt17(n.u) + " " + fmt17(n.v);
        for (double x : n.point)
            out += " " + fmt17(x);
        out += '\n';
    }
    return out;
}

} // namespace hommap
