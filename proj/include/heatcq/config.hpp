#pragma once

// Structured run configuration: JSON parsing, validation with field-naming
// errors, canonical serialization (alphabetical keys, lossless doubles),
// and the two built-in presets "paper-quad" and "horseshoe".

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "heatcq/cq.hpp"
#include "heatcq/errors.hpp"
#include "heatcq/geometry.hpp"

namespace heatcq {

struct GridSpec {
    Vec2 min = Vec2(0.0, 0.0);
    Vec2 max = Vec2(1.0, 1.0);
    int nx = 0;  // grid points per axis; 0 disables the grid
    int ny = 0;
};

struct SourceSpec {
    int count = 0;  // 0 disables the exterior sources
    Vec2 center = Vec2(0.0, 0.0);
    double radius = 1.0;
};

struct RunConfig {
    std::string preset;          // "paper-quad", "horseshoe", or empty
    std::vector<Vec2> vertices;  // explicit geometry when preset is empty
    double rho = 1.0;
    double kappa = 1.0;
    std::string scheme = "bdf:2";
    double k = 0.125;
    double end_time = 1.0;  // key "T"
    int degree = 2;
    double h = 0.5;
    int levels = 3;
    bool manufactured = false;
    Vec2 x_sc = Vec2(1.5, 1.6);
    double t_lag = 1e-3;
    std::vector<double> snapshot_times;
    GridSpec grid;
    SourceSpec sources;
    std::string out_dir = "out";

    [[nodiscard]] Polygon polygon() const {
        if (preset == "paper-quad") return paper_quadrilateral();
        if (preset == "horseshoe") return horseshoe_polygon();
        if (!preset.empty()) throw ConfigError("geometry.preset: unknown preset \"" + preset + "\"");
        try {
            return make_polygon(vertices);
        } catch (const std::invalid_argument& e) {
            // Geometry supplied through a config file is a configuration error.
            throw ConfigError(std::string("geometry.vertices: ") + e.what());
        }
    }

    void validate() const {
        if (preset.empty() && vertices.size() < 3)
            throw ConfigError("geometry: need a preset or at least 3 vertices");
        (void)polygon();
        if (!(rho > 0.0)) throw ConfigError("rho: must be positive");
        if (!(kappa > 0.0)) throw ConfigError("kappa: must be positive");
        if (!(k > 0.0)) throw ConfigError("k: must be positive");
        if (!(end_time > 0.0)) throw ConfigError("T: must be positive");
        if (degree < 0) throw ConfigError("degree: must be >= 0");
        if (!(h > 0.0)) throw ConfigError("h: must be positive");
        if (levels < 1) throw ConfigError("levels: must be >= 1");
        if (t_lag < 0.0) throw ConfigError("t_lag: must be nonnegative");
        if (grid.nx < 0 || grid.ny < 0) throw ConfigError("grid: sizes must be nonnegative");
        if ((grid.nx == 0) != (grid.ny == 0)) throw ConfigError("grid: set both nx and ny");
        if (grid.nx > 0 && !(grid.max.x() > grid.min.x() && grid.max.y() > grid.min.y()))
            throw ConfigError("grid: max must exceed min componentwise");
        if (sources.count < 0) throw ConfigError("sources.count: must be nonnegative");
        if (sources.count > 0 && !(sources.radius > 0.0))
            throw ConfigError("sources.radius: must be positive");
        for (const double t : snapshot_times)
            if (t < 0.0 || t > end_time)
                throw ConfigError("snapshots.times: times must lie in [0, T]");
        if (out_dir.empty()) throw ConfigError("out: output directory must be nonempty");
        // Also fails early on an unknown scheme descriptor or step mismatch.
        (void)CQScheme::parse(scheme, k, num_steps());
        if (std::abs(num_steps() * k - end_time) > 1e-9 * end_time)
            throw ConfigError("k: T must be an integer multiple of the step size");
    }

    [[nodiscard]] int num_steps() const {
        const int n = static_cast<int>(std::llround(end_time / k));
        return n < 1 ? 1 : n;
    }
};

namespace detail {

[[nodiscard]] inline Vec2 vec2_from(const nlohmann::json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ConfigError(field + ": expected [x, y]");
    return Vec2(j[0].get<double>(), j[1].get<double>());
}

[[nodiscard]] inline nlohmann::json vec2_to(const Vec2& v) {
    return nlohmann::json::array({v.x(), v.y()});
}

template <typename T>
[[nodiscard]] T fetch(const nlohmann::json& j, const std::string& field, const T& fallback) {
    if (!j.contains(field)) return fallback;
    try {
        return j.at(field).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(field + ": wrong type");
    }
}

}  // namespace detail

[[nodiscard]] inline RunConfig parse_config(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    RunConfig cfg;
    if (j.contains("geometry")) {
        const auto& g = j.at("geometry");
        if (!g.is_object()) throw ConfigError("geometry: expected an object");
        cfg.preset = detail::fetch<std::string>(g, "preset", "");
        if (g.contains("vertices")) {
            if (!g.at("vertices").is_array()) throw ConfigError("geometry.vertices: expected array");
            for (const auto& v : g.at("vertices"))
                cfg.vertices.push_back(detail::vec2_from(v, "geometry.vertices"));
        }
    }
    cfg.rho = detail::fetch<double>(j, "rho", cfg.rho);
    cfg.kappa = detail::fetch<double>(j, "kappa", cfg.kappa);
    cfg.scheme = detail::fetch<std::string>(j, "scheme", cfg.scheme);
    cfg.k = detail::fetch<double>(j, "k", cfg.k);
    cfg.end_time = detail::fetch<double>(j, "T", cfg.end_time);
    cfg.degree = detail::fetch<int>(j, "degree", cfg.degree);
    cfg.h = detail::fetch<double>(j, "h", cfg.h);
    cfg.levels = detail::fetch<int>(j, "levels", cfg.levels);
    if (j.contains("manufactured")) {
        const auto& m = j.at("manufactured");
        if (!m.is_object()) throw ConfigError("manufactured: expected an object");
        cfg.manufactured = detail::fetch<bool>(m, "enabled", false);
        if (m.contains("x_sc")) cfg.x_sc = detail::vec2_from(m.at("x_sc"), "manufactured.x_sc");
        cfg.t_lag = detail::fetch<double>(m, "t_lag", cfg.t_lag);
    }
    if (j.contains("snapshots")) {
        const auto& s = j.at("snapshots");
        if (!s.is_object()) throw ConfigError("snapshots: expected an object");
        cfg.snapshot_times = detail::fetch<std::vector<double>>(s, "times", {});
        if (s.contains("grid")) {
            const auto& g = s.at("grid");
            if (!g.is_object()) throw ConfigError("snapshots.grid: expected an object");
            if (g.contains("min")) cfg.grid.min = detail::vec2_from(g.at("min"), "snapshots.grid.min");
            if (g.contains("max")) cfg.grid.max = detail::vec2_from(g.at("max"), "snapshots.grid.max");
            cfg.grid.nx = detail::fetch<int>(g, "nx", 0);
            cfg.grid.ny = detail::fetch<int>(g, "ny", 0);
        }
    }
    if (j.contains("sources")) {
        const auto& s = j.at("sources");
        if (!s.is_object()) throw ConfigError("sources: expected an object");
        cfg.sources.count = detail::fetch<int>(s, "count", 0);
        if (s.contains("center"))
            cfg.sources.center = detail::vec2_from(s.at("center"), "sources.center");
        cfg.sources.radius = detail::fetch<double>(s, "radius", cfg.sources.radius);
    }
    cfg.out_dir = detail::fetch<std::string>(j, "out", cfg.out_dir);
    cfg.validate();
    return cfg;
}

[[nodiscard]] inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open \"" + path + "\"");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

// Canonical form: alphabetically ordered keys, two-space indent, shortest
// round-trip double formatting.  serialize(parse(text)) is idempotent.
[[nodiscard]] inline std::string serialize_config(const RunConfig& cfg) {
    nlohmann::json j;
    nlohmann::json g;
    if (!cfg.preset.empty()) g["preset"] = cfg.preset;
    if (!cfg.vertices.empty()) {
        nlohmann::json verts = nlohmann::json::array();
        for (const Vec2& v : cfg.vertices) verts.push_back(detail::vec2_to(v));
        g["vertices"] = verts;
    }
    j["geometry"] = g;
    j["rho"] = cfg.rho;
    j["kappa"] = cfg.kappa;
    j["scheme"] = cfg.scheme;
    j["k"] = cfg.k;
    j["T"] = cfg.end_time;
    j["degree"] = cfg.degree;
    j["h"] = cfg.h;
    j["levels"] = cfg.levels;
    j["manufactured"] = {{"enabled", cfg.manufactured},
                         {"t_lag", cfg.t_lag},
                         {"x_sc", detail::vec2_to(cfg.x_sc)}};
    nlohmann::json snaps;
    snaps["times"] = cfg.snapshot_times;
    snaps["grid"] = {{"min", detail::vec2_to(cfg.grid.min)},
                     {"max", detail::vec2_to(cfg.grid.max)},
                     {"nx", cfg.grid.nx},
                     {"ny", cfg.grid.ny}};
    j["snapshots"] = snaps;
    j["sources"] = {{"count", cfg.sources.count},
                    {"center", detail::vec2_to(cfg.sources.center)},
                    {"radius", cfg.sources.radius}};
    j["out"] = cfg.out_dir;
    return j.dump(2) + "\n";
}

[[nodiscard]] inline RunConfig preset_config(const std::string& name) {
    RunConfig cfg;
    if (name == "paper-quad") {
        cfg.preset = "paper-quad";
        cfg.rho = 1.5;
        cfg.kappa = 1.2;
        cfg.scheme = "bdf:2";
        cfg.k = 1.0 / 16.0;
        cfg.end_time = 1.0;
        cfg.degree = 2;
        cfg.h = 0.5;
        cfg.levels = 4;
        cfg.manufactured = true;
        cfg.x_sc = Vec2(1.5, 1.6);
        cfg.t_lag = 1e-3;
        cfg.snapshot_times = {0.25, 0.5, 1.0};
        cfg.grid = GridSpec{Vec2(-0.5, -0.5), Vec2(1.5, 1.5), 21, 21};
        cfg.out_dir = "out";
    } else if (name == "horseshoe") {
        cfg.preset = "horseshoe";
        cfg.rho = 1.0;
        cfg.kappa = 100.0;
        cfg.scheme = "bdf:4";
        cfg.k = 1.0 / 128.0;
        cfg.end_time = 1.0;
        cfg.degree = 2;
        cfg.h = 0.25;
        cfg.levels = 3;
        cfg.manufactured = false;
        cfg.t_lag = 1e-3;
        cfg.snapshot_times = {0.0, 0.06, 0.2, 0.375, 0.75, 1.0};
        cfg.grid = GridSpec{Vec2(-1.0, -1.0), Vec2(4.0, 4.0), 41, 41};
        cfg.sources = SourceSpec{8, Vec2(1.5, 1.5), 2.6};
        cfg.out_dir = "out";
    } else {
        throw ConfigError("preset: unknown preset \"" + name + "\"");
    }
    cfg.validate();
    return cfg;
}

// Regular grid points, row-major from min to max inclusive.
[[nodiscard]] inline std::vector<Vec2> grid_points(const GridSpec& grid) {
    std::vector<Vec2> pts;
    if (grid.nx <= 0 || grid.ny <= 0) return pts;
    pts.reserve(static_cast<size_t>(grid.nx) * grid.ny);
    for (int iy = 0; iy < grid.ny; ++iy) {
        const double y = grid.ny == 1 ? grid.min.y()
                                      : grid.min.y() + (grid.max.y() - grid.min.y()) * iy /
                                                           (grid.ny - 1);
        for (int ix = 0; ix < grid.nx; ++ix) {
            const double x = grid.nx == 1 ? grid.min.x()
                                          : grid.min.x() + (grid.max.x() - grid.min.x()) * ix /
                                                               (grid.nx - 1);
            pts.emplace_back(x, y);
        }
    }
    return pts;
}

}  // namespace heatcq
