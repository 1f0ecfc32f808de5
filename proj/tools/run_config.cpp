#include "run_config.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <set>

#include "helmscat/io.hpp"

namespace helmscat::cli {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::string& where,
                  const std::set<std::string>& allowed) {
    for (const auto& [key, value] : obj.items())
        if (!allowed.count(key))
            throw ConfigError("unknown key '" + key + "' in " + where);
}

double get_number(const json& obj, const std::string& where,
                  const std::string& key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number())
        throw ConfigError(where + "." + key + " must be a number");
    return obj[key].get<double>();
}

int get_int(const json& obj, const std::string& where, const std::string& key,
            int fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number_integer())
        throw ConfigError(where + "." + key + " must be an integer");
    return obj[key].get<int>();
}

std::string get_string(const json& obj, const std::string& where,
                       const std::string& key, const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_string())
        throw ConfigError(where + "." + key + " must be a string");
    return obj[key].get<std::string>();
}

cplx get_complex(const json& obj, const std::string& where,
                 const std::string& key, cplx fallback) {
    if (!obj.contains(key)) return fallback;
    const json& c = obj[key];
    if (!c.is_object())
        throw ConfigError(where + "." + key + " must be {\"re\":..,\"im\":..}");
    require_keys(c, where + "." + key, {"re", "im"});
    return {get_number(c, where + "." + key, "re", 0.0),
            get_number(c, where + "." + key, "im", 0.0)};
}

std::vector<std::pair<double, double>> get_intervals_deg(
    const json& obj, const std::string& where, const std::string& key) {
    std::vector<std::pair<double, double>> out;
    if (!obj.contains(key)) return out;
    const json& arr = obj[key];
    if (!arr.is_array())
        throw ConfigError(where + "." + key + " must be an array of [lo, hi]");
    for (const json& iv : arr) {
        if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number() ||
            !iv[1].is_number())
            throw ConfigError(where + "." + key +
                              " entries must be [lo_deg, hi_deg]");
        const double lo = iv[0].get<double>(), hi = iv[1].get<double>();
        if (!(lo < hi) || lo < 0.0 || hi > 360.0)
            throw ConfigError(where + "." + key +
                              ": intervals must satisfy 0 <= lo < hi <= 360");
        out.emplace_back(lo, hi);
    }
    return out;
}

} // namespace

RunConfig parse_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    json root;
    try {
        root = json::parse(f);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config root must be an object");
    require_keys(root, "config",
                 {"id", "seed", "geometry", "discretisation", "physics",
                  "scatter", "optimize"});

    RunConfig cfg;
    cfg.id = get_string(root, "config", "id", cfg.id);
    cfg.seed = get_int(root, "config", "seed", 0);

    if (root.contains("geometry")) {
        const json& g = root["geometry"];
        if (!g.is_object()) throw ConfigError("geometry must be an object");
        require_keys(g, "geometry",
                     {"kind", "level", "base", "a", "side", "edge", "R", "file"});
        cfg.geometry_kind = get_string(g, "geometry", "kind", cfg.geometry_kind);
        cfg.level = get_int(g, "geometry", "level", cfg.level);
        cfg.base = get_string(g, "geometry", "base", cfg.base);
        cfg.disk_radius = get_number(g, "geometry", "a", cfg.disk_radius);
        cfg.square_side = get_number(g, "geometry", "side", cfg.square_side);
        cfg.disk_edge = get_number(g, "geometry", "edge", cfg.disk_edge);
        cfg.ball_radius = get_number(g, "geometry", "R", cfg.ball_radius);
        cfg.polyline_file = get_string(g, "geometry", "file", "");

        static const std::set<std::string> kinds{"disk", "square", "koch",
                                                 "minkowski", "polygon_file"};
        if (!kinds.count(cfg.geometry_kind))
            throw ConfigError("geometry.kind must be one of disk, square, "
                              "koch, minkowski, polygon_file");
        if (cfg.base != "square" && cfg.base != "disk")
            throw ConfigError("geometry.base must be square or disk");
        if (cfg.geometry_kind == "polygon_file" && cfg.polyline_file.empty())
            throw ConfigError("geometry.file is required for polygon_file");
        if (cfg.level < 0) throw ConfigError("geometry.level must be >= 0");
        if (!(cfg.ball_radius > 0.0))
            throw ConfigError("geometry.R must be positive");
    }

    if (root.contains("discretisation")) {
        const json& d = root["discretisation"];
        if (!d.is_object()) throw ConfigError("discretisation must be an object");
        require_keys(d, "discretisation", {"h", "M", "n_angles"});
        cfg.h = get_number(d, "discretisation", "h", cfg.h);
        cfg.mode_cutoff = get_int(d, "discretisation", "M", cfg.mode_cutoff);
        cfg.n_angles = get_int(d, "discretisation", "n_angles", cfg.n_angles);
        if (!(cfg.h > 0.0)) throw ConfigError("discretisation.h must be positive");
        if (cfg.n_angles < 8)
            throw ConfigError("discretisation.n_angles must be >= 8");
    }

    if (root.contains("physics")) {
        const json& p = root["physics"];
        if (!p.is_object()) throw ConfigError("physics must be an object");
        require_keys(p, "physics", {"k", "bc", "impedance", "incidence_deg"});
        cfg.k = get_number(p, "physics", "k", cfg.k);
        if (!(cfg.k > 0.0)) throw ConfigError("physics.k must be positive");
        const std::string bc = get_string(p, "physics", "bc", "dirichlet");
        if (bc == "dirichlet") cfg.bc = ScatterBc::dirichlet;
        else if (bc == "neumann") cfg.bc = ScatterBc::neumann;
        else if (bc == "robin") cfg.bc = ScatterBc::robin;
        else
            throw ConfigError("physics.bc must be dirichlet, neumann or robin");
        cfg.lambda = get_complex(p, "physics", "impedance", cfg.lambda);
        cfg.incidence_deg = get_number(p, "physics", "incidence_deg", 0.0);
    }

    if (root.contains("scatter")) {
        const json& s = root["scatter"];
        if (!s.is_object()) throw ConfigError("scatter must be an object");
        require_keys(s, "scatter", {"route", "theta_intervals_deg"});
        cfg.route = get_string(s, "scatter", "route", cfg.route);
        if (cfg.route != "density" && cfg.route != "dtn_modes")
            throw ConfigError("scatter.route must be density or dtn_modes");
        cfg.theta_intervals_deg =
            get_intervals_deg(s, "scatter", "theta_intervals_deg");
    }

    if (root.contains("optimize")) {
        const json& o = root["optimize"];
        if (!o.is_object()) throw ConfigError("optimize must be an object");
        require_keys(o, "optimize",
                     {"re", "im", "breakpoints", "grid_points", "max_iterations",
                      "tolerance", "theta_intervals_deg"});
        for (const char* axis : {"re", "im"}) {
            if (!o.contains(axis)) continue;
            const json& b = o[axis];
            if (!b.is_array() || b.size() != 2 || !b[0].is_number() ||
                !b[1].is_number())
                throw ConfigError(std::string("optimize.") + axis +
                                  " must be [lo, hi]");
            double& lo = (axis[0] == 'r') ? cfg.opt_re_lo : cfg.opt_im_lo;
            double& hi = (axis[0] == 'r') ? cfg.opt_re_hi : cfg.opt_im_hi;
            lo = b[0].get<double>();
            hi = b[1].get<double>();
            if (lo > hi)
                throw ConfigError(std::string("optimize.") + axis +
                                  ": lo must not exceed hi");
        }
        if (o.contains("breakpoints")) {
            if (!o["breakpoints"].is_array())
                throw ConfigError("optimize.breakpoints must be an array");
            for (const json& b : o["breakpoints"]) {
                if (!b.is_number())
                    throw ConfigError("optimize.breakpoints must be numbers");
                cfg.opt_breakpoints.push_back(b.get<double>());
            }
        }
        cfg.opt_grid_points =
            get_int(o, "optimize", "grid_points", cfg.opt_grid_points);
        cfg.opt_max_iterations =
            get_int(o, "optimize", "max_iterations", cfg.opt_max_iterations);
        cfg.opt_tolerance =
            get_number(o, "optimize", "tolerance", cfg.opt_tolerance);
        const auto deg =
            get_intervals_deg(o, "optimize", "theta_intervals_deg");
        if (!deg.empty()) {
            // the optimizer window overrides the scatter one when given
            cfg.theta_intervals_deg = deg;
        }
    }

    cfg.theta_intervals.clear();
    for (const auto& [lo, hi] : cfg.theta_intervals_deg)
        cfg.theta_intervals.emplace_back(lo * pi / 180.0, hi * pi / 180.0);

    return cfg;
}

Polyline build_geometry(const RunConfig& cfg, const std::string& config_dir) {
    if (cfg.geometry_kind == "disk")
        return make_disk(cfg.disk_radius, cfg.disk_edge);
    if (cfg.geometry_kind == "square") return make_square(cfg.square_side);
    if (cfg.geometry_kind == "polygon_file") {
        std::filesystem::path p(cfg.polyline_file);
        if (p.is_relative()) p = std::filesystem::path(config_dir) / p;
        return read_polyline_csv(p.string());
    }
    const Polyline base = (cfg.base == "disk")
                              ? make_disk(cfg.disk_radius, cfg.disk_edge)
                              : make_square(cfg.square_side);
    return generate_prefractal(prefractal_kind_from_string(cfg.geometry_kind),
                               cfg.level, base);
}

} // namespace helmscat::cli
