#ifndef HELMSCAT_TOOLS_RUN_CONFIG_HPP
#define HELMSCAT_TOOLS_RUN_CONFIG_HPP

#include <string>
#include <utility>
#include <vector>

#include "helmscat/geometry.hpp"
#include "helmscat/scattering.hpp"

namespace helmscat::cli {

/// Fully parsed run description. Every command reads the blocks it needs;
/// the parser is strict (unknown keys anywhere are a config error) and
/// angles arrive in degrees, converted here once.
struct RunConfig {
    std::string id = "run";
    long seed = 0;

    // geometry
    std::string geometry_kind = "disk";  // disk|square|koch|minkowski|polygon_file
    int level = 0;                       // prefractal generation level
    std::string base = "square";         // prefractal base curve: square|disk
    double disk_radius = 1.0;
    double square_side = 1.0;
    double disk_edge = 0.11;             // polygonization edge target for disks
    double ball_radius = 2.0;            // truncation radius R
    std::string polyline_file;           // polygon_file kind only

    // discretisation
    double h = 0.05;
    int mode_cutoff = -1;  // -1: default_mode_cutoff(k, R)
    int n_angles = 360;

    // physics
    double k = 2.0;
    ScatterBc bc = ScatterBc::dirichlet;
    cplx lambda{0.0, 0.0};       // constant impedance (robin only)
    double incidence_deg = 0.0;  // plane-wave direction angle

    // scatter block
    std::string route = "dtn_modes";  // density|dtn_modes
    /// radians, converted from theta_intervals_deg; empty = full circle
    std::vector<std::pair<double, double>> theta_intervals;
    /// the intervals as configured, for echoing into reports
    std::vector<std::pair<double, double>> theta_intervals_deg;

    // optimize block
    double opt_re_lo = 0.0, opt_re_hi = 1.0;
    double opt_im_lo = 0.0, opt_im_hi = 1.0;
    std::vector<double> opt_breakpoints;  // arclength; empty = constant lambda
    int opt_grid_points = 9;
    int opt_max_iterations = 300;
    double opt_tolerance = 1e-7;
};

/// Parses and validates the JSON config file. Throws ConfigError on missing
/// file, malformed JSON, unknown keys, or out-of-range values.
RunConfig parse_config(const std::string& path);

/// Builds the obstacle boundary described by the config (reads the polyline
/// file for the polygon_file kind; `config_dir` resolves relative paths).
Polyline build_geometry(const RunConfig& cfg, const std::string& config_dir);

} // namespace helmscat::cli

#endif
