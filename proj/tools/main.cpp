#include <CLI11.hpp>

#include <Eigen/Core>

#include <filesystem>
#include <iostream>

#include "commands.hpp"

namespace {

using helmscat::cli::Invocation;

int dispatch(const std::string& name, const Invocation& inv) {
    using helmscat::cli::cmd_geom;
    using helmscat::cli::cmd_mesh;
    using helmscat::cli::cmd_operators;
    using helmscat::cli::cmd_optimize;
    using helmscat::cli::cmd_scatter;
    using helmscat::cli::cmd_validate;
    if (name == "geom") return cmd_geom(inv);
    if (name == "mesh") return cmd_mesh(inv);
    if (name == "operators") return cmd_operators(inv);
    if (name == "scatter") return cmd_scatter(inv);
    if (name == "optimize") return cmd_optimize(inv);
    return cmd_validate(inv);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"helmscat: variational Helmholtz scattering laboratory"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_dir = "out";
    int threads = 1;
    bool verbose = false;
    app.add_option("--config", config_path, "JSON run configuration")
        ->required();
    app.add_option("--out", out_dir, "output directory (created if missing)");
    app.add_option("--threads", threads, "dense-algebra thread count")
        ->check(CLI::PositiveNumber);
    app.add_flag("--verbose", verbose, "progress output");

    const char* names[] = {"geom", "mesh", "operators", "scatter", "optimize",
                           "validate"};
    const char* briefs[] = {
        "generate and validate the obstacle boundary",
        "triangulate the truncated domain",
        "assemble boundary operators and the Calderon residual report",
        "solve the scattering problem, export far field and power",
        "maximise the far-field power over an impedance class",
        "run the Mie/identity validation suite"};
    for (int i = 0; i < 6; ++i) app.add_subcommand(names[i], briefs[i]);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;  // bad usage is a config error
    }

    Eigen::setNbThreads(threads);

    Invocation inv;
    inv.out_dir = out_dir;
    inv.verbose = verbose;
    try {
        inv.cfg = helmscat::cli::parse_config(config_path);
        inv.config_dir =
            std::filesystem::path(config_path).parent_path().string();
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }

    try {
        return dispatch(app.get_subcommands().front()->get_name(), inv);
    } catch (const helmscat::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    }
}
