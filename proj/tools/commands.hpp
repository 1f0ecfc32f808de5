#ifndef HELMSCAT_TOOLS_COMMANDS_HPP
#define HELMSCAT_TOOLS_COMMANDS_HPP

#include <string>

#include "run_config.hpp"

namespace helmscat::cli {

/// Shared invocation context: parsed config, where it came from (for
/// resolving relative paths), the output directory (created on demand).
struct Invocation {
    RunConfig cfg;
    std::string config_dir;
    std::string out_dir;
    bool verbose = false;
};

// Each command writes its artifacts under out_dir and returns the process
// exit code: 0 success, 1 validation failure (3 is raised by exceptions).
int cmd_geom(const Invocation& inv);
int cmd_mesh(const Invocation& inv);
int cmd_operators(const Invocation& inv);
int cmd_scatter(const Invocation& inv);
int cmd_optimize(const Invocation& inv);
int cmd_validate(const Invocation& inv);

} // namespace helmscat::cli

#endif
