#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qsched::cli {

enum ExitCode : int {
    kSuccess = 0,
    kConfigError = 1,
    kRuntimeError = 2,
};

/// Entry point shared by the qsched binary and the tests. `args` excludes
/// the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "subcommand --flag" for every long option the CLI accepts, except --help.
std::vector<std::string> flag_names();

}  // namespace qsched::cli
