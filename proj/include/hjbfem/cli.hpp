#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hjb {

/// Exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 1,
    kExitMesh = 2,
    kExitSolver = 3,
    kExitNotAcute = 4,
};

/// Runs `hjbfem <args...>`; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hjb
