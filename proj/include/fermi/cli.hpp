#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fermi {

enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_solver = 2, exit_invariant = 3 };

/// Entry point behind the `fermi` executable. args excludes the program name.
int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fermi
