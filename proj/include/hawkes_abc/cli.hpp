#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hawkes_abc {

/// Entry point of the hawkes-abc tool. args excludes the program name.
/// Returns the process exit status; diagnostics go to err.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hawkes_abc
