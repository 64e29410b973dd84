#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pslra::cli {

/// Exit codes.
inline constexpr int kSuccess = 0;
inline constexpr int kNotConverged = 1;
inline constexpr int kInputError = 2;

/// Runs one subcommand. `args` excludes the program name. Reports go to
/// --out when given, otherwise to `out`; diagnostics and errors go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

} // namespace pslra::cli
