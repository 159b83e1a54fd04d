#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "multigof/types.hpp"

namespace mgof {

/// Parses a distribution spec: unif:<d> | powerlaw:<d>:<r> | piecewise:<d>:<w1>
/// | file:<path>, or a bare CSV path.
ProbVector parse_dist_spec(const std::string& text);

/// Runs the command line. Reports go to `out`, errors to `err`.
/// Exit status: 0 success, 2 validation error, 1 runtime error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mgof
