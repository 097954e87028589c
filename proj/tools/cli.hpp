#pragma once

// Command layer of the socdispatch tool, kept apart from main() so tests can
// drive it in-process.

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "socdispatch/linprog.hpp"

namespace socdispatch::cli {

enum ExitCode : int {
  kOk = 0,
  kInvalid = 2,       // parse or validation failure
  kPrecondition = 3,  // e.g. non-EDCR bid in one-shot mode
  kGuardRail = 4,
  kSolver = 5,        // infeasible, unbounded or numerical breakdown
};

struct Environment {
  std::optional<std::string> tol;  // value of SOCDISPATCH_TOL
};

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const Environment& env = {});

/// "1e-7" sets every tolerance; "feas=1e-9,gap=1e-6" sets the named ones.
lp::Tolerances parse_tolerances(const std::string& text, lp::Tolerances base = {});

/// 12 significant digits.
std::string format_number(double v);

}  // namespace socdispatch::cli
