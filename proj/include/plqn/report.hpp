#ifndef PLQN_REPORT_HPP
#define PLQN_REPORT_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "plqn/problem_io.hpp"
#include "plqn/solver.hpp"

namespace plqn {

enum ExitCode { kExitPass = 0, kExitCertifiedFailure = 1, kExitInputError = 2, kExitRegimeError = 3 };

struct CliOptions {
  std::optional<std::string> method;
  std::optional<double> tol;
  std::optional<int> max_iter;
  std::uint64_t seed = 42;
  bool strict = false;
  std::string point;  // "", "random" or a point file
};

struct Report {
  std::string text;
  std::string json;
  std::string trace_csv;  // solve and rate only
  int exit_code = kExitPass;
};

/// Runs validate | certify | solve | rate | check-derivs on a loaded problem.
/// Solver regime failures become exit code 3; malformed input propagates as exceptions.
Report run_report(const std::string& command, const LoadedProblem& lp, const CliOptions& opts);

std::string trace_to_csv(const IterationTrace& tr);

}  // namespace plqn

#endif  // PLQN_REPORT_HPP
