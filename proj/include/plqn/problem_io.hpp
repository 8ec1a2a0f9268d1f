#ifndef PLQN_PROBLEM_IO_HPP
#define PLQN_PROBLEM_IO_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "plqn/composite.hpp"
#include "plqn/plq.hpp"

namespace plqn {

struct SolverSettings {
  std::string method = "newton";   // newton | quasi | smooth | enum
  double tol = 1e-12;
  int max_iter = 50;
  std::string schedule = "exact";  // quasi-Newton: exact | decay | fixed
  double shift = 1.0;              // fixed schedule: B = Hbar + shift I
};

struct LoadedProblem {
  CompositeProblem problem;
  std::optional<Vec> x_ref;
  std::optional<Vec> y_ref;
  std::optional<Vec> x0;
  std::optional<Vec> y0;
  SolverSettings solver;
  ValidationReport validation;
};

/// Reads and validates a problem file. Throws SchemaError (with a JSON pointer),
/// ParseError or ArgumentError for malformed input.
LoadedProblem load_problem(const std::string& path, std::uint64_t seed = 42, bool strict = false);
LoadedProblem load_problem_text(const std::string& text, std::uint64_t seed = 42, bool strict = false);

/// A point file: {"x": [...], "y": [...]} with y optional.
struct PointFile {
  Vec x;
  std::optional<Vec> y;
};
PointFile load_point(const std::string& path, int n, int m);

}  // namespace plqn

#endif  // PLQN_PROBLEM_IO_HPP
