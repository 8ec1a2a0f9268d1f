#ifndef PLQN_SIMPLEX_HPP
#define PLQN_SIMPLEX_HPP

#include "plqn/types.hpp"

namespace plqn::lp {

/// minimize cost^T x  s.t.  eq_A x = eq_b,  in_A x <= in_b,  x free.
/// Either constraint block may have zero rows.
struct LinearProgram {
  Mat eq_A;
  Vec eq_b;
  Mat in_A;
  Vec in_b;
  Vec cost;
};

enum class Status { Optimal, Infeasible, Unbounded };

struct Result {
  Status status = Status::Infeasible;
  Vec x;
  double objective = 0.0;
};

/// Dense two-phase tableau simplex using Bland's smallest-index rule, so it
/// terminates on degenerate problems. Intended for small dense problems.
Result solve(const LinearProgram& problem);

/// Convenience: a feasible point of {eq_A x = eq_b, in_A x <= in_b}, if any.
bool feasible(const Mat& eq_A, const Vec& eq_b, const Mat& in_A, const Vec& in_b, Vec* point = nullptr);

}  // namespace plqn::lp

#endif  // PLQN_SIMPLEX_HPP
