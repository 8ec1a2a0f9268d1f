#ifndef PLQN_SOLVER_HPP
#define PLQN_SOLVER_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "plqn/composite.hpp"
#include "plqn/manifold.hpp"

namespace plqn {

struct SolveOptions {
  double tol = 1e-12;
  int max_iter = 50;
  std::optional<Vec> x_ref;
  std::optional<Vec> y_ref;
};

/// One row of a trace. Row 0 is the starting point.
struct IterRecord {
  int iter = 0;
  Vec x;
  Vec y;
  Vec mu;                        // stacked blocks (empty when not tracked)
  double stat_res = 0.0;         // |grad c(x)^T y|
  double sub_viol = 0.0;         // subgradient violation of y at the linearized point
  double residual = 0.0;         // the stopping residual of the method
  double err = NAN;              // |x - xref| + |y - yref| when a reference is known
  double dm_ratio = NAN;         // quasi-Newton only
  double gluing = NAN;           // restricted Newton only
  bool on_manifold = false;
  std::vector<int> active_pieces;  // at the linearized point
  bool model_sosc = true;
};

struct IterationTrace {
  std::string method;
  std::vector<IterRecord> iters;
  bool converged = false;
  std::string stop_reason;
  std::vector<std::string> warnings;

  int iterations() const { return iters.empty() ? 0 : static_cast<int>(iters.size()) - 1; }
  const IterRecord& last() const { return iters.back(); }
  /// err column when a reference was given, else the residual column.
  std::vector<double> error_sequence() const;
};

struct RestrictedState {
  Vec x;
  Vec y;
  std::vector<Vec> mu;  // one block per manifold piece (may be empty)
};

/// One Newton step on the restricted system of manifold piece j (0-based).
/// Replaces x, y and block j of mu. Throws StepError when the matrix is singular.
RestrictedState restricted_newton_step(const CompositeProblem& p, const ManifoldData& md, const RestrictedState& s,
                                       int j);

IterationTrace newton_solve(const CompositeProblem& p, const ManifoldData& md, const RestrictedState& start,
                            const SolveOptions& opts);

/// Builds the manifold from the reference solution when given, else from the
/// linearized point of the first piece-enumeration step, then runs newton_solve.
IterationTrace newton_solve_auto(const CompositeProblem& p, const Vec& x0, const Vec& y0, const SolveOptions& opts);

struct EnumCandidate {
  Vec d;
  Vec y;
  double model_value = 0.0;
  int piece = 0;
  std::vector<int> equalities;  // hyperplanes imposed with equality
  Vec lambda;
  int null_dim = 0;             // > 0: the structure admits a solution segment
  bool model_sosc = false;
  double model_min_eig = 0.0;
};

/// All critical pairs of the Newton subproblem with Hessian H, found by
/// enumerating (piece, equality set) structures. Sorted by model value, then piece.
std::vector<EnumCandidate> solve_subproblem_enum(const CompositeProblem& p, const Vec& xhat, const Vec& yhat,
                                                 const Mat& H);

/// B_k as a function of the iteration counter and the current iterate.
using HessianSchedule = std::function<Mat(int k, const Vec& x, const Vec& y)>;

IterationTrace quasi_newton_solve(const CompositeProblem& p, const Vec& x0, const Vec& y0,
                                  const HessianSchedule& schedule, const SolveOptions& opts);

/// Exact-Hessian schedule: B_k = Hess(y^k c)(x^k).
HessianSchedule exact_hessian_schedule(const CompositeProblem& p);

IterationTrace smooth_newton_solve(const CompositeProblem& p, const Vec& x0, const Vec& y0, const SolveOptions& opts);

}  // namespace plqn

#endif  // PLQN_SOLVER_HPP
