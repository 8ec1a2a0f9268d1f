#ifndef PLQN_COMPOSITE_HPP
#define PLQN_COMPOSITE_HPP

#include <cmath>
#include <optional>
#include <string>

#include "plqn/expr.hpp"
#include "plqn/plq.hpp"
#include "plqn/polyhedron.hpp"

namespace plqn {

/// f(x) = h(c(x)).
struct CompositeProblem {
  PLQFunction h;
  SmoothMap c;

  CompositeProblem(PLQFunction h_in, SmoothMap c_in);
  int n() const { return c.n; }
  int m() const { return h.m(); }
  ExtReal objective(const Vec& x) const;
};

/// Interior slack that certifies membership in a relative interior.
inline constexpr double kRiSlack = 1e-7;

struct MultiplierSet {
  enum class Status { Empty, Singleton, Nonsingleton };
  PolyhedronH polyhedron;
  Status status = Status::Empty;
  Vec y;                   // the element when singleton, else some element (if nonempty)
  bool supported = true;   // false when BCQ fails: compactness is not guaranteed
};

std::string to_string(MultiplierSet::Status s);

struct CQReport {
  bool bcq = false;
  bool tc = false;
  bool sc = false;
  std::optional<Vec> ybar;  // set when sc holds
  bool m_singleton = false;
  double ri_slack = 0.0;    // achieved interior slack on the multiplier polyhedron
};

/// Versions taking c(x) and the Jacobian directly (m x n).
MultiplierSet multiplier_set_at(const PLQFunction& h, const Vec& cbar, const Mat& jac);
CQReport check_cqs_at(const PLQFunction& h, const Vec& cbar, const Mat& jac);

MultiplierSet multiplier_set(const CompositeProblem& p, const Vec& x);
CQReport check_cqs(const CompositeProblem& p, const Vec& x);

/// d lies in the non-ascent cone at x. Throws PreconditionError when BCQ fails.
bool nonascent_contains(const CompositeProblem& p, const Vec& x, const Vec& d);

struct KKTResidual {
  double stationarity = 0.0;
  ExtReal subdiff_violation;

  double total() const {
    return subdiff_violation.finite() ? stationarity + subdiff_violation.value() : INFINITY;
  }
};

KKTResidual kkt_residual(const CompositeProblem& p, const Vec& x, const Vec& y);

}  // namespace plqn

#endif  // PLQN_COMPOSITE_HPP
