#ifndef PLQN_POLYHEDRON_HPP
#define PLQN_POLYHEDRON_HPP

#include <optional>
#include <vector>

#include "plqn/types.hpp"

namespace plqn {

/// Uniform slack for polyhedral membership tests.
inline constexpr double kMembershipSlack = 1e-9;

/// {y : E y = e, F y <= f}.
struct PolyhedronH {
  Mat E;
  Vec e;
  Mat F;
  Vec f;

  static PolyhedronH whole_space(Eigen::Index dim);

  Eigen::Index ambient_dim() const;
  /// Largest constraint violation at y (0 when all rows hold).
  double max_violation(const Vec& y) const;
  bool contains(const Vec& y, double slack = kMembershipSlack) const;
  bool is_empty() const;
  std::optional<Vec> find_point() const;

  PolyhedronH intersect(const PolyhedronH& other) const;
  PolyhedronH add_equalities(const Mat& rows, const Vec& rhs) const;
  PolyhedronH add_inequalities(const Mat& rows, const Vec& rhs) const;
};

struct AffineHull {
  Mat eq_rows;               // rows defining aff P (explicit + implicit equalities)
  Vec eq_rhs;
  Mat par_basis;             // orthonormal basis of par P
  std::vector<int> implicit; // inequality rows that hold with equality on all of P
  Vec point;                 // some point of P
  int dim() const { return static_cast<int>(par_basis.cols()); }
};

/// Affine hull via one LP per inequality row. Empty P gives nullopt.
std::optional<AffineHull> affine_hull(const PolyhedronH& p);

/// Point of P maximizing the uniform slack t on non-implicit rows (capped at 1).
/// Returns the point and the achieved slack; nullopt when P is empty.
struct InteriorPoint {
  Vec point;
  double slack = 0.0;
};
std::optional<InteriorPoint> relative_interior_point(const PolyhedronH& p, const AffineHull& hull);

/// max <objective, y> over P. nullopt when P is empty; +inf (unbounded) reported via flag.
struct LinearMax {
  bool bounded = true;
  double value = 0.0;
  Vec argmax;
};
std::optional<LinearMax> maximize(const PolyhedronH& p, const Vec& objective);

/// Generators of the polyhedral cone {v : G v <= 0, Eq v = 0}: an orthonormal
/// lineality basis plus the (unit) extreme rays of the pointed part orthogonal
/// to it. Enumeration over active-row subsets; intended for small dimensions.
struct ConeGenerators {
  Mat lineality;            // columns
  std::vector<Vec> rays;
};
ConeGenerators cone_generators(Eigen::Index dim, const Mat& G, const Mat& Eq = Mat());

/// True iff the cone {v : G v <= 0, Eq v = 0} is {0}.
bool cone_is_trivial(Eigen::Index dim, const Mat& G, const Mat& Eq = Mat());

/// H-representation of cone{columns of generators} in R^dim, obtained as the
/// polar of {v : generators^T v <= 0}. Lineality of that polar cone becomes
/// equality rows, its extreme rays become inequality rows.
PolyhedronH conic_hull_hrep(const Mat& generators, Eigen::Index dim);

}  // namespace plqn

#endif  // PLQN_POLYHEDRON_HPP
