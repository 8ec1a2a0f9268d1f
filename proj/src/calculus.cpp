#include "plqn/calculus.hpp"

#include <cmath>

namespace plqn {

namespace {

constexpr const char* kModule = "plq_calculus";

ActiveProfile finite_profile(const PLQFunction& h, const Vec& c) {
  ActiveProfile prof = eval_with_active(h, c);
  if (!prof.value.finite()) throw DomainError(kModule, "point is outside dom h");
  return prof;
}

bool in_tangent(const ConePair& cp, const Vec& w) {
  if (cp.tangent_rows.rows() == 0) return true;
  for (Eigen::Index i = 0; i < cp.tangent_rows.rows(); ++i) {
    const double tol = 1e-10 * cp.tangent_rows.row(i).norm() * (1.0 + w.norm());
    if (cp.tangent_rows.row(i).dot(w) > tol) return false;
  }
  return true;
}

// Shifted cone g + {u : E u = 0, F u <= 0} written as a polyhedron in y.
PolyhedronH shift_cone(const PolyhedronH& cone, const Vec& g) {
  PolyhedronH p = cone;
  p.e = cone.E.rows() > 0 ? Vec(cone.E * g) : Vec(0);
  p.f = cone.F.rows() > 0 ? Vec(cone.F * g) : Vec(0);
  return p;
}

}  // namespace

ConePair piece_cones(const PLQFunction& h, int k, const Vec& c) {
  const std::vector<int> act = h.active_hyperplanes(c);
  const auto l = static_cast<Eigen::Index>(act.size());
  ConePair cp;
  cp.normal_generators.resize(h.m(), l);
  cp.tangent_rows.resize(l, h.m());
  for (Eigen::Index i = 0; i < l; ++i) {
    const Vec v = h.oriented_normal(k, act[static_cast<size_t>(i)]);
    cp.normal_generators.col(i) = v;
    cp.tangent_rows.row(i) = v.transpose();
  }
  return cp;
}

ExtReal dir_deriv_first(const PLQFunction& h, const Vec& c, const Vec& w) {
  const ActiveProfile prof = finite_profile(h, c);
  for (int k : prof.active_pieces) {
    if (in_tangent(piece_cones(h, k, c), w)) return h.piece_gradient(k, c).dot(w);
  }
  return ExtReal::infinity();
}

ExtReal dir_deriv_second(const PLQFunction& h, const Vec& c, const Vec& w) {
  const ActiveProfile prof = finite_profile(h, c);
  for (int k : prof.active_pieces) {
    if (in_tangent(piece_cones(h, k, c), w)) return w.dot(h.piece(k).Q * w);
  }
  return ExtReal::infinity();
}

PolyhedronH subdiff_hrep(const PLQFunction& h, const Vec& c) {
  const ActiveProfile prof = finite_profile(h, c);
  PolyhedronH out = PolyhedronH::whole_space(h.m());
  for (int k : prof.active_pieces) {
    const PolyhedronH cone = conic_hull_hrep(piece_cones(h, k, c).normal_generators, h.m());
    out = out.intersect(shift_cone(cone, h.piece_gradient(k, c)));
  }
  return out;
}

PolyhedronH domain_normal_cone(const PLQFunction& h, const Vec& c) {
  const ActiveProfile prof = finite_profile(h, c);
  PolyhedronH out = PolyhedronH::whole_space(h.m());
  for (int k : prof.active_pieces) out = out.intersect(conic_hull_hrep(piece_cones(h, k, c).normal_generators, h.m()));
  return out;
}

ExtReal second_subderivative(const PLQFunction& h, const Vec& c, const Vec& y, const Vec& w) {
  if (!subdiff_hrep(h, c).contains(y)) throw ArgumentError(kModule, "y is not a subgradient at c");
  const ExtReal d1 = dir_deriv_first(h, c, w);
  if (!d1.finite()) return ExtReal::infinity();
  if (std::abs(d1.value() - y.dot(w)) > 1e-9 * (1.0 + y.norm() * w.norm())) return ExtReal::infinity();
  return dir_deriv_second(h, c, w);
}

}  // namespace plqn
