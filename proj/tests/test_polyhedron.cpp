#include <doctest.h>

#include "fixtures.hpp"
#include "plqn/linalg.hpp"
#include "plqn/polyhedron.hpp"
#include "plqn/simplex.hpp"

using namespace plqn;
using fx::v;

namespace {

PolyhedronH box(int dim, double r) {
  PolyhedronH p;
  p.E = Mat(0, dim);
  p.e = Vec(0);
  p.F = linalg::vstack(Mat(Mat::Identity(dim, dim)), Mat(-Mat::Identity(dim, dim)));
  p.f = Vec::Constant(2 * dim, r);
  return p;
}

}  // namespace

TEST_CASE("simplex solves a small LP") {
  // max x + y s.t. x + 2y <= 4, 3x + y <= 6, x, y >= 0 -> (1.6, 1.2), value 2.8.
  lp::LinearProgram prog;
  prog.eq_A = Mat(0, 2);
  prog.eq_b = Vec(0);
  prog.in_A = Mat(4, 2);
  prog.in_A << 1, 2, 3, 1, -1, 0, 0, -1;
  prog.in_b = v({4, 6, 0, 0});
  prog.cost = v({-1, -1});
  const lp::Result r = lp::solve(prog);
  REQUIRE(r.status == lp::Status::Optimal);
  CHECK(r.x(0) == doctest::Approx(1.6));
  CHECK(r.x(1) == doctest::Approx(1.2));
  CHECK(r.objective == doctest::Approx(-2.8));
}

TEST_CASE("simplex detects infeasible and unbounded programs") {
  lp::LinearProgram prog;
  prog.eq_A = Mat(0, 1);
  prog.eq_b = Vec(0);
  prog.in_A = Mat(2, 1);
  prog.in_A << 1, -1;
  prog.in_b = v({-1, -1});  // x <= -1 and x >= 1
  prog.cost = v({1});
  CHECK(lp::solve(prog).status == lp::Status::Infeasible);
  prog.in_A = Mat(1, 1);
  prog.in_A << -1;
  prog.in_b = v({0});
  prog.cost = v({-1});
  CHECK(lp::solve(prog).status == lp::Status::Unbounded);
}

TEST_CASE("affine hull detects implicit equalities") {
  PolyhedronH p = box(2, 1.0);
  p = p.add_inequalities(Mat(v({1, -1}).transpose()), v({0}));
  p = p.add_inequalities(Mat(v({-1, 1}).transpose()), v({0}));
  const auto hull = affine_hull(p);
  REQUIRE(hull);
  CHECK(hull->dim() == 1);
  CHECK(hull->implicit.size() == 2);
  const auto ri = relative_interior_point(p, *hull);
  REQUIRE(ri);
  CHECK(ri->point(0) == doctest::Approx(ri->point(1)));
  CHECK(ri->slack > 0.5);
}

TEST_CASE("empty polyhedron has no hull") {
  PolyhedronH p = box(1, 1.0);
  p = p.add_equalities(Mat::Identity(1, 1), v({2}));
  CHECK(p.is_empty());
  CHECK_FALSE(affine_hull(p));
}

TEST_CASE("maximize over a box") {
  const auto r = maximize(box(3, 2.0), v({1, -1, 0.5}));
  REQUIRE(r);
  CHECK(r->bounded);
  CHECK(r->value == doctest::Approx(5.0));
  const auto u = maximize(PolyhedronH::whole_space(2), v({1, 0}));
  REQUIRE(u);
  CHECK_FALSE(u->bounded);
}

TEST_CASE("cone generators of the nonnegative orthant and a half-space") {
  const ConeGenerators g = cone_generators(2, Mat(-Mat::Identity(2, 2)));
  CHECK(g.lineality.cols() == 0);
  CHECK(g.rays.size() == 2);
  const ConeGenerators h = cone_generators(2, Mat(v({1, 0}).transpose()));
  CHECK(h.lineality.cols() == 1);
  CHECK(h.rays.size() == 1);
  CHECK(cone_is_trivial(2, Mat(linalg::vstack(Mat(-Mat::Identity(2, 2)), Mat(v({1, 1}).transpose())))));
  CHECK_FALSE(cone_is_trivial(2, Mat(v({1, 1}).transpose())));
}

TEST_CASE("conic hull H-representation matches generator membership") {
  Mat G(2, 2);
  G << 1, 1, 0, 1;  // rays (1,0) and (1,1)
  const PolyhedronH k = conic_hull_hrep(G, 2);
  CHECK(k.contains(v({2, 1})));
  CHECK(k.contains(v({1, 0})));
  CHECK_FALSE(k.contains(v({0, 1})));
  CHECK_FALSE(k.contains(v({1, -0.1})));
  const PolyhedronH line = conic_hull_hrep(Mat(linalg::hstack(Mat(v({1, 0})), Mat(v({-1, 0})))), 2);
  CHECK(line.contains(v({-3, 0})));
  CHECK_FALSE(line.contains(v({0, 1e-3})));
  const PolyhedronH zero = conic_hull_hrep(Mat(2, 0), 2);
  CHECK(zero.contains(v({0, 0})));
  CHECK_FALSE(zero.contains(v({1e-3, 0})));
}
