#include <doctest.h>

#include "fixtures.hpp"
#include "plqn/composite.hpp"

using namespace plqn;
using fx::v;

TEST_CASE("problem dimensions must agree") {
  CHECK_THROWS_AS(fx::problem(fx::max2(), {"x1"}, 1), ArgumentError);
  const CompositeProblem p = fx::b1();
  CHECK(p.n() == 2);
  CHECK(p.m() == 2);
  CHECK(p.objective(v({0, 0})).value() == doctest::Approx(1.0));
  CHECK(fx::problem(fx::h_nlp(), {"x1", "x2"}, 2).objective(v({0, 1})).is_infinite());
}

TEST_CASE("B1 multiplier set is the singleton (1/2, 1/2)") {
  // y1 + y2 = 1 from the subdifferential, y1 = y2 from grad c(0)^T y = 0.
  const MultiplierSet ms = multiplier_set(fx::b1(), v({0, 0}));
  REQUIRE(ms.status == MultiplierSet::Status::Singleton);
  CHECK(ms.y.isApprox(v({0.5, 0.5})));
  CHECK(ms.supported);
}

TEST_CASE("squared l1 with identity map has multiplier set {0}") {
  const MultiplierSet ms = multiplier_set(fx::problem(fx::l1_squared(), {"x1", "x2"}, 2), v({0, 0}));
  REQUIRE(ms.status == MultiplierSet::Status::Singleton);
  CHECK(ms.y.norm() < 1e-12);
}

TEST_CASE("l1 with a duplicated coordinate has a segment of multipliers") {
  const CompositeProblem p = fx::problem(fx::l1_norm(), {"x1", "x1"}, 1);
  const MultiplierSet ms = multiplier_set(p, v({0}));
  CHECK(ms.status == MultiplierSet::Status::Nonsingleton);
  CHECK(ms.polyhedron.contains(v({0.7, -0.7})));
  CHECK_FALSE(ms.polyhedron.contains(v({0.7, 0.7})));
  const CQReport cq = check_cqs(p, v({0}));
  CHECK(cq.bcq);
  CHECK_FALSE(cq.tc);
  CHECK_FALSE(cq.sc);
  CHECK_FALSE(cq.m_singleton);
}

TEST_CASE("away from a critical point the multiplier set is empty") {
  CHECK(multiplier_set(fx::b1(), v({0.3, 0})).status == MultiplierSet::Status::Empty);
}

TEST_CASE("B1 satisfies all three qualifications") {
  const CQReport cq = check_cqs(fx::b1(), v({0, 0}));
  CHECK(cq.bcq);
  CHECK(cq.tc);
  CHECK(cq.sc);
  CHECK(cq.m_singleton);
  REQUIRE(cq.ybar);
  CHECK(cq.ybar->isApprox(v({0.5, 0.5})));
}

TEST_CASE("BCQ holds at smooth interior points") {
  const CompositeProblem p = fx::problem(fx::half_sq(2), {"x1*x2", "x1"}, 2);
  for (const Vec& x : {v({0, 0}), v({1, -2}), v({3, 0.5})}) CHECK(check_cqs(p, x).bcq);
}

TEST_CASE("BCQ fails when the map is tangent to the domain boundary") {
  // dom h = {u1 <= 0} and grad c1(0) = 0, so the domain normal (1, 0) lies in Null(J^T).
  std::vector<Hyperplane> hp = {{v({1, 0}), 0.0}};
  const PLQFunction h(2, hp, {fx::linear_piece({1}, v({0, 1}))});
  const CompositeProblem p = fx::problem(h, {"x1^2", "x2"}, 2);
  const CQReport cq = check_cqs(p, v({0, 0}));
  CHECK_FALSE(cq.bcq);
  CHECK_FALSE(cq.tc);
  CHECK_FALSE(multiplier_set(p, v({0, 0})).supported);
  CHECK_THROWS_AS(nonascent_contains(p, v({0, 0}), v({1, 0})), PreconditionError);
}

TEST_CASE("non-ascent directions at the B1 solution") {
  const CompositeProblem p = fx::b1();
  CHECK(nonascent_contains(p, v({0, 0}), v({1, 0})));
  CHECK_FALSE(nonascent_contains(p, v({0, 0}), v({0, 1})));
  CHECK(nonascent_contains(p, v({0, 0}), v({0, 0})));
  CHECK(nonascent_contains(p, v({0.4, -0.2}), v({0, 0})));
}

TEST_CASE("KKT residual") {
  const CompositeProblem p = fx::b1();
  const KKTResidual r0 = kkt_residual(p, v({0, 0}), v({0.5, 0.5}));
  CHECK(r0.stationarity == doctest::Approx(0.0));
  CHECK(r0.subdiff_violation.value() == doctest::Approx(0.0));
  const KKTResidual r1 = kkt_residual(p, v({0, 0}), v({1, 0}));
  CHECK(r1.stationarity == doctest::Approx(2.0));
  const KKTResidual r2 = kkt_residual(fx::problem(fx::h_nlp(), {"x1", "x2"}, 2), v({0, 1}), v({1, 0}));
  CHECK(r2.subdiff_violation.is_infinite());
  CHECK(std::isinf(r2.total()));
}
