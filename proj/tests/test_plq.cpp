#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "plqn/plq.hpp"

using namespace plqn;
using fx::v;

TEST_CASE("l1 norm at the origin activates every piece and hyperplane") {
  const PLQFunction h = fx::l1_norm();
  const ActiveProfile prof = eval_with_active(h, v({0, 0}));
  CHECK(prof.value == ExtReal(0.0));
  CHECK(prof.active_pieces == std::vector<int>{0, 1, 2, 3});
  CHECK(prof.kbar == 4);
  CHECK(prof.ell == 2);
  for (const auto& [k, act] : prof.active_hyperplanes) CHECK(act == std::vector<int>{0, 1});
}

TEST_CASE("point outside the domain has value +inf and no active pieces") {
  const ActiveProfile prof = eval_with_active(fx::h_nlp(), v({3, 1}));
  CHECK(prof.value.is_infinite());
  CHECK(prof.active_pieces.empty());
  CHECK(prof.kbar == 0);
}

TEST_CASE("l1 squared agrees with direct evaluation") {
  const PLQFunction h = fx::l1_squared();
  const ActiveProfile prof = eval_with_active(h, v({1, 2}));
  CHECK(prof.value.value() == doctest::Approx(9.0));
  REQUIRE(prof.kbar == 1);
  CHECK(prof.ell == 0);
  const Vec s = -Eigen::Map<const Eigen::VectorXi>(h.piece(prof.active_pieces[0]).signs.data(), 2).cast<double>();
  CHECK(s == v({1, 1}));
  for (int t = 0; t < 50; ++t) {
    const Vec c = Vec::Random(2) * 3.0;
    const double direct = std::pow(std::abs(c(0)) + std::abs(c(1)), 2);
    CHECK(evaluate(h, c).value() == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("piece containment uses a scaled tolerance") {
  const PLQFunction h = fx::max2();
  CHECK(h.piece_contains(0, v({1, 1 + 5e-10})));
  CHECK_FALSE(h.piece_contains(0, v({1, 1 + 1e-6})));
  CHECK(active_tolerance(0.0) == doctest::Approx(1e-9));
}

TEST_CASE("canonical representations validate") {
  CHECK(validate_representation(fx::l1_norm()).all_pass);
  CHECK(validate_representation(fx::l1_squared()).all_pass);
  CHECK(validate_representation(fx::max2()).all_pass);
  const ValidationReport r = validate_representation(fx::half_quad());
  CHECK(r.all_pass);
  CHECK(r.continuity_failures == 0);
  CHECK(r.convexity_violations == 0);
}

TEST_CASE("a jump across a shared facet is reported as a continuity failure") {
  std::vector<Hyperplane> hp = {{v({1}), 0.0}};
  const PLQFunction h(1, hp, {fx::linear_piece({1}, v({0}), 0.0), fx::linear_piece({-1}, v({0}), 1.0)});
  const ValidationReport r = validate_representation(h);
  CHECK_FALSE(r.all_pass);
  CHECK(r.continuity_failures > 0);
}

TEST_CASE("non-symmetric Q is reported") {
  Piece p;
  p.Q = Mat::Zero(2, 2);
  p.Q(0, 1) = 1.0;
  p.b = Vec::Zero(2);
  const ValidationReport r = validate_representation(PLQFunction(2, {}, {p}));
  CHECK_FALSE(r.all_pass);
  CHECK_FALSE(r.piece_symmetric[0]);
}

TEST_CASE("overlapping interiors are reported") {
  std::vector<Hyperplane> hp = {{v({1}), 0.0}};
  // Both pieces claim u <= 0 with the same values.
  const PLQFunction h(1, hp, {fx::linear_piece({1}, v({0})), fx::linear_piece({1}, v({0}))});
  const ValidationReport r = validate_representation(h);
  CHECK_FALSE(r.all_pass);
  CHECK(r.interior_overlaps > 0);
}

TEST_CASE("nonconvex gluing is reported") {
  // -|u| written as two linear pieces.
  std::vector<Hyperplane> hp = {{v({1}), 0.0}};
  const PLQFunction h(1, hp, {fx::linear_piece({1}, v({1})), fx::linear_piece({-1}, v({-1}))});
  const ValidationReport r = validate_representation(h);
  CHECK_FALSE(r.all_pass);
  CHECK(r.convexity_violations > 0);
}

TEST_CASE("a piece that is a single point makes the domain lower dimensional") {
  std::vector<Hyperplane> hp = {{v({1}), 0.0}, {v({-1}), 0.0}};
  const PLQFunction h(1, hp, {fx::linear_piece({1, 1}, v({0}))});
  const ValidationReport r = validate_representation(h);
  CHECK_FALSE(r.domain_full_dimensional);
  CHECK_FALSE(r.all_pass);
}

TEST_CASE("shape errors are rejected at construction") {
  std::vector<Hyperplane> hp = {{v({1, 0}), 0.0}};
  CHECK_THROWS_AS(PLQFunction(2, hp, {fx::linear_piece({1, 1}, v({0, 0}))}), ArgumentError);
  CHECK_THROWS_AS(PLQFunction(2, hp, {fx::linear_piece({2}, v({0, 0}))}), ArgumentError);
  CHECK_THROWS(PLQFunction(2, hp, {}));
}

TEST_CASE("evaluation is deterministic and profiles compare equal") {
  const PLQFunction h = fx::l1_norm();
  const Vec c = v({0.5, 0});
  CHECK(eval_with_active(h, c) == eval_with_active(h, c));
}
