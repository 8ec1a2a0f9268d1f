#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "plqn/expr.hpp"

using namespace plqn;
using fx::v;

namespace {

Mat fd_jacobian(const SmoothMap& c, const Vec& x, double h) {
  Mat J(c.m(), c.n);
  for (int a = 0; a < c.n; ++a) {
    Vec xp = x, xm = x;
    xp(a) += h;
    xm(a) -= h;
    J.col(a) = (map_value(c, xp) - map_value(c, xm)) / (2 * h);
  }
  return J;
}

Mat fd_weighted_hessian(const SmoothMap& c, const Vec& x, const Vec& y, double h) {
  Mat H(c.n, c.n);
  for (int a = 0; a < c.n; ++a) {
    Vec xp = x, xm = x;
    xp(a) += h;
    xm(a) -= h;
    H.col(a) = (map_jacobian(c, xp).transpose() * y - map_jacobian(c, xm).transpose() * y) / (2 * h);
  }
  return H;
}

}  // namespace

TEST_CASE("parse and evaluate") {
  CHECK(eval_expr(parse_expr("x1^2 + x2", 2), v({3, 1})) == doctest::Approx(10.0));
  CHECK(eval_expr(parse_expr("sin(x1)*x2", 2), v({0, 5})) == doctest::Approx(0.0));
  CHECK(eval_expr(parse_expr("exp(x1)/sqrt(x2) - log(x2)", 2), v({0, 4})) == doctest::Approx(0.5 - std::log(4.0)));
  CHECK(eval_expr(parse_expr("2*x1^-1", 1), v({4})) == doctest::Approx(0.5));
  CHECK(eval_expr(parse_expr("cos(0)+1e-1", 1), v({0})) == doctest::Approx(1.1));
}

TEST_CASE("unary minus binds tighter than power") {
  CHECK(eval_expr(parse_expr("-x1^2", 1), v({3})) == doctest::Approx(9.0));
  CHECK(eval_expr(parse_expr("0-x1^2", 1), v({3})) == doctest::Approx(-9.0));
}

TEST_CASE("parse errors carry a position") {
  CHECK_THROWS_AS(parse_expr("x3", 2), ParseError);
  CHECK_THROWS_AS(parse_expr("x1 +", 1), ParseError);
  CHECK_THROWS_AS(parse_expr("foo(x1)", 1), ParseError);
  CHECK_THROWS_AS(parse_expr("(x1", 1), ParseError);
  CHECK_THROWS_AS(parse_expr("x1^1.5", 1), ParseError);
  try {
    parse_expr("x1 + x9", 2);
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("position") != std::string::npos);
  }
}

TEST_CASE("print then parse round-trips") {
  for (const char* s : {"x1^2 + x2", "sin(x1)*x2", "-x1^3 - 2.5/(x2+1)", "exp(log(x1))*sqrt(x2)", "cos(x1)^-2"}) {
    const Expr e = parse_expr(s, 2);
    const Expr back = parse_expr(to_string(e), 2);
    CHECK(back == e);
    CHECK(eval_expr(back, v({0.7, 1.3})) == doctest::Approx(eval_expr(e, v({0.7, 1.3}))));
  }
}

TEST_CASE("map evaluation with exact derivatives") {
  const SmoothMap c = parse_map({"x1^2", "x2"}, 2);
  const Vec y = v({1, 0});
  const MapEval ev = evaluate_map(c, v({1, 2}), &y);
  CHECK(ev.value.isApprox(v({1, 2})));
  Mat J(2, 2);
  J << 2, 0, 0, 1;
  CHECK(ev.jacobian.isApprox(J));
  REQUIRE(ev.weighted_hessian);
  Mat H(2, 2);
  H << 2, 0, 0, 0;
  CHECK(ev.weighted_hessian->isApprox(H));
  CHECK_FALSE(evaluate_map(c, v({1, 2})).weighted_hessian);

  const SmoothMap bil = parse_map({"x1*x2"}, 2);
  Mat B(2, 2);
  B << 0, 1, 1, 0;
  CHECK(weighted_hessian(bil, v({2, 3}), v({1})).isApprox(B));
}

TEST_CASE("weighted hessian of sin matches finite differences") {
  const SmoothMap c = parse_map({"sin(x1)"}, 1);
  const double exact = -2 * std::sin(0.7);
  CHECK(weighted_hessian(c, v({0.7}), v({2}))(0, 0) == doctest::Approx(exact).epsilon(1e-12));
  CHECK(fd_weighted_hessian(c, v({0.7}), v({2}), 1e-5)(0, 0) == doctest::Approx(exact).epsilon(1e-6));
}

TEST_CASE("AD matches central differences on a mixed map") {
  const SmoothMap c =
      parse_map({"x1^2*x2 + sin(x3)", "exp(x1-x2)/(1+x3^2)", "sqrt(1+x1^2+x2^2)*cos(x2*x3)", "log(2+x1*x2)"}, 3);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 100; ++t) {
    const Vec x = v({u(rng), u(rng), u(rng)});
    const Vec y = v({u(rng), u(rng), u(rng), u(rng)});
    const Mat J = map_jacobian(c, x);
    const Mat H = weighted_hessian(c, x, y);
    CHECK((J - fd_jacobian(c, x, 1e-5)).cwiseAbs().maxCoeff() <= 1e-6 * (1 + J.cwiseAbs().maxCoeff()));
    CHECK((H - fd_weighted_hessian(c, x, y, 1e-5)).cwiseAbs().maxCoeff() <= 1e-5 * (1 + H.cwiseAbs().maxCoeff()));
    CHECK(H.isApprox(H.transpose()));
  }
}

TEST_CASE("domain errors name the component") {
  const SmoothMap c = parse_map({"x1", "log(x1)"}, 1);
  CHECK_THROWS_AS(map_value(c, v({-1})), DomainError);
  try {
    map_jacobian(c, v({-1}));
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("component 2") != std::string::npos);
  }
  CHECK_THROWS_AS(map_value(parse_map({"1/x1"}, 1), v({0})), DomainError);
  CHECK_THROWS_AS(map_value(parse_map({"sqrt(x1)"}, 1), v({-1})), DomainError);
}

TEST_CASE("parse_map reports the failing component") {
  try {
    parse_map({"x1", "x1 +* 2"}, 1);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("component 2") != std::string::npos);
  }
}
