#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "plqn/linalg.hpp"
#include "plqn/rate.hpp"
#include "plqn/solver.hpp"

using namespace plqn;
using fx::v;

namespace {

SolveOptions b1_opts() {
  SolveOptions o;
  o.x_ref = v({0, 0});
  o.y_ref = v({0.5, 0.5});
  return o;
}

ManifoldData b1_manifold() { return build_manifold(fx::max2(), v({1, 1})); }

RestrictedState state(const ManifoldData& md, const Vec& x, const Vec& y, const CompositeProblem& p) {
  RestrictedState s{x, y, {}};
  s.mu = mu_of(md, map_value(p.c, x), y).blocks;
  return s;
}

}  // namespace

TEST_CASE("restricted step contracts quadratically on B1") {
  const CompositeProblem p = fx::b1();
  const ManifoldData md = b1_manifold();
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const Vec x = v({u(rng), u(rng)});
    const double lam = 0.5 + u(rng);
    RestrictedState s{x, v({lam, 1 - lam}), {}};
    s.mu = {v({0.5}), v({0.5})};
    const double e0 = std::hypot(x.norm(), (s.y - v({0.5, 0.5})).norm());
    for (int j = 0; j < 2; ++j) {
      const RestrictedState n = restricted_newton_step(p, md, s, j);
      const double e1 = std::hypot(n.x.norm(), (n.y - v({0.5, 0.5})).norm());
      worst = std::max(worst, e1 / (e0 * e0));
    }
  }
  CHECK(worst < 10.0);
}

TEST_CASE("the solution is a fixed point of the restricted step") {
  const CompositeProblem p = fx::b1();
  const ManifoldData md = b1_manifold();
  const RestrictedState s = state(md, v({0, 0}), v({0.5, 0.5}), p);
  for (int j = 0; j < 2; ++j) {
    const RestrictedState n = restricted_newton_step(p, md, s, j);
    CHECK((n.x - s.x).norm() < 1e-12);
    CHECK((n.y - s.y).norm() < 1e-12);
  }
}

TEST_CASE("one-dimensional toy step agrees with the explicit inverse") {
  // h = |u| on R, c(x) = x - 1 + x^2/2 so H = y, grad c = 1 + x.
  std::vector<Hyperplane> hp = {{v({1}), 0.0}};
  const PLQFunction h(1, hp, {fx::linear_piece({1}, v({-1})), fx::linear_piece({-1}, v({1}))});
  const CompositeProblem p = fx::problem(h, {"x1-1+x1^2/2"}, 1);
  const ManifoldData md = build_manifold(h, v({0}));
  const Vec x = v({0.8});
  const Vec y = v({0.3});
  RestrictedState s{x, y, {v({0.0}), v({0.0})}};
  for (int j = 0; j < 2; ++j) {
    const double H = y(0), J = 1 + x(0);
    const double c = x(0) - 1 + 0.5 * x(0) * x(0);
    const double a = md.A(0, 0), ap = md.AP(j)(0, 0);
    Mat K(3, 3);
    K << H, J, 0, 0, 1, -ap, a * J, 0, 0;
    const Vec rhs = v({-J * y(0), md.b(j)(0) - y(0), -a * c});
    // Unknowns (dx, dy, mu_j): H dx + J dy = -J y; dy - ap mu = b - y; a J dx = -a c.
    const Vec sol = K.inverse() * rhs;
    const RestrictedState n = restricted_newton_step(p, md, s, j);
    CHECK(n.x(0) == doctest::Approx(x(0) + sol(0)));
    CHECK(n.y(0) == doctest::Approx(y(0) + sol(1)));
  }
}

TEST_CASE("Newton on B1 from the example start") {
  const CompositeProblem p = fx::b1();
  const IterationTrace tr = newton_solve_auto(p, v({0.3, -0.2}), v({0.7, 0.3}), b1_opts());
  CHECK(tr.converged);
  CHECK(tr.last().x.norm() < 1e-12);
  CHECK((tr.last().y - v({0.5, 0.5})).norm() < 1e-12);
  for (size_t k = 1; k < tr.iters.size(); ++k) {
    CHECK(tr.iters[k].on_manifold);
    CHECK(tr.iters[k].gluing <= 1e-10);
  }
}

TEST_CASE("Newton from the solution stops after one step") {
  const IterationTrace tr = newton_solve_auto(fx::b1(), v({0, 0}), v({0.5, 0.5}), b1_opts());
  CHECK(tr.converged);
  CHECK(tr.iterations() <= 1);
  CHECK(tr.last().residual < 1e-12);
}

TEST_CASE("Newton from a far start does not claim success silently") {
  const CompositeProblem p = fx::problem(fx::max2(), {"x1^2+x1^3+(x2-1)^2+x2^2", "x1^2+x1^3+(x2+1)^2"}, 2);
  SolveOptions o;
  o.x_ref = v({0, 0});
  o.y_ref = v({0.5, 0.5});
  try {
    const IterationTrace tr = newton_solve_auto(p, v({10, 10}), v({0.5, 0.5}), o);
    if (tr.converged) CHECK(tr.last().err < 1e-8);
  } catch (const Error& e) {
    MESSAGE("far start: " << e.what());
  }
}

TEST_CASE("enum step matches the restricted step near B1's solution") {
  const CompositeProblem p = fx::b1();
  const Vec xh = v({0.1, 0.1});
  const Vec yh = v({0.5, 0.5});
  const Mat H = weighted_hessian(p.c, xh, yh);
  CHECK(H.isApprox(2 * Mat::Identity(2, 2)));
  const auto cands = solve_subproblem_enum(p, xh, yh, H);
  REQUIRE(!cands.empty());
  const ManifoldData md = b1_manifold();
  const RestrictedState n = restricted_newton_step(p, md, state(md, xh, yh, p), 0);
  CHECK((xh + cands.front().d - n.x).norm() < 1e-9);
  CHECK((cands.front().y - n.y).norm() < 1e-9);
  int near = 0;
  for (const auto& c : cands)
    if ((c.d - cands.front().d).norm() < 1e-9) ++near;
  CHECK(near == static_cast<int>(cands.size()));
}

TEST_CASE("enum on a smooth quadratic reduces to one linear solve") {
  const CompositeProblem p = fx::problem(fx::half_sq(2), {"x1", "x2"}, 2);
  const Vec xh = v({0.4, -1.3});
  const auto cands = solve_subproblem_enum(p, xh, v({0, 0}), Mat::Identity(2, 2));
  REQUIRE(cands.size() == 1);
  // min 1/2|x+d|^2 + 1/2|d|^2 -> d = -x/2.
  CHECK(cands[0].d.isApprox(-0.5 * xh));
  CHECK(cands[0].y.isApprox(0.5 * xh));
}

TEST_CASE("enum with negative curvature across the kink finds several critical structures") {
  // h = max(u1, u2), c = identity, H = [[0,1],[1,0]]: curvature -1 along the kink normal (1,-1).
  const CompositeProblem p = fx::problem(fx::max2(), {"x1", "x2"}, 2);
  const Vec xh = v({0.2, 0.1});
  Mat H(2, 2);
  H << 0, 1, 1, 0;
  auto phi = [&](const Vec& d) { return std::max(xh(0) + d(0), xh(1) + d(1)) + 0.5 * d.dot(H * d); };
  const auto cands = solve_subproblem_enum(p, xh, v({0.5, 0.5}), H);
  REQUIRE(cands.size() == 3);
  // Grid oracle on a 0.05 box at resolution 1e-3: a strict local minimizer has no lower neighbour.
  auto grid_local_min = [&](const Vec& d) {
    for (double a = -0.05; a <= 0.05; a += 1e-3)
      for (double b = -0.05; b <= 0.05; b += 1e-3)
        if (phi(d + v({a, b})) < phi(d) - 1e-12) return false;
    return true;
  };
  for (const auto& c : cands) {
    CHECK(phi(c.d) == doctest::Approx(c.model_value));
    CHECK(c.model_sosc == grid_local_min(c.d));
  }
  CHECK(cands.front().model_sosc);
  CHECK(cands.front().d.isApprox(v({-0.55, -0.45})));
  CHECK(cands.front().y.isApprox(v({0.45, 0.55})));
  for (size_t i = 1; i < cands.size(); ++i) CHECK(cands[i - 1].model_value <= cands[i].model_value + 1e-12);
}

TEST_CASE("quasi-Newton with the exact Hessian retraces Newton") {
  const CompositeProblem p = fx::problem(fx::max2(), {"x1^2+x1^3+(x2-1)^2+x2^2", "x1^2+x1^3+(x2+1)^2"}, 2);
  SolveOptions o;
  o.x_ref = v({0, 0});
  o.y_ref = v({0.5, 0.5});
  const IterationTrace nt = newton_solve_auto(p, v({0.2, -0.15}), v({0.6, 0.4}), o);
  const IterationTrace qt = quasi_newton_solve(p, v({0.2, -0.15}), v({0.6, 0.4}), exact_hessian_schedule(p), o);
  const size_t common = std::min(nt.iters.size(), qt.iters.size());
  CHECK(common >= 4);
  for (size_t k = 0; k < common; ++k) {
    CHECK((nt.iters[k].x - qt.iters[k].x).norm() <= 1e-12);
    CHECK((nt.iters[k].y - qt.iters[k].y).norm() <= 1e-12);
  }
}

TEST_CASE("quasi-Newton schedules separate superlinear from linear") {
  const CompositeProblem p = fx::b1();
  const Mat Hbar = weighted_hessian(p.c, v({0, 0}), v({0.5, 0.5}));
  SolveOptions o = b1_opts();
  o.max_iter = 60;
  const IterationTrace dec = quasi_newton_solve(
      p, v({0.3, -0.2}), v({0.7, 0.3}),
      [&](int k, const Vec&, const Vec&) { return Mat(Hbar + std::ldexp(1.0, -k) * Mat::Identity(2, 2)); }, o);
  CHECK(dec.converged);
  CHECK(classify_rate(dec.error_sequence()).kind == RateVerdict::Kind::Superlinear);
  for (size_t k = 3; k < dec.iters.size(); ++k) CHECK(dec.iters[k].dm_ratio < dec.iters[k - 1].dm_ratio);

  const IterationTrace fix = quasi_newton_solve(
      p, v({0.3, -0.2}), v({0.7, 0.3}),
      [&](int, const Vec&, const Vec&) { return Mat(Hbar + Mat::Identity(2, 2)); }, o);
  CHECK(fix.converged);
  const RateVerdict rv = classify_rate(fix.error_sequence());
  CHECK(rv.kind == RateVerdict::Kind::Linear);
  CHECK(rv.rho == doctest::Approx(1.0 / 3.0).epsilon(1e-3));
  for (size_t k = 3; k < fix.iters.size(); ++k) {
    CHECK(fix.iters[k].dm_ratio >= 1e-2);
    const double r = fix.iters[k].err / fix.iters[k - 1].err;
    CHECK(r >= 0.05);
    CHECK(r <= 0.95);
  }
}

TEST_CASE("smooth Newton") {
  const CompositeProblem ls = fx::problem(fx::half_sq(2), {"x1^2+x2^2-2", "exp(x1-1)-x2"}, 2);
  SolveOptions o;
  o.x_ref = v({1, 1});
  o.y_ref = v({0, 0});
  const IterationTrace tr = smooth_newton_solve(ls, v({1.4, 0.7}), map_value(ls.c, v({1.4, 0.7})), o);
  CHECK(tr.converged);
  CHECK((tr.last().x - v({1, 1})).norm() < 1e-10);
  CHECK(classify_rate(tr.error_sequence()).kind == RateVerdict::Kind::Quadratic);

  // Affine c and quadratic h: one step.
  const CompositeProblem aff = fx::problem(fx::half_sq(2), {"x1+2*x2-1", "x2+3"}, 2);
  const IterationTrace one = smooth_newton_solve(aff, v({5, -4}), v({0, 0}), SolveOptions{});
  CHECK(one.converged);
  CHECK(one.iterations() <= 2);
  CHECK(one.iters[1].residual < 1e-10);

  const IterationTrace fixed = smooth_newton_solve(ls, v({1, 1}), v({0, 0}), o);
  CHECK(fixed.converged);
  CHECK((fixed.last().x - v({1, 1})).norm() < 1e-14);

  CHECK_THROWS_AS(smooth_newton_solve(fx::b1(), v({0, 0}), v({0.5, 0.5}), o), RegimeError);
}
