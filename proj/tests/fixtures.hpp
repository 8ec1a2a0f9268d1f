#ifndef PLQN_TESTS_FIXTURES_HPP
#define PLQN_TESTS_FIXTURES_HPP

#include <string>
#include <vector>

#include "plqn/composite.hpp"
#include "plqn/plq.hpp"
#include "plqn/problem_io.hpp"

namespace fx {

using plqn::Hyperplane;
using plqn::Mat;
using plqn::Piece;
using plqn::PLQFunction;
using plqn::Vec;

inline Vec v(std::initializer_list<double> xs) {
  Vec out(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) out(i++) = x;
  return out;
}

inline Piece linear_piece(std::vector<int> signs, Vec b, double beta = 0.0) {
  Piece p;
  p.signs = std::move(signs);
  p.b = std::move(b);
  p.Q = Mat::Zero(p.b.size(), p.b.size());
  p.beta = beta;
  return p;
}

// |u1| + |u2| over the four quadrants. Hyperplane j is u_j = 0; sign -1 means u_j >= 0.
inline PLQFunction l1_norm() {
  std::vector<Hyperplane> hp = {{v({1, 0}), 0.0}, {v({0, 1}), 0.0}};
  std::vector<Piece> pcs;
  for (int s1 : {1, -1})
    for (int s2 : {1, -1}) pcs.push_back(linear_piece({s1, s2}, v({-double(s1), -double(s2)})));
  return PLQFunction(2, hp, pcs);
}

// (|u1| + |u2|)^2: on each quadrant (s.u)^2 = u^T (2 s s^T / 2) u.
inline PLQFunction l1_squared() {
  std::vector<Hyperplane> hp = {{v({1, 0}), 0.0}, {v({0, 1}), 0.0}};
  std::vector<Piece> pcs;
  for (int s1 : {1, -1})
    for (int s2 : {1, -1}) {
      Piece p = linear_piece({s1, s2}, Vec::Zero(2));
      const Vec s = v({-double(s1), -double(s2)});
      p.Q = 2.0 * s * s.transpose();
      pcs.push_back(p);
    }
  return PLQFunction(2, hp, pcs);
}

// max(u1, u2): piece 0 is u1 >= u2.
inline PLQFunction max2() {
  std::vector<Hyperplane> hp = {{v({1, -1}), 0.0}};
  return PLQFunction(2, hp, {linear_piece({-1}, v({1, 0})), linear_piece({1}, v({0, 1}))});
}

// u0 + indicator(u1 <= 0).
inline PLQFunction h_nlp() {
  std::vector<Hyperplane> hp = {{v({0, 1}), 0.0}};
  return PLQFunction(2, hp, {linear_piece({1}, v({1, 0}))});
}

// u^2/2 on [0, inf), 0 on [-1, 0], +inf below -1.
inline PLQFunction half_quad() {
  std::vector<Hyperplane> hp = {{v({1}), 0.0}, {v({1}), -1.0}};
  Piece up = linear_piece({-1, -1}, v({0}));
  up.Q = Mat::Identity(1, 1);
  return PLQFunction(1, hp, {up, linear_piece({1, -1}, v({0}))});
}

// u^T u / 2 on R^m.
inline PLQFunction half_sq(int m) {
  Piece p;
  p.Q = Mat::Identity(m, m);
  p.b = Vec::Zero(m);
  return PLQFunction(m, {}, {p});
}

inline plqn::CompositeProblem problem(const PLQFunction& h, const std::vector<std::string>& c, int n) {
  return plqn::CompositeProblem(h, plqn::parse_map(c, n));
}

inline plqn::CompositeProblem b1() {
  return problem(max2(), {"x1^2+(x2-1)^2", "x1^2+(x2+1)^2"}, 2);
}

inline std::string bench_path(const std::string& name) { return std::string(PLQN_BENCH_DIR) + "/" + name; }

inline plqn::LoadedProblem bench(const std::string& name) { return plqn::load_problem(bench_path(name)); }

}  // namespace fx

#endif  // PLQN_TESTS_FIXTURES_HPP
