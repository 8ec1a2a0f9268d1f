#ifndef PLQN_CALCULUS_HPP
#define PLQN_CALCULUS_HPP

#include "plqn/plq.hpp"
#include "plqn/polyhedron.hpp"

namespace plqn {

/// Normal cone N(c|C_k) as generators and tangent cone T(c|C_k) as rows.
struct ConePair {
  Mat normal_generators;  // columns sign_kj a_j, j active
  Mat tangent_rows;       // {v : tangent_rows v <= 0}
};

ConePair piece_cones(const PLQFunction& h, int k, const Vec& c);

/// h'(c; w). Throws DomainError when h(c) is not finite.
ExtReal dir_deriv_first(const PLQFunction& h, const Vec& c, const Vec& w);

/// h''(c; w) = <w, Q_k w> for an active piece whose tangent cone holds w.
ExtReal dir_deriv_second(const PLQFunction& h, const Vec& c, const Vec& w);

/// Exact H-representation of the subdifferential at c.
PolyhedronH subdiff_hrep(const PLQFunction& h, const Vec& c);

/// N(c | dom h) as {u : E u = 0, F u <= 0}.
PolyhedronH domain_normal_cone(const PLQFunction& h, const Vec& c);

/// d^2 h(c | y)(w). Throws ArgumentError when y is not a subgradient at c.
ExtReal second_subderivative(const PLQFunction& h, const Vec& c, const Vec& y, const Vec& w);

}  // namespace plqn

#endif  // PLQN_CALCULUS_HPP
