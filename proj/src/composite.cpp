#include "plqn/composite.hpp"

#include <cmath>

#include "plqn/calculus.hpp"
#include "plqn/linalg.hpp"
#include "plqn/simplex.hpp"

namespace plqn {

namespace {

constexpr const char* kModule = "composite";

Vec finite_c(const CompositeProblem& p, const Vec& x) {
  const Vec c = map_value(p.c, x);
  if (!evaluate(p.h, c).finite()) throw DomainError(kModule, "x is outside dom f");
  return c;
}

bool bcq_at(const PLQFunction& h, const Vec& cbar, const Mat& jac) {
  const PolyhedronH ncone = domain_normal_cone(h, cbar);
  const Mat eq = linalg::vstack(ncone.E.rows() > 0 ? ncone.E : Mat(0, h.m()), Mat(jac.transpose()));
  return cone_is_trivial(h.m(), ncone.F, eq);
}

}  // namespace

CompositeProblem::CompositeProblem(PLQFunction h_in, SmoothMap c_in) : h(std::move(h_in)), c(std::move(c_in)) {
  if (h.m() != c.m())
    throw ArgumentError(kModule, "h has dimension " + std::to_string(h.m()) + " but c has " +
                                     std::to_string(c.m()) + " components");
}

ExtReal CompositeProblem::objective(const Vec& x) const { return evaluate(h, map_value(c, x)); }

std::string to_string(MultiplierSet::Status s) {
  switch (s) {
    case MultiplierSet::Status::Empty:
      return "empty";
    case MultiplierSet::Status::Singleton:
      return "singleton";
    case MultiplierSet::Status::Nonsingleton:
      return "nonsingleton";
  }
  return "?";
}

MultiplierSet multiplier_set_at(const PLQFunction& h, const Vec& cbar, const Mat& jac) {
  MultiplierSet ms;
  ms.polyhedron = subdiff_hrep(h, cbar).add_equalities(jac.transpose(), Vec::Zero(jac.cols()));
  ms.supported = bcq_at(h, cbar, jac);
  const auto hull = affine_hull(ms.polyhedron);
  if (!hull) return ms;
  ms.y = hull->point;
  if (hull->dim() == 0) {
    ms.status = MultiplierSet::Status::Singleton;
    // Polish the vertex against the defining equalities.
    ms.y = hull->eq_rows.colPivHouseholderQr().solve(hull->eq_rhs);
  } else {
    ms.status = MultiplierSet::Status::Nonsingleton;
  }
  return ms;
}

CQReport check_cqs_at(const PLQFunction& h, const Vec& cbar, const Mat& jac) {
  const int m = h.m();
  CQReport rep;
  rep.bcq = bcq_at(h, cbar, jac);

  const PolyhedronH sd = subdiff_hrep(h, cbar);
  const auto hull = affine_hull(sd);
  const Mat nul = linalg::null_space(jac.transpose());
  const Mat par = hull ? hull->par_basis : Mat(m, 0);
  const Mat both = linalg::hstack(nul, par);
  rep.tc = both.cols() == 0 || linalg::rank(both) == both.cols();

  rep.m_singleton = multiplier_set_at(h, cbar, jac).status == MultiplierSet::Status::Singleton;

  if (hull) {
    std::vector<bool> implicit(static_cast<size_t>(sd.F.rows()), false);
    for (int i : hull->implicit) implicit[static_cast<size_t>(i)] = true;
    // Variables (y, t): maximize t over aff(sd) ∩ Null(jac^T) with uniform slack on the other rows.
    const Mat eqy = linalg::vstack(hull->eq_rows, Mat(jac.transpose()));
    Mat eq = Mat::Zero(eqy.rows(), m + 1);
    eq.leftCols(m) = eqy;
    const Vec eqb = linalg::vstack(hull->eq_rhs, Vec(Vec::Zero(jac.cols())));
    std::vector<Eigen::Index> rows;
    for (Eigen::Index i = 0; i < sd.F.rows(); ++i)
      if (!implicit[static_cast<size_t>(i)]) rows.push_back(i);
    const auto r = static_cast<Eigen::Index>(rows.size());
    Mat in = Mat::Zero(r + 1, m + 1);
    Vec inb(r + 1);
    for (Eigen::Index k = 0; k < r; ++k) {
      const auto i = rows[static_cast<size_t>(k)];
      in.row(k).head(m) = sd.F.row(i);
      in(k, m) = sd.F.row(i).norm();
      inb(k) = sd.f(i);
    }
    in(r, m) = 1.0;
    inb(r) = 1.0;
    Vec cost = Vec::Zero(m + 1);
    cost(m) = -1.0;
    const lp::Result res = lp::solve(lp::LinearProgram{eq, eqb, in, inb, cost});
    if (res.status == lp::Status::Optimal) {
      rep.ri_slack = res.x(m);
      if (rep.ri_slack >= kRiSlack && rep.tc) {
        rep.sc = true;
        rep.ybar = eqy.colPivHouseholderQr().solve(eqb);
      }
    }
  }
  return rep;
}

MultiplierSet multiplier_set(const CompositeProblem& p, const Vec& x) {
  const Vec c = finite_c(p, x);
  return multiplier_set_at(p.h, c, map_jacobian(p.c, x));
}

CQReport check_cqs(const CompositeProblem& p, const Vec& x) {
  const Vec c = finite_c(p, x);
  return check_cqs_at(p.h, c, map_jacobian(p.c, x));
}

bool nonascent_contains(const CompositeProblem& p, const Vec& x, const Vec& d) {
  const Vec c = finite_c(p, x);
  const Mat jac = map_jacobian(p.c, x);
  if (!bcq_at(p.h, c, jac)) throw PreconditionError(kModule, "basic constraint qualification fails at x");
  const ExtReal d1 = dir_deriv_first(p.h, c, jac * d);
  return d1.finite() && d1.value() <= 1e-10;
}

KKTResidual kkt_residual(const CompositeProblem& p, const Vec& x, const Vec& y) {
  KKTResidual r;
  const Vec c = map_value(p.c, x);
  r.stationarity = (map_jacobian(p.c, x).transpose() * y).norm();
  if (!evaluate(p.h, c).finite()) {
    r.subdiff_violation = ExtReal::infinity();
  } else {
    r.subdiff_violation = subdiff_hrep(p.h, c).max_violation(y);
  }
  return r;
}

}  // namespace plqn
