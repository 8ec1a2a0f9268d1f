#include "plqn/manifold.hpp"

#include <algorithm>
#include <cmath>

#include "plqn/calculus.hpp"
#include "plqn/linalg.hpp"
#include "plqn/simplex.hpp"

namespace plqn {

namespace {

constexpr const char* kModule = "manifold";

}  // namespace

ManifoldData build_manifold(const PLQFunction& h, const Vec& cbar) {
  const ActiveProfile prof = eval_with_active(h, cbar);
  if (prof.kbar == 0) throw DomainError(kModule, "base point is outside dom h");
  if (prof.kbar == 1)
    throw SmoothCaseError(kModule, "only one piece is active at the base point; use the smooth solver");
  const std::vector<int>& act = prof.active_hyperplanes.at(prof.active_pieces.front());
  for (const auto& [k, ik] : prof.active_hyperplanes)
    if (ik != act) throw RepresentationError(kModule, "active hyperplane sets differ across active pieces");

  ManifoldData md{.h = h, .cbar = cbar, .pieces = prof.active_pieces, .active = act};
  const int m = h.m();
  const int kb = prof.kbar;
  const int l = static_cast<int>(act.size());
  md.kbar = kb;
  md.ell = l;
  const int ref = md.pieces.back();
  md.A.resize(m, l);
  for (int p = 0; p < l; ++p) md.A.col(p) = h.oriented_normal(ref, act[static_cast<size_t>(p)]);
  for (int j = 0; j < kb; ++j) {
    Vec d(l);
    for (int p = 0; p < l; ++p) {
      const auto jp = static_cast<size_t>(act[static_cast<size_t>(p)]);
      d(p) = h.piece(md.pieces[static_cast<size_t>(j)]).signs[jp] * h.piece(ref).signs[jp];
    }
    md.P.push_back(d);
  }
  md.nondegenerate = l == 0 || linalg::rank(md.A) == l;

  md.blockA = Mat::Zero(kb * m, kb * l);
  md.blockQ.resize(kb * m, m);
  md.blockB.resize(kb * m);
  md.J.resize(kb * m, m);
  md.Abar = Mat::Zero(m, kb * l);
  md.Qbar = Mat::Zero(m, m);
  md.bbar = Vec::Zero(m);
  for (int i = 0; i < kb; ++i) {
    for (int j = 0; j < kb; ++j) {
      const double w = i == j ? 1.0 - kb : 1.0;
      md.blockA.block(i * m, j * l, m, l) = w * md.AP(j);
    }
    md.blockQ.middleRows(i * m, m) = md.Q(i);
    md.blockB.segment(i * m, m) = md.b(i);
    md.J.middleRows(i * m, m) = Mat::Identity(m, m);
    md.Abar.middleCols(i * l, l) = md.AP(i) / kb;
    md.Qbar += md.Q(i) / kb;
    md.bbar += md.b(i) / kb;
  }
  for (int p = 0; p < l; ++p) {
    Vec z(kb * l);
    for (int j = 0; j < kb; ++j) z.segment(j * l, l) = md.P[static_cast<size_t>(j)].cwiseProduct(Vec::Unit(l, p));
    md.zeta.push_back(z);
  }
  return md;
}

bool manifold_contains(const ManifoldData& md, const Vec& c) {
  const auto& hps = md.h.hyperplanes();
  std::vector<bool> is_active(hps.size(), false);
  for (int j : md.active) is_active[static_cast<size_t>(j)] = true;
  for (size_t j = 0; j < hps.size(); ++j) {
    const double r = hps[j].a.dot(c) - hps[j].alpha;
    const double tol = active_tolerance(hps[j].alpha);
    if (is_active[j]) {
      if (std::abs(r) > tol) return false;
      continue;
    }
    for (int k : md.pieces)
      if (md.h.piece(k).signs[j] * r >= -tol) return false;
  }
  return true;
}

Vec MuVector::stacked() const {
  Eigen::Index total = 0;
  for (const Vec& b : blocks) total += b.size();
  Vec out(total);
  Eigen::Index at = 0;
  for (const Vec& b : blocks) {
    out.segment(at, b.size()) = b;
    at += b.size();
  }
  return out;
}

double MuVector::min_entry() const {
  double v = INFINITY;
  for (const Vec& b : blocks)
    if (b.size() > 0) v = std::min(v, b.minCoeff());
  return v;
}

MuVector mu_of(const ManifoldData& md, const Vec& c, const Vec& y) {
  if (!md.nondegenerate) throw PreconditionError(kModule, "A is rank deficient (degenerate manifold)");
  const Mat AtA = md.A.transpose() * md.A;
  const Eigen::LDLT<Mat> solver(AtA);
  MuVector mu;
  for (int j = 0; j < md.kbar; ++j) {
    const Vec g = md.Q(j) * c + md.b(j);
    const Vec r = y - g;
    Vec mj = md.ell > 0 ? Vec(md.P[static_cast<size_t>(j)].cwiseProduct(solver.solve(md.A.transpose() * r))) : Vec(0);
    const double resid = (r - md.AP(j) * mj).norm();
    if (resid > 1e-9 * (1.0 + y.norm() + g.norm()))
      throw MembershipError(kModule, "y is not a subgradient at c (piece " + std::to_string(md.pieces[static_cast<size_t>(j)]) +
                                         " residual " + std::to_string(resid) + ")");
    if (mj.size() > 0 && mj.minCoeff() < -1e-9)
      throw MembershipError(kModule, "y is not a subgradient at c (negative multiplier on piece " +
                                         std::to_string(md.pieces[static_cast<size_t>(j)]) + ")");
    mu.blocks.push_back(mj);
  }
  return mu;
}

namespace {

Strictness strictness_of(const ManifoldData& md, const MuVector& mu) {
  Strictness s;
  s.ri_member = mu.min_entry() > kStrictTol;
  bool some_positive = false;
  for (const Vec& b : mu.blocks) some_positive = some_positive || b.size() == 0 || b.minCoeff() > kStrictTol;
  bool zeros_same_side = true;
  for (const Vec& b : mu.blocks) {
    for (Eigen::Index i = 0; i < b.size(); ++i) {
      if (b(i) > kStrictTol) continue;
      for (const Vec& p : md.P)
        if (p(i) != 1.0) zeros_same_side = false;
    }
  }
  s.k_strict = some_positive && zeros_same_side;
  return s;
}

}  // namespace

Strictness strictness_check(const ManifoldData& md, const Vec& c, const Vec& y) {
  return strictness_of(md, mu_of(md, c, y));
}

PartialSmoothnessCertificate certify_partial_smoothness(const ManifoldData& md, const Vec& c, const Vec& y) {
  PartialSmoothnessCertificate cert;
  cert.nondegenerate = md.nondegenerate;
  if (!md.nondegenerate) {
    cert.reasons.push_back("not certified: degenerate A");
    return cert;
  }
  if (!manifold_contains(md, c)) {
    cert.reasons.push_back("not certified: c is not on the manifold");
    return cert;
  }
  MuVector mu;
  try {
    mu = mu_of(md, c, y);
  } catch (const MembershipError& e) {
    cert.reasons.push_back(std::string("not certified: ") + e.what());
    return cert;
  }
  cert.min_mu = mu.min_entry();
  const Strictness s = strictness_of(md, mu);
  cert.k_strict = s.k_strict;
  cert.ri_member = s.ri_member;
  if (!s.k_strict) cert.reasons.push_back("not certified: k-strict complementarity fails");

  // par(U(c)) = Null(blockA): each zeta_p must be a feasible direction within U(c).
  const int nv = md.kbar * md.ell;
  const Vec rhs = md.kbar * (md.blockQ * c + md.blockB - md.J * md.lambda0(c));
  cert.parallel_identity = true;
  for (const Vec& z : md.zeta) {
    // Variables (mu, t): blockA mu = rhs, -mu <= 0, -(mu + t z) <= 0, t <= 1; maximize t.
    Mat eq = Mat::Zero(md.blockA.rows(), nv + 1);
    eq.leftCols(nv) = md.blockA;
    Mat in = Mat::Zero(2 * nv + 1, nv + 1);
    in.topLeftCorner(nv, nv) = -Mat::Identity(nv, nv);
    in.block(nv, 0, nv, nv) = -Mat::Identity(nv, nv);
    in.block(nv, nv, nv, 1) = -z;
    in(2 * nv, nv) = 1.0;
    Vec inb = Vec::Zero(2 * nv + 1);
    inb(2 * nv) = 1.0;
    Vec cost = Vec::Zero(nv + 1);
    cost(nv) = -1.0;
    const lp::Result r = lp::solve(lp::LinearProgram{eq, rhs, in, inb, cost});
    const double margin = r.status == lp::Status::Optimal ? r.x(nv) : 0.0;
    cert.zeta_margins.push_back(margin);
    if (!(margin > 1e-7)) cert.parallel_identity = false;
  }
  if (!cert.parallel_identity) cert.reasons.push_back("parallel subspace of U(c) is smaller than Null(blockA)");

  const auto hull = affine_hull(subdiff_hrep(md.h, c));
  if (hull) {
    const Mat both = linalg::hstack(hull->par_basis, md.A);
    cert.par_matches_range = hull->dim() == md.ell && (md.ell == 0 || linalg::rank(both) == md.ell);
  }
  cert.certified = cert.nondegenerate && cert.k_strict;
  return cert;
}

}  // namespace plqn
