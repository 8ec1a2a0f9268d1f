#include "plqn/certify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "plqn/calculus.hpp"
#include "plqn/linalg.hpp"
#include "plqn/solver.hpp"

namespace plqn {

namespace {

constexpr const char* kModule = "certify";
constexpr int kHeuristicSamples = 1000;

double reduced_min_eig(const Mat& Z, const Mat& M) {
  if (Z.cols() == 0) return INFINITY;
  return linalg::min_sym_eigenvalue(Z.transpose() * M * Z);
}

}  // namespace

std::string to_string(SOSCReport::Mode m) {
  switch (m) {
    case SOSCReport::Mode::CertifiedSubspace:
      return "certified-subspace";
    case SOSCReport::Mode::Smooth:
      return "smooth";
    case SOSCReport::Mode::HeuristicSampled:
      return "heuristic-sampled";
  }
  return "?";
}

SOSCReport certify_sosc(const CompositeProblem& p, const Vec& xbar, const Vec& ybar, std::uint64_t seed) {
  const KKTResidual res = kkt_residual(p, xbar, ybar);
  if (!(res.total() <= 1e-8 * (1.0 + ybar.norm())))
    throw PreconditionError(kModule, "(x, y) is not a KKT pair (residual " + std::to_string(res.total()) + ")");

  const Vec cbar = map_value(p.c, xbar);
  const Mat jac = map_jacobian(p.c, xbar);
  const Mat H = weighted_hessian(p.c, xbar, ybar);
  const ActiveProfile prof = eval_with_active(p.h, cbar);
  SOSCReport rep;

  if (prof.kbar == 1 && prof.ell == 0) {
    rep.mode = SOSCReport::Mode::Smooth;
    rep.Z = Mat::Identity(p.n(), p.n());
    const Mat& Q = p.h.piece(prof.active_pieces.front()).Q;
    rep.min_eigs.push_back(reduced_min_eig(rep.Z, jac.transpose() * Q * jac + H));
    rep.pass = rep.min_eigs.front() > kPdTol;
    return rep;
  }

  if (prof.kbar >= 2) {
    const ManifoldData md = build_manifold(p.h, cbar);
    const CQReport cq = check_cqs_at(p.h, cbar, jac);
    if (md.nondegenerate && cq.sc) {
      rep.mode = SOSCReport::Mode::CertifiedSubspace;
      rep.Z = md.ell > 0 ? linalg::null_space(md.A.transpose() * jac) : Mat(Mat::Identity(p.n(), p.n()));
      rep.pass = true;
      for (int j = 0; j < md.kbar; ++j) {
        const double e = reduced_min_eig(rep.Z, jac.transpose() * md.Q(j) * jac + H);
        rep.min_eigs.push_back(e);
        rep.pass = rep.pass && e > kPdTol;
      }
      if (rep.Z.cols() == 0) rep.note = "non-ascent subspace is {0}; condition holds vacuously";
      return rep;
    }
    rep.note = md.nondegenerate ? "strict criticality not certified" : "degenerate A";
  } else {
    rep.note = "single active piece on the boundary of dom h";
  }

  // Heuristic: sample each piece's non-ascent cone through its generators.
  rep.mode = SOSCReport::Mode::HeuristicSampled;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  double worst = INFINITY;
  for (int k : prof.active_pieces) {
    const ConePair cp = piece_cones(p.h, k, cbar);
    const Vec grad = p.h.piece_gradient(k, cbar);
    const Mat G = linalg::vstack(Mat(cp.tangent_rows * jac), Mat(grad.transpose() * jac));
    const ConeGenerators gens = cone_generators(p.n(), G);
    const Mat M = jac.transpose() * p.h.piece(k).Q * jac + H;
    auto probe = [&](const Vec& d) {
      const double nd = d.norm();
      if (nd < 1e-12) return;
      const Vec u = d / nd;
      // Only directions with h'(c; grad c d) = <ybar, grad c d> matter (critical cone).
      const ExtReal d1 = dir_deriv_first(p.h, cbar, jac * u);
      if (!d1.finite() || std::abs(d1.value()) > 1e-9) return;
      worst = std::min(worst, u.dot(M * u));
      ++rep.samples;
    };
    for (const Vec& r : gens.rays) probe(r);
    for (Eigen::Index i = 0; i < gens.lineality.cols(); ++i) probe(gens.lineality.col(i));
    const int draws = kHeuristicSamples / std::max(1, prof.kbar);
    for (int t = 0; t < draws; ++t) {
      Vec d = Vec::Zero(p.n());
      for (const Vec& r : gens.rays) d += std::abs(g(rng)) * r;
      for (Eigen::Index i = 0; i < gens.lineality.cols(); ++i) d += g(rng) * gens.lineality.col(i);
      probe(d);
    }
  }
  rep.min_eigs.push_back(worst);
  rep.pass = worst > kPdTol;
  return rep;
}

SubregularityCertificate certify_subregularity(const CompositeProblem& p, const Vec& xbar, std::uint64_t seed) {
  SubregularityCertificate cert;
  const Vec cbar = map_value(p.c, xbar);
  if (!evaluate(p.h, cbar).finite()) throw DomainError(kModule, "x is outside dom f");
  const Mat jac = map_jacobian(p.c, xbar);
  const CQReport cq = check_cqs_at(p.h, cbar, jac);
  cert.bcq = cq.bcq;
  if (!cq.bcq) {
    cert.reasons.push_back("basic constraint qualification fails");
    return cert;
  }
  const MultiplierSet ms = multiplier_set_at(p.h, cbar, jac);
  cert.m_singleton = ms.status == MultiplierSet::Status::Singleton;
  if (!cert.m_singleton) {
    cert.reasons.push_back("multiplier set is " + to_string(ms.status));
    return cert;
  }
  cert.ybar = ms.y;
  cert.sosc = certify_sosc(p, xbar, ms.y, seed);
  if (!cert.sosc.pass) cert.reasons.push_back("second-order sufficiency fails (" + to_string(cert.sosc.mode) + ")");
  cert.sms = cert.sosc.pass;
  return cert;
}

KKTMatrix restricted_kkt_matrix(const Mat& H, const Mat& jac, const Mat& Q, const Mat& A, const Mat& AP) {
  const Eigen::Index n = H.rows();
  const Eigen::Index m = jac.rows();
  const Eigen::Index l = A.cols();
  KKTMatrix out;
  out.matrix = Mat::Zero(n + m + l, n + m + l);
  out.matrix.block(0, 0, n, n) = H;
  out.matrix.block(0, n, n, m) = jac.transpose();
  out.matrix.block(n, 0, m, n) = -Q * jac;
  out.matrix.block(n, n, m, m) = Mat::Identity(m, m);
  out.matrix.block(n, n + m, m, l) = -AP;
  out.matrix.block(n + m, 0, l, n) = A.transpose() * jac;
  Eigen::FullPivLU<Mat> lu(out.matrix);
  lu.setThreshold(1e-12);
  out.nonsingular = lu.isInvertible();
  return out;
}

KKTMatrix restricted_kkt_matrix(const CompositeProblem& p, const ManifoldData& md, const Vec& x, const Vec& y, int j) {
  return restricted_kkt_matrix(weighted_hessian(p.c, x, y), map_jacobian(p.c, x), md.Q(j), md.A, md.AP(j));
}

IsolationCheck isolated_solution_check(const CompositeProblem& p, const Vec& xbar, const Vec& ybar, double radius) {
  const Mat H = weighted_hessian(p.c, xbar, ybar);
  const std::vector<EnumCandidate> cands = solve_subproblem_enum(p, xbar, ybar, H);
  IsolationCheck out;
  out.candidates = static_cast<int>(cands.size());
  out.isolated = true;
  for (const EnumCandidate& c : cands) {
    const double dist = std::hypot(c.d.norm(), (c.y - ybar).norm());
    if (dist > radius) continue;
    ++out.within_radius;
    if (c.null_dim > 0) out.segment_found = true;
    if (dist > 1e-9 || c.null_dim > 0) out.isolated = false;
  }
  if (out.within_radius == 0) out.isolated = false;
  return out;
}

}  // namespace plqn
