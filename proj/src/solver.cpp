#include "plqn/solver.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "plqn/calculus.hpp"
#include "plqn/certify.hpp"
#include "plqn/linalg.hpp"

namespace plqn {

namespace {

constexpr const char* kModule = "solver";
constexpr double kGluingRecord = 1e-10;
constexpr double kGluingAbort = 1e-8;
constexpr double kDivergenceFactor = 1e6;
constexpr int kMaxEnumHyperplanes = 16;

double err_of(const SolveOptions& o, const Vec& x, const Vec& y) {
  if (!o.x_ref || !o.y_ref) return NAN;
  return (x - *o.x_ref).norm() + (y - *o.y_ref).norm();
}

void check_divergence(const Vec& x, double start_norm) {
  if (x.norm() > kDivergenceFactor * std::max(1.0, start_norm))
    throw DivergenceError(kModule, "iterates left every neighborhood of the start (|x| grew by 1e6)");
}

ExtReal subgrad_violation(const PLQFunction& h, const Vec& c, const Vec& y) {
  if (!evaluate(h, c).finite()) return ExtReal::infinity();
  return subdiff_hrep(h, c).max_violation(y);
}

double finite_or_inf(const ExtReal& v) { return v.finite() ? v.value() : INFINITY; }

// mu from the closed formula without membership checks (used for start states).
std::vector<Vec> raw_mu(const ManifoldData& md, const Vec& c, const Vec& y) {
  std::vector<Vec> out;
  if (md.ell == 0) {
    out.assign(static_cast<size_t>(md.kbar), Vec(0));
    return out;
  }
  const Mat AtA = md.A.transpose() * md.A;
  const Eigen::LDLT<Mat> solver(AtA);
  for (int j = 0; j < md.kbar; ++j)
    out.push_back(md.P[static_cast<size_t>(j)].cwiseProduct(solver.solve(md.A.transpose() * (y - md.Q(j) * c - md.b(j)))));
  return out;
}

Vec stack(const std::vector<Vec>& blocks) {
  MuVector mv{blocks};
  return mv.stacked();
}

// Residual of the restricted system g_j + G_0 at (x, y, mu), maximized over pieces.
double restricted_residual(const CompositeProblem& p, const ManifoldData& md, const Vec& x, const Vec& y,
                           const std::vector<Vec>& mu) {
  const Vec c = map_value(p.c, x);
  const double stat = (map_jacobian(p.c, x).transpose() * y).norm();
  const double on_m = md.ell > 0 ? (md.A.transpose() * (c - md.cbar)).norm() : 0.0;
  double worst = 0.0;
  for (int j = 0; j < md.kbar; ++j) {
    const Vec& mj = mu[static_cast<size_t>(j)];
    double r = stat + on_m + (y - md.Q(j) * c - md.b(j) - md.AP(j) * mj).norm();
    if (mj.size() > 0) r += (-mj).cwiseMax(0.0).norm();
    worst = std::max(worst, r);
  }
  return worst;
}

bool reduced_model_pd(const ManifoldData& md, const Mat& jac, const Mat& H) {
  const Mat Z = md.ell > 0 ? linalg::null_space(md.A.transpose() * jac) : Mat(Mat::Identity(jac.cols(), jac.cols()));
  if (Z.cols() == 0) return true;
  for (int j = 0; j < md.kbar; ++j)
    if (linalg::min_sym_eigenvalue(Z.transpose() * (jac.transpose() * md.Q(j) * jac + H) * Z) <= kPdTol) return false;
  return true;
}

}  // namespace

std::vector<double> IterationTrace::error_sequence() const {
  std::vector<double> out;
  for (const IterRecord& r : iters) out.push_back(std::isnan(r.err) ? r.residual : r.err);
  return out;
}

RestrictedState restricted_newton_step(const CompositeProblem& p, const ManifoldData& md, const RestrictedState& s,
                                       int j) {
  const int n = p.n();
  const int m = p.m();
  const int l = md.ell;
  const Vec c = map_value(p.c, s.x);
  const Mat jac = map_jacobian(p.c, s.x);
  const Mat H = weighted_hessian(p.c, s.x, s.y);
  const KKTMatrix K = restricted_kkt_matrix(H, jac, md.Q(j), md.A, md.AP(j));
  if (!K.nonsingular) throw StepError(kModule, "restricted KKT matrix is singular for piece " + std::to_string(md.pieces[static_cast<size_t>(j)]));
  Vec rhs = Vec::Zero(n + m + l);
  rhs.segment(n, m) = md.Q(j) * c + md.b(j);
  if (l > 0) rhs.tail(l) = md.A.transpose() * (md.cbar - c);
  const Vec sol = K.matrix.fullPivLu().solve(rhs);

  RestrictedState out;
  out.x = s.x + sol.head(n);
  out.y = sol.segment(n, m);
  out.mu = s.mu;
  if (out.mu.size() != static_cast<size_t>(md.kbar)) out.mu.assign(static_cast<size_t>(md.kbar), Vec::Zero(l));
  out.mu[static_cast<size_t>(j)] = sol.tail(l);
  return out;
}

IterationTrace newton_solve(const CompositeProblem& p, const ManifoldData& md, const RestrictedState& start,
                            const SolveOptions& opts) {
  IterationTrace tr;
  tr.method = "newton";
  RestrictedState s = start;
  if (s.mu.size() != static_cast<size_t>(md.kbar)) s.mu = raw_mu(md, map_value(p.c, s.x), s.y);
  const double start_norm = s.x.norm();

  IterRecord r0;
  r0.x = s.x;
  r0.y = s.y;
  r0.mu = stack(s.mu);
  r0.stat_res = (map_jacobian(p.c, s.x).transpose() * s.y).norm();
  r0.sub_viol = finite_or_inf(subgrad_violation(p.h, map_value(p.c, s.x), s.y));
  r0.residual = restricted_residual(p, md, s.x, s.y, s.mu);
  r0.err = err_of(opts, s.x, s.y);
  r0.on_manifold = manifold_contains(md, map_value(p.c, s.x));
  tr.iters.push_back(r0);

  for (int it = 1; it <= opts.max_iter; ++it) {
    const Vec chat0 = map_value(p.c, s.x);
    const Mat jac0 = map_jacobian(p.c, s.x);
    const Mat H0 = weighted_hessian(p.c, s.x, s.y);

    std::vector<RestrictedState> steps;
    for (int j = 0; j < md.kbar; ++j) steps.push_back(restricted_newton_step(p, md, s, j));
    const RestrictedState& ref = steps.back();
    double glue = 0.0;
    for (const RestrictedState& st : steps)
      glue = std::max(glue, std::hypot((st.x - ref.x).norm(), (st.y - ref.y).norm()));
    const double scale = 1.0 + ref.x.norm() + ref.y.norm();
    if (glue > kGluingAbort * scale)
      throw DivergenceError(kModule, "restricted steps disagree across pieces (gluing gap " + std::to_string(glue) + ")");
    if (glue > kGluingRecord * scale) tr.warnings.push_back("iteration " + std::to_string(it) + ": gluing gap above 1e-10");

    RestrictedState next;
    next.x = ref.x;
    next.y = ref.y;
    for (int j = 0; j < md.kbar; ++j) next.mu.push_back(steps[static_cast<size_t>(j)].mu[static_cast<size_t>(j)]);

    const Vec chat = chat0 + jac0 * (next.x - s.x);
    IterRecord rec;
    rec.iter = it;
    rec.x = next.x;
    rec.y = next.y;
    rec.mu = stack(next.mu);
    rec.gluing = glue;
    rec.on_manifold = manifold_contains(md, chat);
    rec.active_pieces = eval_with_active(p.h, chat).active_pieces;
    rec.stat_res = (map_jacobian(p.c, next.x).transpose() * next.y).norm();
    rec.sub_viol = finite_or_inf(subgrad_violation(p.h, chat, next.y));
    rec.residual = restricted_residual(p, md, next.x, next.y, next.mu);
    rec.err = err_of(opts, next.x, next.y);
    rec.model_sosc = reduced_model_pd(md, jac0, H0);
    if (rec.mu.size() > 0 && rec.mu.minCoeff() <= kStrictTol)
      tr.warnings.push_back("iteration " + std::to_string(it) + ": a multiplier block is not strictly positive");
    tr.iters.push_back(rec);
    s = next;
    check_divergence(s.x, start_norm);
    if (rec.residual <= opts.tol) {
      tr.converged = true;
      tr.stop_reason = "residual below tolerance";
      return tr;
    }
  }
  tr.stop_reason = "iteration limit reached";
  return tr;
}

IterationTrace newton_solve_auto(const CompositeProblem& p, const Vec& x0, const Vec& y0, const SolveOptions& opts) {
  Vec cbar;
  if (opts.x_ref) {
    cbar = map_value(p.c, *opts.x_ref);
  } else {
    const auto cands = solve_subproblem_enum(p, x0, y0, weighted_hessian(p.c, x0, y0));
    if (cands.empty()) throw StepError(kModule, "the first Newton subproblem has no critical point");
    cbar = map_value(p.c, x0) + map_jacobian(p.c, x0) * cands.front().d;
  }
  const ActiveProfile prof = eval_with_active(p.h, cbar);
  if (prof.kbar < 2)
    throw RegimeError(kModule, "fewer than two pieces are active at the identified point; use the smooth or enum method");
  const ManifoldData md = build_manifold(p.h, cbar);
  if (!md.nondegenerate) throw RegimeError(kModule, "the identified manifold is degenerate (A is rank deficient)");
  RestrictedState start{x0, y0, {}};
  return newton_solve(p, md, start, opts);
}

std::vector<EnumCandidate> solve_subproblem_enum(const CompositeProblem& p, const Vec& xhat, const Vec& yhat,
                                                 const Mat& H) {
  (void)yhat;
  const PLQFunction& h = p.h;
  const int n = p.n();
  const int m = p.m();
  const int s = h.num_hyperplanes();
  if (s > kMaxEnumHyperplanes) throw ArgumentError(kModule, "too many hyperplanes for structure enumeration");
  const Vec c = map_value(p.c, xhat);
  const Mat jac = map_jacobian(p.c, xhat);

  std::vector<EnumCandidate> out;
  for (int k = 0; k < h.num_pieces(); ++k) {
    const Piece& pc = h.piece(k);
    for (unsigned mask = 0; mask < (1u << s); ++mask) {
      std::vector<int> S;
      for (int j = 0; j < s; ++j)
        if (mask & (1u << j)) S.push_back(j);
      const int q = static_cast<int>(S.size());
      const int N = n + m + q;
      Mat K = Mat::Zero(n + m + q, N);
      Vec rhs = Vec::Zero(n + m + q);
      K.block(0, 0, n, n) = H;
      K.block(0, n, n, m) = jac.transpose();
      K.block(n, 0, m, n) = -pc.Q * jac;
      K.block(n, n, m, m) = Mat::Identity(m, m);
      rhs.segment(n, m) = pc.Q * c + pc.b;
      for (int i = 0; i < q; ++i) {
        const int j = S[static_cast<size_t>(i)];
        const Vec an = h.oriented_normal(k, j);
        K.block(n, n + m + i, m, 1) = -an;
        const Hyperplane& hp = h.hyperplanes()[static_cast<size_t>(j)];
        K.block(n + m + i, 0, 1, n) = hp.a.transpose() * jac;
        rhs(n + m + i) = hp.alpha - hp.a.dot(c);
      }
      const Eigen::CompleteOrthogonalDecomposition<Mat> cod(K);
      const Vec sol = cod.solve(rhs);
      const double scale = 1.0 + rhs.norm() + K.norm() * sol.norm();
      if ((K * sol - rhs).norm() > 1e-9 * scale) continue;

      EnumCandidate cand;
      cand.d = sol.head(n);
      cand.y = sol.segment(n, m);
      cand.lambda = sol.tail(q);
      cand.piece = k;
      cand.equalities = S;
      cand.null_dim = N - static_cast<int>(cod.rank());
      if (q > 0 && cand.lambda.minCoeff() < -1e-9) continue;
      const Vec u = c + jac * cand.d;
      if (!h.piece_contains(k, u)) continue;
      if (!subdiff_hrep(h, u).contains(cand.y, 1e-8)) continue;
      cand.model_value = h.piece_value(k, u) + 0.5 * cand.d.dot(H * cand.d);

      bool dup = false;
      for (const EnumCandidate& o : out) {
        if ((o.d - cand.d).norm() <= 1e-9 * (1.0 + cand.d.norm()) && (o.y - cand.y).norm() <= 1e-9 * (1.0 + cand.y.norm())) {
          dup = true;
          break;
        }
      }
      if (dup) continue;

      // Model second-order check on this structure.
      const std::vector<int> act = h.active_hyperplanes(u);
      Mat Z = Mat::Identity(n, n);
      if (!act.empty()) {
        Mat As(static_cast<Eigen::Index>(act.size()), m);
        for (size_t i = 0; i < act.size(); ++i) As.row(static_cast<Eigen::Index>(i)) = h.hyperplanes()[static_cast<size_t>(act[i])].a.transpose();
        Z = linalg::null_space(As * jac);
      }
      double e = INFINITY;
      for (int k2 : eval_with_active(h, u).active_pieces)
        if (Z.cols() > 0) e = std::min(e, linalg::min_sym_eigenvalue(Z.transpose() * (jac.transpose() * h.piece(k2).Q * jac + H) * Z));
      cand.model_min_eig = e;
      cand.model_sosc = e > kPdTol;
      out.push_back(cand);
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const EnumCandidate& a, const EnumCandidate& b) {
    if (std::abs(a.model_value - b.model_value) > 1e-12) return a.model_value < b.model_value;
    return a.piece < b.piece;
  });
  return out;
}

HessianSchedule exact_hessian_schedule(const CompositeProblem& p) {
  return [&p](int, const Vec& x, const Vec& y) { return weighted_hessian(p.c, x, y); };
}

IterationTrace quasi_newton_solve(const CompositeProblem& p, const Vec& x0, const Vec& y0,
                                  const HessianSchedule& schedule, const SolveOptions& opts) {
  IterationTrace tr;
  tr.method = "quasi";
  Vec x = x0;
  Vec y = y0;
  const double start_norm = x0.norm();

  IterRecord r0;
  r0.x = x;
  r0.y = y;
  r0.stat_res = (map_jacobian(p.c, x).transpose() * y).norm();
  r0.sub_viol = finite_or_inf(subgrad_violation(p.h, map_value(p.c, x), y));
  r0.residual = r0.stat_res + r0.sub_viol;
  r0.err = err_of(opts, x, y);
  tr.iters.push_back(r0);

  // Manifold used only for reporting identification.
  std::optional<ManifoldData> md;
  auto try_manifold = [&](const Vec& cb) {
    try {
      md = build_manifold(p.h, cb);
    } catch (const Error&) {
    }
  };
  if (opts.x_ref) try_manifold(map_value(p.c, *opts.x_ref));

  for (int k = 0; k < opts.max_iter; ++k) {
    const Mat B = schedule(k, x, y);
    const auto cands = solve_subproblem_enum(p, x, y, B);
    if (cands.empty()) throw StepError(kModule, "Newton subproblem has no critical point at iteration " + std::to_string(k + 1));
    const EnumCandidate& best = cands.front();
    const Vec c = map_value(p.c, x);
    const Mat jac = map_jacobian(p.c, x);
    const Vec chat = c + jac * best.d;
    const Vec xn = x + best.d;
    const Vec yn = best.y;

    IterRecord rec;
    rec.iter = k + 1;
    rec.x = xn;
    rec.y = yn;
    const double step = std::hypot(best.d.norm(), (yn - y).norm());
    if (step > 0.0) rec.dm_ratio = ((B - weighted_hessian(p.c, x, y)) * best.d).norm() / step;
    const ActiveProfile prof = eval_with_active(p.h, chat);
    rec.active_pieces = prof.active_pieces;
    rec.model_sosc = best.model_sosc;
    if (!opts.x_ref && k == 0) try_manifold(chat);
    rec.on_manifold = md && manifold_contains(*md, chat);
    rec.stat_res = (map_jacobian(p.c, xn).transpose() * yn).norm();
    rec.sub_viol = finite_or_inf(subgrad_violation(p.h, chat, yn));
    rec.residual = rec.stat_res + rec.sub_viol + (map_value(p.c, xn) - chat).norm();
    rec.err = err_of(opts, xn, yn);
    tr.iters.push_back(rec);
    x = xn;
    y = yn;
    check_divergence(x, start_norm);
    if (rec.residual <= opts.tol) {
      tr.converged = true;
      tr.stop_reason = "residual below tolerance";
      return tr;
    }
  }
  tr.stop_reason = "iteration limit reached";
  return tr;
}

IterationTrace smooth_newton_solve(const CompositeProblem& p, const Vec& x0, const Vec& y0, const SolveOptions& opts) {
  const int n = p.n();
  const int m = p.m();
  IterationTrace tr;
  tr.method = "smooth";
  const ActiveProfile prof0 = eval_with_active(p.h, map_value(p.c, x0));
  if (prof0.kbar != 1 || prof0.ell != 0)
    throw RegimeError(kModule, "c(x0) is not interior to a single piece; use the enum or newton method");
  const int k = prof0.active_pieces.front();
  const Mat& Q = p.h.piece(k).Q;
  const Vec& b = p.h.piece(k).b;

  auto residual = [&](const Vec& x, const Vec& y) {
    const Vec c = map_value(p.c, x);
    Vec g(n + m);
    g.head(n) = map_jacobian(p.c, x).transpose() * y;
    g.tail(m) = y - Q * c - b;
    return g;
  };

  Vec x = x0;
  Vec y = y0;
  const double start_norm = x0.norm();
  IterRecord r0;
  r0.x = x;
  r0.y = y;
  {
    const Vec g = residual(x, y);
    r0.stat_res = g.head(n).norm();
    r0.sub_viol = g.tail(m).norm();
    r0.residual = g.norm();
  }
  r0.err = err_of(opts, x, y);
  tr.iters.push_back(r0);

  for (int it = 1; it <= opts.max_iter; ++it) {
    const Vec c = map_value(p.c, x);
    const Mat jac = map_jacobian(p.c, x);
    Mat G = Mat::Zero(n + m, n + m);
    G.block(0, 0, n, n) = weighted_hessian(p.c, x, y);
    G.block(0, n, n, m) = jac.transpose();
    G.block(n, 0, m, n) = -Q * jac;
    G.block(n, n, m, m) = Mat::Identity(m, m);
    Eigen::FullPivLU<Mat> lu(G);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) throw StepError(kModule, "smooth Newton matrix is singular at iteration " + std::to_string(it));
    const Vec dz = lu.solve(-residual(x, y));
    const Vec xn = x + dz.head(n);
    const Vec yn = y + dz.tail(m);
    const Vec chat = c + jac * dz.head(n);
    const ActiveProfile prof = eval_with_active(p.h, chat);
    if (prof.kbar != 1 || prof.active_pieces.front() != k || prof.ell != 0)
      throw RegimeError(kModule, "linearized point left the interior of the piece at iteration " + std::to_string(it));

    IterRecord rec;
    rec.iter = it;
    rec.x = xn;
    rec.y = yn;
    rec.active_pieces = prof.active_pieces;
    rec.on_manifold = true;
    const Vec g = residual(xn, yn);
    rec.stat_res = g.head(n).norm();
    rec.sub_viol = g.tail(m).norm();
    rec.residual = g.norm();
    rec.err = err_of(opts, xn, yn);
    tr.iters.push_back(rec);
    x = xn;
    y = yn;
    check_divergence(x, start_norm);
    if (rec.residual <= opts.tol) {
      tr.converged = true;
      tr.stop_reason = "residual below tolerance";
      return tr;
    }
  }
  tr.stop_reason = "iteration limit reached";
  return tr;
}

}  // namespace plqn
