#include "plqn/report.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include <json.hpp>

#include "plqn/calculus.hpp"
#include "plqn/certify.hpp"
#include "plqn/manifold.hpp"
#include "plqn/rate.hpp"

namespace plqn {

namespace {

using nlohmann::json;
constexpr const char* kModule = "cli_harness";

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string fmt(const ExtReal& v) { return v.finite() ? fmt(v.value()) : "+inf"; }

std::string fmt(const Vec& v) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v(i));
  return s + ")";
}

json jnum(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return nullptr;
  return v > 0 ? "inf" : "-inf";
}

json jvec(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(jnum(v(i)));
  return a;
}

json jmat(const Mat& m) {
  json a = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(jvec(m.row(r).transpose()));
  return a;
}

const char* yes(bool b) { return b ? "yes" : "no"; }

Vec default_y(const CompositeProblem& p, const Vec& x) {
  const Vec c = map_value(p.c, x);
  const ActiveProfile prof = eval_with_active(p.h, c);
  if (prof.active_pieces.empty()) return Vec::Zero(p.m());
  return p.h.piece_gradient(prof.active_pieces.back(), c);
}

Report validate_cmd(const LoadedProblem& lp) {
  const ValidationReport& v = lp.validation;
  Report r;
  std::ostringstream os;
  json j;
  os << "validate: m = " << lp.problem.m() << ", hyperplanes = " << lp.problem.h.num_hyperplanes()
     << ", pieces = " << lp.problem.h.num_pieces() << "\n";
  json pieces = json::array();
  for (size_t k = 0; k < v.piece_feasible.size(); ++k) {
    os << "  piece " << k << ": feasible " << yes(v.piece_feasible[k]) << ", full-dimensional "
       << yes(v.piece_full_dimensional[k]) << ", symmetric Q " << yes(v.piece_symmetric[k]) << ", min curvature "
       << fmt(v.piece_min_curvature[k]) << "\n";
    pieces.push_back({{"feasible", v.piece_feasible[k]},
                      {"full_dimensional", v.piece_full_dimensional[k]},
                      {"symmetric", v.piece_symmetric[k]},
                      {"min_curvature", jnum(v.piece_min_curvature[k])}});
  }
  os << "  continuity: " << v.continuity_failures << " failures in " << v.continuity_probes
     << " probes (max residual " << fmt(v.max_continuity_residual) << ")\n";
  os << "  convexity: " << v.convexity_violations << " violations in " << v.convexity_probes << " segments\n";
  os << "  interior overlaps: " << v.interior_overlaps << "\n";
  os << "  range condition: " << v.qq_in_range_failures << " failures in " << v.qq_in_range_checks
     << " checks (max residual " << fmt(v.max_qq_in_range_residual) << ")\n";
  os << "  dom h full-dimensional: " << yes(v.domain_full_dimensional) << "\n";
  for (const auto& f : v.failures) os << "  FAIL " << f << "\n";
  os << "validation: " << (v.all_pass ? "pass" : "fail") << "\n";
  j["command"] = "validate";
  j["pieces"] = pieces;
  j["continuity"] = {{"failures", v.continuity_failures},
                     {"probes", v.continuity_probes},
                     {"max_residual", jnum(v.max_continuity_residual)}};
  j["convexity"] = {{"violations", v.convexity_violations}, {"probes", v.convexity_probes}};
  j["interior_overlaps"] = v.interior_overlaps;
  j["range_condition"] = {{"failures", v.qq_in_range_failures},
                          {"checks", v.qq_in_range_checks},
                          {"max_residual", jnum(v.max_qq_in_range_residual)}};
  j["domain_full_dimensional"] = v.domain_full_dimensional;
  j["failures"] = v.failures;
  j["all_pass"] = v.all_pass;
  r.text = os.str();
  r.json = j.dump(2);
  r.exit_code = v.all_pass ? kExitPass : kExitCertifiedFailure;
  return r;
}

Report certify_cmd(const LoadedProblem& lp, const CliOptions& opts) {
  const CompositeProblem& p = lp.problem;
  Vec x;
  std::optional<Vec> y;
  if (!opts.point.empty() && opts.point != "random") {
    const PointFile pf = load_point(opts.point, p.n(), p.m());
    x = pf.x;
    y = pf.y;
  } else if (lp.x_ref) {
    x = *lp.x_ref;
    y = lp.y_ref;
  } else {
    throw ArgumentError(kModule, "certify needs --point or a reference solution in the problem file");
  }

  std::ostringstream os;
  json j;
  j["command"] = "certify";
  const Vec c = map_value(p.c, x);
  const ActiveProfile prof = eval_with_active(p.h, c);
  os << "certify at x = " << fmt(x) << "\n";
  os << "  c(x) = " << fmt(c) << ", h(c(x)) = " << fmt(prof.value) << "\n";
  j["x"] = jvec(x);
  j["c"] = jvec(c);
  j["value"] = prof.value.finite() ? jnum(prof.value.value()) : json("+inf");
  j["active_pieces"] = prof.active_pieces;
  Report r;
  if (!prof.value.finite()) {
    os << "  x is outside dom f\n";
    r.text = os.str();
    j["conclusion"] = "not-certified";
    r.json = j.dump(2);
    r.exit_code = kExitCertifiedFailure;
    return r;
  }
  os << "  active pieces K = " << prof.kbar << ", active hyperplanes = " << prof.ell << "\n";

  const Mat jac = map_jacobian(p.c, x);
  const MultiplierSet ms = multiplier_set_at(p.h, c, jac);
  const CQReport cq = check_cqs_at(p.h, c, jac);
  os << "  multiplier set: " << to_string(ms.status) << (ms.supported ? "" : " (unsupported-by-theory: BCQ fails)")
     << "\n";
  os << "  BCQ " << yes(cq.bcq) << ", TC " << yes(cq.tc) << ", SC " << yes(cq.sc)
     << " (ri slack " << fmt(cq.ri_slack) << ")\n";
  j["multiplier_set"] = {{"status", to_string(ms.status)}, {"supported", ms.supported}};
  if (ms.status != MultiplierSet::Status::Empty) j["multiplier_set"]["element"] = jvec(ms.y);
  j["cq"] = {{"bcq", cq.bcq}, {"tc", cq.tc}, {"sc", cq.sc}, {"m_singleton", cq.m_singleton}, {"ri_slack", jnum(cq.ri_slack)}};
  if (cq.ybar) j["cq"]["ybar"] = jvec(*cq.ybar);

  if (!y && ms.status == MultiplierSet::Status::Singleton) y = ms.y;
  bool all_ok = cq.bcq && cq.tc && cq.sc;

  if (prof.kbar >= 2 && y) {
    const ManifoldData md = build_manifold(p.h, c);
    const PartialSmoothnessCertificate ps = certify_partial_smoothness(md, c, *y);
    os << "  manifold: kbar = " << md.kbar << ", ell = " << md.ell << ", nondegenerate " << yes(md.nondegenerate)
       << "\n";
    os << "  partial smoothness: " << (ps.certified ? "certified" : "not certified") << " (k-strict "
       << yes(ps.k_strict) << ", ri member " << yes(ps.ri_member) << ", min mu " << fmt(ps.min_mu)
       << ", par U = Null blockA " << yes(ps.parallel_identity) << ", par subdiff = Ran A "
       << yes(ps.par_matches_range) << ")\n";
    for (const auto& reason : ps.reasons) os << "    " << reason << "\n";
    json margins = json::array();
    for (double m : ps.zeta_margins) margins.push_back(jnum(m));
    j["manifold"] = {{"kbar", md.kbar},      {"ell", md.ell},           {"nondegenerate", md.nondegenerate},
                     {"A", jmat(md.A)},      {"active", md.active}};
    j["partial_smoothness"] = {{"certified", ps.certified},
                               {"k_strict", ps.k_strict},
                               {"ri_member", ps.ri_member},
                               {"min_mu", jnum(ps.min_mu)},
                               {"parallel_identity", ps.parallel_identity},
                               {"par_matches_range", ps.par_matches_range},
                               {"zeta_margins", margins},
                               {"reasons", ps.reasons}};
    all_ok = all_ok && md.nondegenerate && ps.certified;
    if (md.nondegenerate) {
      bool nonsing = true;
      for (int jj = 0; jj < md.kbar; ++jj) nonsing = nonsing && restricted_kkt_matrix(p, md, x, *y, jj).nonsingular;
      os << "  restricted KKT matrices nonsingular: " << yes(nonsing) << "\n";
      j["restricted_kkt_nonsingular"] = nonsing;
      all_ok = all_ok && nonsing;
    }
  } else if (prof.kbar == 1) {
    os << "  single active piece: " << (prof.ell == 0 ? "smooth case" : "boundary point; only the enum solver applies")
       << "\n";
    j["regime"] = prof.ell == 0 ? "smooth" : "single-piece-boundary";
  }

  const SubregularityCertificate sr = certify_subregularity(p, x, opts.seed);
  if (sr.m_singleton) {
    os << "  SOSC: " << (sr.sosc.pass ? "pass" : "fail") << " (" << to_string(sr.sosc.mode) << ", min eigenvalues";
    for (double e : sr.sosc.min_eigs) os << " " << fmt(e);
    os << ")\n";
    json eigs = json::array();
    for (double e : sr.sosc.min_eigs) eigs.push_back(jnum(e));
    j["sosc"] = {{"pass", sr.sosc.pass}, {"mode", to_string(sr.sosc.mode)}, {"min_eigs", eigs}, {"note", sr.sosc.note}};
  }
  for (const auto& reason : sr.reasons) os << "    " << reason << "\n";
  const IsolationCheck iso = sr.m_singleton ? isolated_solution_check(p, x, sr.ybar) : IsolationCheck{};
  if (sr.m_singleton) {
    os << "  linearized equation: " << iso.candidates << " critical structures, " << iso.within_radius
       << " within radius 0.1, isolated " << yes(iso.isolated) << (iso.segment_found ? ", solution segment found" : "")
       << "\n";
    j["isolation"] = {{"candidates", iso.candidates},
                      {"within_radius", iso.within_radius},
                      {"isolated", iso.isolated},
                      {"segment_found", iso.segment_found}};
  }
  os << "  assumption (not checked): c is three times continuously differentiable\n";
  const std::string conclusion = sr.sms ? "strongly-metrically-subregular" : "not-certified";
  os << "conclusion: " << conclusion << "\n";
  j["subregularity"] = {{"bcq", sr.bcq}, {"m_singleton", sr.m_singleton}, {"reasons", sr.reasons}};
  j["conclusion"] = conclusion;
  j["all_certified"] = all_ok && sr.sms;
  r.text = os.str();
  r.json = j.dump(2);
  r.exit_code = all_ok && sr.sms ? kExitPass : kExitCertifiedFailure;
  return r;
}

IterationTrace run_solver(const LoadedProblem& lp, const CliOptions& opts, std::string& method) {
  const CompositeProblem& p = lp.problem;
  method = opts.method.value_or(lp.solver.method);
  SolveOptions so;
  so.tol = opts.tol.value_or(lp.solver.tol);
  so.max_iter = opts.max_iter.value_or(lp.solver.max_iter);
  so.x_ref = lp.x_ref;
  so.y_ref = lp.y_ref;
  const Vec x0 = lp.x0.value_or(Vec::Zero(p.n()));
  const Vec y0 = lp.y0 ? *lp.y0 : default_y(p, x0);
  if (method == "newton") return newton_solve_auto(p, x0, y0, so);
  if (method == "smooth") return smooth_newton_solve(p, x0, y0, so);
  if (method == "enum") {
    IterationTrace tr = quasi_newton_solve(p, x0, y0, exact_hessian_schedule(p), so);
    tr.method = "enum";
    return tr;
  }
  if (method == "quasi") {
    const std::string sched = lp.solver.schedule;
    if (sched == "exact") return quasi_newton_solve(p, x0, y0, exact_hessian_schedule(p), so);
    if (!lp.x_ref || !lp.y_ref) throw ArgumentError(kModule, "schedule '" + sched + "' needs a reference solution");
    const Mat Hbar = weighted_hessian(p.c, *lp.x_ref, *lp.y_ref);
    const double shift = lp.solver.shift;
    const int n = p.n();
    HessianSchedule s;
    if (sched == "decay") {
      s = [Hbar, n](int k, const Vec&, const Vec&) { return Mat(Hbar + std::ldexp(1.0, -k) * Mat::Identity(n, n)); };
    } else {
      s = [Hbar, n, shift](int, const Vec&, const Vec&) { return Mat(Hbar + shift * Mat::Identity(n, n)); };
    }
    return quasi_newton_solve(p, x0, y0, s, so);
  }
  throw ArgumentError(kModule, "unknown method '" + method + "'");
}

Report solve_cmd(const LoadedProblem& lp, const CliOptions& opts, bool rate_only) {
  Report r;
  std::string method;
  IterationTrace tr;
  json j;
  j["command"] = rate_only ? "rate" : "solve";
  try {
    tr = run_solver(lp, opts, method);
  } catch (const RegimeError& e) {
    r.text = std::string("regime error: ") + e.what() + "\n";
    j["error"] = e.what();
    r.json = j.dump(2);
    r.exit_code = kExitRegimeError;
    return r;
  } catch (const DivergenceError& e) {
    r.text = std::string("divergence: ") + e.what() + "\n";
    j["error"] = e.what();
    r.json = j.dump(2);
    r.exit_code = kExitRegimeError;
    return r;
  } catch (const StepError& e) {
    r.text = std::string("step failure: ") + e.what() + "\n";
    j["error"] = e.what();
    r.json = j.dump(2);
    r.exit_code = kExitRegimeError;
    return r;
  }
  const std::vector<double> errs = tr.error_sequence();
  const RateVerdict v = classify_rate(errs);
  const bool has_ref = lp.x_ref && lp.y_ref;
  std::ostringstream os;
  os << (rate_only ? "rate" : "solve") << ": method " << method << ", " << tr.iterations() << " iterations, "
     << (tr.converged ? "converged" : "not converged") << " (" << tr.stop_reason << ")\n";
  if (!rate_only) {
    os << "  iter  residual          err               dm_ratio          on_manifold\n";
    for (const IterRecord& rec : tr.iters) {
      char line[160];
      std::snprintf(line, sizeof line, "  %4d  %-16.6e  %-16.6e  %-16.6e  %d\n", rec.iter, rec.residual, rec.err,
                    rec.dm_ratio, rec.on_manifold ? 1 : 0);
      os << line;
    }
    os << "  x = " << fmt(tr.last().x) << "\n";
    os << "  y = " << fmt(tr.last().y) << "\n";
  } else {
    for (size_t i = 0; i + 1 < errs.size(); ++i) {
      char line[120];
      std::snprintf(line, sizeof line, "  e%-3zu = %-14.6e  e+/e = %-12.4e  e+/e^2 = %.4e\n", i, errs[i],
                    errs[i + 1] / errs[i], errs[i + 1] / (errs[i] * errs[i]));
      os << line;
    }
  }
  for (const auto& w : tr.warnings) os << "  warning: " << w << "\n";
  os << "rate: " << to_string(v) << (has_ref ? "" : " (residual used as error proxy)") << "\n";

  j["method"] = method;
  j["iterations"] = tr.iterations();
  j["converged"] = tr.converged;
  j["stop_reason"] = tr.stop_reason;
  j["x"] = jvec(tr.last().x);
  j["y"] = jvec(tr.last().y);
  j["final_residual"] = jnum(tr.last().residual);
  j["warnings"] = tr.warnings;
  j["rate"] = {{"classification", to_string(v)}, {"used", v.used}, {"reason", v.reason}, {"error_proxy", !has_ref}};
  json errors = json::array();
  for (double e : errs) errors.push_back(jnum(e));
  j["errors"] = errors;
  r.text = os.str();
  r.json = j.dump(2);
  r.trace_csv = trace_to_csv(tr);
  if (rate_only)
    r.exit_code = v.kind == RateVerdict::Kind::None ? kExitCertifiedFailure : kExitPass;
  else
    r.exit_code = tr.converged ? kExitPass : kExitCertifiedFailure;
  return r;
}

Report check_derivs_cmd(const LoadedProblem& lp, const CliOptions& opts) {
  const SmoothMap& c = lp.problem.c;
  const int n = c.n;
  const int m = c.m();
  std::vector<std::pair<Vec, Vec>> points;
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  if (!opts.point.empty() && opts.point != "random") {
    const PointFile pf = load_point(opts.point, n, m);
    Vec y = pf.y.value_or(Vec::Ones(m));
    points.emplace_back(pf.x, y);
  } else {
    for (int t = 0; t < 100; ++t) {
      Vec x(n), y(m);
      for (int i = 0; i < n; ++i) x(i) = u(rng);
      for (int i = 0; i < m; ++i) y(i) = u(rng);
      points.emplace_back(x, y);
    }
  }
  const double hstep = 1e-5;
  double jac_dev = 0.0;
  double hess_dev = 0.0;
  int skipped = 0;
  int used = 0;
  for (const auto& [x, y] : points) {
    try {
      const Mat J = map_jacobian(c, x);
      const Mat H = weighted_hessian(c, x, y);
      Mat Jfd(m, n), Hfd(n, n);
      for (int a = 0; a < n; ++a) {
        Vec xp = x, xm = x;
        xp(a) += hstep;
        xm(a) -= hstep;
        Jfd.col(a) = (map_value(c, xp) - map_value(c, xm)) / (2 * hstep);
        Hfd.col(a) = (map_jacobian(c, xp).transpose() * y - map_jacobian(c, xm).transpose() * y) / (2 * hstep);
      }
      jac_dev = std::max(jac_dev, (J - Jfd).cwiseAbs().maxCoeff() / (1.0 + J.cwiseAbs().maxCoeff()));
      hess_dev = std::max(hess_dev, (H - Hfd).cwiseAbs().maxCoeff() / (1.0 + H.cwiseAbs().maxCoeff()));
      ++used;
    } catch (const DomainError&) {
      ++skipped;
    }
  }
  const bool pass = used > 0 && jac_dev <= 1e-6 && hess_dev <= 1e-5;
  std::ostringstream os;
  os << "check-derivs: " << used << " points (" << skipped << " outside the domain of c)\n";
  os << "  max jacobian deviation " << fmt(jac_dev) << " (limit 1e-6)\n";
  os << "  max weighted hessian deviation " << fmt(hess_dev) << " (limit 1e-5)\n";
  os << "derivatives: " << (pass ? "pass" : "fail") << "\n";
  json j = {{"command", "check-derivs"},
            {"points", used},
            {"skipped", skipped},
            {"jacobian_deviation", jnum(jac_dev)},
            {"hessian_deviation", jnum(hess_dev)},
            {"pass", pass}};
  Report r;
  r.text = os.str();
  r.json = j.dump(2);
  r.exit_code = pass ? kExitPass : kExitCertifiedFailure;
  return r;
}

}  // namespace

std::string trace_to_csv(const IterationTrace& tr) {
  if (tr.iters.empty()) return "";
  const Eigen::Index n = tr.iters.front().x.size();
  const Eigen::Index m = tr.iters.front().y.size();
  Eigen::Index nm = 0;
  for (const IterRecord& r : tr.iters) nm = std::max(nm, r.mu.size());
  std::ostringstream os;
  os << "iter";
  for (Eigen::Index i = 1; i <= n; ++i) os << ",x" << i;
  for (Eigen::Index i = 1; i <= m; ++i) os << ",y" << i;
  for (Eigen::Index i = 1; i <= nm; ++i) os << ",mu" << i;
  os << ",stat_res,sub_viol,err,dm_ratio,on_manifold\n";
  auto num = [](double v) {
    char buf[40];
    if (std::isnan(v)) return std::string("");
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (const IterRecord& r : tr.iters) {
    os << r.iter;
    for (Eigen::Index i = 0; i < n; ++i) os << "," << num(r.x(i));
    for (Eigen::Index i = 0; i < m; ++i) os << "," << num(r.y(i));
    for (Eigen::Index i = 0; i < nm; ++i) os << "," << (i < r.mu.size() ? num(r.mu(i)) : "");
    os << "," << num(r.stat_res) << "," << num(r.sub_viol) << "," << num(r.err) << "," << num(r.dm_ratio) << ","
       << (r.on_manifold ? 1 : 0) << "\n";
  }
  return os.str();
}

Report run_report(const std::string& command, const LoadedProblem& lp, const CliOptions& opts) {
  if (command == "validate") return validate_cmd(lp);
  if (command == "certify") return certify_cmd(lp, opts);
  if (command == "solve") return solve_cmd(lp, opts, false);
  if (command == "rate") return solve_cmd(lp, opts, true);
  if (command == "check-derivs") return check_derivs_cmd(lp, opts);
  throw ArgumentError(kModule, "unknown command '" + command + "'");
}

}  // namespace plqn
