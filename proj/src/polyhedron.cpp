#include "plqn/polyhedron.hpp"

#include <cmath>
#include <functional>

#include "plqn/linalg.hpp"
#include "plqn/simplex.hpp"

namespace plqn {

using linalg::vstack;

PolyhedronH PolyhedronH::whole_space(Eigen::Index dim) {
  return PolyhedronH{Mat(0, dim), Vec(0), Mat(0, dim), Vec(0)};
}

Eigen::Index PolyhedronH::ambient_dim() const { return E.rows() > 0 ? E.cols() : F.cols(); }

double PolyhedronH::max_violation(const Vec& y) const {
  double v = 0.0;
  if (E.rows() > 0) v = std::max(v, (E * y - e).cwiseAbs().maxCoeff());
  if (F.rows() > 0) v = std::max(v, (F * y - f).maxCoeff());
  return v;
}

bool PolyhedronH::contains(const Vec& y, double slack) const {
  for (Eigen::Index i = 0; i < E.rows(); ++i) {
    const double scale = 1.0 + std::abs(e(i));
    if (std::abs(E.row(i).dot(y) - e(i)) > slack * scale) return false;
  }
  for (Eigen::Index i = 0; i < F.rows(); ++i) {
    const double scale = 1.0 + std::abs(f(i));
    if (F.row(i).dot(y) - f(i) > slack * scale) return false;
  }
  return true;
}

std::optional<Vec> PolyhedronH::find_point() const {
  Vec x;
  const Eigen::Index n = ambient_dim();
  if (E.rows() == 0 && F.rows() == 0) return Vec::Zero(n);
  if (!lp::feasible(E.rows() > 0 ? E : Mat(0, n), e, F.rows() > 0 ? F : Mat(0, n), f, &x))
    return std::nullopt;
  return x;
}

bool PolyhedronH::is_empty() const { return !find_point().has_value(); }

PolyhedronH PolyhedronH::intersect(const PolyhedronH& o) const {
  return PolyhedronH{vstack(E, o.E), vstack(e, o.e), vstack(F, o.F), vstack(f, o.f)};
}

PolyhedronH PolyhedronH::add_equalities(const Mat& rows, const Vec& rhs) const {
  return PolyhedronH{vstack(E, rows), vstack(e, rhs), F, f};
}

PolyhedronH PolyhedronH::add_inequalities(const Mat& rows, const Vec& rhs) const {
  return PolyhedronH{E, e, vstack(F, rows), vstack(f, rhs)};
}

std::optional<LinearMax> maximize(const PolyhedronH& p, const Vec& objective) {
  const Eigen::Index n = p.ambient_dim();
  lp::LinearProgram prog{p.E.rows() > 0 ? p.E : Mat(0, n), p.e, p.F.rows() > 0 ? p.F : Mat(0, n), p.f,
                         -objective};
  const lp::Result r = lp::solve(prog);
  if (r.status == lp::Status::Infeasible) return std::nullopt;
  LinearMax out;
  out.bounded = r.status == lp::Status::Optimal;
  out.value = -r.objective;
  out.argmax = r.x;
  return out;
}

std::optional<AffineHull> affine_hull(const PolyhedronH& p) {
  auto pt = p.find_point();
  if (!pt) return std::nullopt;
  AffineHull hull;
  hull.point = *pt;
  const Eigen::Index n = p.ambient_dim();
  Mat rows = p.E.rows() > 0 ? p.E : Mat(0, n);
  Vec rhs = p.e;
  for (Eigen::Index i = 0; i < p.F.rows(); ++i) {
    const Vec row = p.F.row(i).transpose();
    auto lo = maximize(p, -row);  // max of -<F_i,y> = -min <F_i,y>
    if (!lo || !lo->bounded) continue;
    const double min_val = -lo->value;
    const double slack = p.f(i) - min_val;
    const double tol = kMembershipSlack * std::max(1.0, row.norm()) * (1.0 + std::abs(p.f(i)));
    if (slack <= tol) {
      hull.implicit.push_back(static_cast<int>(i));
      rows = vstack(rows, Mat(row.transpose()));
      rhs = vstack(rhs, Vec::Constant(1, p.f(i)));
    }
  }
  hull.eq_rows = rows;
  hull.eq_rhs = rhs;
  hull.par_basis = linalg::null_space(rows);
  return hull;
}

std::optional<InteriorPoint> relative_interior_point(const PolyhedronH& p, const AffineHull& hull) {
  const Eigen::Index n = p.ambient_dim();
  std::vector<bool> implicit(static_cast<size_t>(p.F.rows()), false);
  for (int i : hull.implicit) implicit[static_cast<size_t>(i)] = true;

  // Variables (y, t). maximize t subject to slack rows and t <= 1.
  Mat eq(hull.eq_rows.rows(), n + 1);
  eq.setZero();
  if (hull.eq_rows.rows() > 0) eq.leftCols(n) = hull.eq_rows;
  std::vector<Eigen::Index> others;
  for (Eigen::Index i = 0; i < p.F.rows(); ++i)
    if (!implicit[static_cast<size_t>(i)]) others.push_back(i);
  Mat in = Mat::Zero(static_cast<Eigen::Index>(others.size()) + 1, n + 1);
  Vec inb(static_cast<Eigen::Index>(others.size()) + 1);
  for (size_t k = 0; k < others.size(); ++k) {
    const auto i = others[k];
    const auto r = static_cast<Eigen::Index>(k);
    in.row(r).head(n) = p.F.row(i);
    in(r, n) = p.F.row(i).norm();
    inb(r) = p.f(i);
  }
  in(in.rows() - 1, n) = 1.0;
  inb(in.rows() - 1) = 1.0;
  Vec cost = Vec::Zero(n + 1);
  cost(n) = -1.0;
  const lp::Result r = lp::solve(lp::LinearProgram{eq, hull.eq_rhs, in, inb, cost});
  if (r.status != lp::Status::Optimal) return std::nullopt;
  return InteriorPoint{r.x.head(n), r.x(n)};
}

ConeGenerators cone_generators(Eigen::Index dim, const Mat& G_in, const Mat& Eq_in) {
  const Mat G = G_in.rows() > 0 ? G_in : Mat(0, dim);
  const Mat Eq = Eq_in.rows() > 0 ? Eq_in : Mat(0, dim);
  ConeGenerators out;
  out.lineality = linalg::null_space(vstack(G, Eq));
  const Mat fixed = vstack(Eq, Mat(out.lineality.transpose()));
  const Mat W = linalg::null_space(fixed);
  const int r = static_cast<int>(W.cols());
  if (r == 0) return out;

  // Normalize rows so that the feasibility tolerance is scale free.
  Mat Gn = G;
  for (Eigen::Index i = 0; i < Gn.rows(); ++i) {
    const double nr = Gn.row(i).norm();
    if (nr > 0) Gn.row(i) /= nr;
  }
  const double tol = 1e-10;
  auto accept = [&](const Vec& v) {
    if (Gn.rows() > 0 && (Gn * v).maxCoeff() > tol) return false;
    for (const Vec& u : out.rays)
      if ((u - v).norm() <= 1e-8) return false;
    out.rays.push_back(v);
    return true;
  };

  const int p = static_cast<int>(Gn.rows());
  const int need = r - 1;
  if (need > p) return out;
  std::vector<int> subset(static_cast<size_t>(need));
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == need) {
      Mat rows(need, dim);
      for (int k = 0; k < need; ++k) rows.row(k) = Gn.row(subset[static_cast<size_t>(k)]);
      const Mat N = linalg::null_space(vstack(fixed, rows));
      if (N.cols() != 1) return;
      const Vec v = N.col(0).normalized();
      if (!accept(v)) accept(Vec(-v));
      return;
    }
    for (int i = start; i <= p - (need - depth); ++i) {
      subset[static_cast<size_t>(depth)] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
  return out;
}

bool cone_is_trivial(Eigen::Index dim, const Mat& G, const Mat& Eq) {
  const ConeGenerators gens = cone_generators(dim, G, Eq);
  return gens.lineality.cols() == 0 && gens.rays.empty();
}

PolyhedronH conic_hull_hrep(const Mat& generators, Eigen::Index dim) {
  // cone(g) = {v : g^T v <= 0}° ; polar of L + cone(rays) is {u : L^T u = 0, rays^T u <= 0}.
  const Mat G = generators.cols() > 0 ? Mat(generators.transpose()) : Mat(0, dim);
  const ConeGenerators polar = cone_generators(dim, G);
  PolyhedronH out = PolyhedronH::whole_space(dim);
  out.E = polar.lineality.transpose();
  out.e = Vec::Zero(out.E.rows());
  out.F = Mat(static_cast<Eigen::Index>(polar.rays.size()), dim);
  for (size_t i = 0; i < polar.rays.size(); ++i) out.F.row(static_cast<Eigen::Index>(i)) = polar.rays[i].transpose();
  out.f = Vec::Zero(out.F.rows());
  return out;
}

}  // namespace plqn
