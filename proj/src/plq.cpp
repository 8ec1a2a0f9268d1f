#include "plqn/plq.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <sstream>

#include "plqn/linalg.hpp"
#include "plqn/simplex.hpp"

namespace plqn {

namespace {

constexpr const char* kModule = "plq_repr";

std::string shape_msg(const std::string& what, long got, long want) {
  std::ostringstream os;
  os << what << " has size " << got << ", expected " << want;
  return os.str();
}

// Random direction in the span of the columns of basis (unit length), or empty when dim 0.
Vec random_direction(const Mat& basis, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec z(basis.cols());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = g(rng);
  Vec d = basis * z;
  const double nd = d.norm();
  if (nd > 0) d /= nd;
  return d;
}

// Largest t in [0, cap] with base + t*dir inside the inequality part of p.
double ray_length(const PolyhedronH& p, const Vec& base, const Vec& dir, double cap) {
  double t = cap;
  for (Eigen::Index i = 0; i < p.F.rows(); ++i) {
    const double rate = p.F.row(i).dot(dir);
    if (rate <= 1e-12) continue;
    const double room = p.f(i) - p.F.row(i).dot(base);
    t = std::min(t, std::max(0.0, room / rate));
  }
  return t;
}

struct Sampler {
  PolyhedronH poly;
  AffineHull hull;
  Vec center;
  double slack = 0.0;

  Vec draw(std::mt19937_64& rng, double cap, bool interior_only) const {
    if (hull.dim() == 0) return center;
    const Vec dir = random_direction(hull.par_basis, rng);
    double len = ray_length(poly, center, dir, cap);
    if (interior_only) len = std::min(len, 0.5 * slack);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return center + u(rng) * len * dir;
  }
};

std::optional<Sampler> make_sampler(const PolyhedronH& p) {
  auto hull = affine_hull(p);
  if (!hull) return std::nullopt;
  auto ri = relative_interior_point(p, *hull);
  if (!ri) return std::nullopt;
  return Sampler{p, *hull, ri->point, ri->slack};
}

}  // namespace

PLQFunction::PLQFunction(int m, std::vector<Hyperplane> hyperplanes, std::vector<Piece> pieces)
    : m_(m), hyperplanes_(std::move(hyperplanes)), pieces_(std::move(pieces)) {
  if (m_ < 1) throw ArgumentError(kModule, "dimension m must be positive");
  if (pieces_.empty()) throw ArgumentError(kModule, "at least one piece is required");
  const auto s = hyperplanes_.size();
  for (size_t j = 0; j < s; ++j) {
    const Hyperplane& hp = hyperplanes_[j];
    if (hp.a.size() != m_)
      throw ArgumentError(kModule, shape_msg("hyperplane " + std::to_string(j) + " normal", hp.a.size(), m_));
    if (!(hp.a.norm() > 0.0)) throw ArgumentError(kModule, "hyperplane " + std::to_string(j) + " has zero normal");
  }
  for (size_t k = 0; k < pieces_.size(); ++k) {
    Piece& pc = pieces_[k];
    const std::string tag = "piece " + std::to_string(k);
    if (pc.signs.size() != s)
      throw ArgumentError(kModule, shape_msg(tag + " signs", static_cast<long>(pc.signs.size()), static_cast<long>(s)));
    for (int w : pc.signs)
      if (w != 1 && w != -1) throw ArgumentError(kModule, tag + " has a sign other than +-1");
    if (pc.Q.size() == 0) pc.Q = Mat::Zero(m_, m_);
    if (pc.b.size() == 0) pc.b = Vec::Zero(m_);
    if (pc.Q.rows() != m_ || pc.Q.cols() != m_) throw ArgumentError(kModule, tag + " Q must be m x m");
    if (pc.b.size() != m_) throw ArgumentError(kModule, shape_msg(tag + " b", pc.b.size(), m_));
  }
}

double PLQFunction::piece_value(int k, const Vec& c) const {
  const Piece& pc = piece(k);
  return 0.5 * c.dot(pc.Q * c) + pc.b.dot(c) + pc.beta;
}

Vec PLQFunction::piece_gradient(int k, const Vec& c) const {
  const Piece& pc = piece(k);
  return pc.Q * c + pc.b;
}

Vec PLQFunction::oriented_normal(int k, int j) const {
  return static_cast<double>(piece(k).signs.at(static_cast<size_t>(j))) * hyperplanes_.at(static_cast<size_t>(j)).a;
}

bool PLQFunction::piece_contains(int k, const Vec& c) const {
  const Piece& pc = piece(k);
  for (size_t j = 0; j < hyperplanes_.size(); ++j) {
    const Hyperplane& hp = hyperplanes_[j];
    if (pc.signs[j] * (hp.a.dot(c) - hp.alpha) > active_tolerance(hp.alpha)) return false;
  }
  return true;
}

PolyhedronH PLQFunction::piece_polyhedron(int k) const {
  PolyhedronH p = PolyhedronH::whole_space(m_);
  const Piece& pc = piece(k);
  const auto s = static_cast<Eigen::Index>(hyperplanes_.size());
  p.F.resize(s, m_);
  p.f.resize(s);
  for (Eigen::Index j = 0; j < s; ++j) {
    const auto& hp = hyperplanes_[static_cast<size_t>(j)];
    const double w = pc.signs[static_cast<size_t>(j)];
    p.F.row(j) = w * hp.a.transpose();
    p.f(j) = w * hp.alpha;
  }
  return p;
}

std::vector<int> PLQFunction::active_hyperplanes(const Vec& c) const {
  std::vector<int> out;
  for (size_t j = 0; j < hyperplanes_.size(); ++j) {
    const Hyperplane& hp = hyperplanes_[j];
    if (std::abs(hp.a.dot(c) - hp.alpha) <= active_tolerance(hp.alpha)) out.push_back(static_cast<int>(j));
  }
  return out;
}

ActiveProfile eval_with_active(const PLQFunction& h, const Vec& c) {
  if (c.size() != h.m()) throw ArgumentError(kModule, shape_msg("point", c.size(), h.m()));
  ActiveProfile prof;
  for (int k = 0; k < h.num_pieces(); ++k)
    if (h.piece_contains(k, c)) prof.active_pieces.push_back(k);
  prof.kbar = static_cast<int>(prof.active_pieces.size());
  if (prof.active_pieces.empty()) {
    prof.value = ExtReal::infinity();
    prof.ell = 0;
    return prof;
  }
  const std::vector<int> act = h.active_hyperplanes(c);
  for (int k : prof.active_pieces) prof.active_hyperplanes[k] = act;
  prof.ell = static_cast<int>(act.size());

  const double v0 = h.piece_value(prof.active_pieces.front(), c);
  for (int k : prof.active_pieces) {
    const double v = h.piece_value(k, c);
    if (std::abs(v - v0) > 1e-8 * (1.0 + std::abs(v0))) {
      std::ostringstream os;
      os.precision(17);
      os << "pieces " << prof.active_pieces.front() << " and " << k << " disagree at an active point (" << v0
         << " vs " << v << ")";
      throw RepresentationError(kModule, os.str());
    }
  }
  prof.value = v0;
  return prof;
}

ExtReal evaluate(const PLQFunction& h, const Vec& c) { return eval_with_active(h, c).value; }

ValidationReport validate_representation(const PLQFunction& h, const ValidationOptions& opts) {
  if (opts.probes < 1) throw ArgumentError(kModule, "probes must be at least 1");
  ValidationReport rep;
  std::mt19937_64 rng(opts.seed);
  const int K = h.num_pieces();
  const int m = h.m();
  auto fail = [&](const std::string& msg) {
    rep.failures.push_back(msg);
    rep.all_pass = false;
  };

  // Per piece: feasibility, dimension, symmetry, curvature on par C_k.
  std::vector<std::optional<Sampler>> samplers(static_cast<size_t>(K));
  bool any_full = false;
  for (int k = 0; k < K; ++k) {
    const std::string tag = "piece " + std::to_string(k);
    samplers[static_cast<size_t>(k)] = make_sampler(h.piece_polyhedron(k));
    const auto& smp = samplers[static_cast<size_t>(k)];
    rep.piece_feasible.push_back(smp.has_value());
    const bool full = smp && smp->hull.dim() == m && smp->slack > 1e-9;
    rep.piece_full_dimensional.push_back(full);
    any_full = any_full || full;
    if (!smp) fail(tag + ": empty polyhedron");

    const Mat& Q = h.piece(k).Q;
    const double asym = (Q - Q.transpose()).cwiseAbs().maxCoeff();
    const bool sym = asym <= 1e-14 * (1.0 + Q.cwiseAbs().maxCoeff());
    rep.piece_symmetric.push_back(sym);
    if (!sym) fail(tag + ": Q is not symmetric");

    double curv = 0.0;
    if (smp && smp->hull.dim() > 0) {
      const Mat& B = smp->hull.par_basis;
      curv = linalg::min_sym_eigenvalue(B.transpose() * Q * B);
    }
    rep.piece_min_curvature.push_back(curv);
    if (curv < -1e-10) fail(tag + ": Q is not positive semidefinite on the parallel subspace");
  }
  rep.domain_full_dimensional = any_full;
  if (!any_full) fail("dom h has empty interior: certificate chain unsupported");

  std::vector<int> live;
  for (int k = 0; k < K; ++k)
    if (samplers[static_cast<size_t>(k)]) live.push_back(k);
  if (live.empty()) return rep;

  // Interior disjointness.
  const int per_piece = std::max(1, opts.probes / K);
  for (int k : live) {
    const Sampler& smp = *samplers[static_cast<size_t>(k)];
    if (!rep.piece_full_dimensional[static_cast<size_t>(k)]) continue;
    for (int t = 0; t < per_piece; ++t) {
      const Vec c = smp.draw(rng, 5.0, true);
      for (int k2 : live) {
        if (k2 == k) continue;
        const PolyhedronH p2 = h.piece_polyhedron(k2);
        bool strictly_inside = true;
        for (Eigen::Index j = 0; j < p2.F.rows(); ++j) {
          if ((p2.F.row(j).dot(c) - p2.f(j)) / p2.F.row(j).norm() >= -1e-9) {
            strictly_inside = false;
            break;
          }
        }
        if (strictly_inside) {
          ++rep.interior_overlaps;
          fail("pieces " + std::to_string(k) + " and " + std::to_string(k2) + " overlap in their interiors");
        }
      }
    }
  }
  if (opts.strict) {
    for (size_t a = 0; a < live.size(); ++a) {
      for (size_t b = a + 1; b < live.size(); ++b) {
        const PolyhedronH p = h.piece_polyhedron(live[a]).intersect(h.piece_polyhedron(live[b]));
        // maximize t with F c + t |F_i| <= f, t <= 1
        const Eigen::Index r = p.F.rows();
        Mat in = Mat::Zero(r + 1, m + 1);
        Vec inb(r + 1);
        for (Eigen::Index i = 0; i < r; ++i) {
          in.row(i).head(m) = p.F.row(i);
          in(i, m) = p.F.row(i).norm();
          inb(i) = p.f(i);
        }
        in(r, m) = 1.0;
        inb(r) = 1.0;
        Vec cost = Vec::Zero(m + 1);
        cost(m) = -1.0;
        const lp::Result res = lp::solve(lp::LinearProgram{Mat(0, m + 1), Vec(0), in, inb, cost});
        if (res.status == lp::Status::Optimal && res.x(m) > 1e-7) {
          ++rep.interior_overlaps;
          fail("pieces " + std::to_string(live[a]) + " and " + std::to_string(live[b]) +
               " overlap in their interiors (exact test)");
        }
      }
    }
  }

  // Continuity on pairwise intersections, plus the range condition at manifold candidates.
  std::vector<std::pair<int, int>> pairs;
  for (size_t a = 0; a < live.size(); ++a)
    for (size_t b = a + 1; b < live.size(); ++b) pairs.emplace_back(live[a], live[b]);
  const int per_pair = pairs.empty() ? 0 : std::max(4, opts.probes / static_cast<int>(pairs.size()));
  for (const auto& [k1, k2] : pairs) {
    auto smp = make_sampler(h.piece_polyhedron(k1).intersect(h.piece_polyhedron(k2)));
    if (!smp) continue;
    for (int t = 0; t <= per_pair; ++t) {
      const Vec c = t == 0 ? smp->center : smp->draw(rng, 5.0, false);
      const double v1 = h.piece_value(k1, c);
      const double v2 = h.piece_value(k2, c);
      const double gap = std::abs(v1 - v2) / (1.0 + std::abs(v1));
      ++rep.continuity_probes;
      rep.max_continuity_residual = std::max(rep.max_continuity_residual, gap);
      if (gap > 1e-8) ++rep.continuity_failures;
    }

    const Vec& c = smp->center;
    std::vector<int> act_pieces;
    for (int k = 0; k < K; ++k)
      if (h.piece_contains(k, c)) act_pieces.push_back(k);
    if (act_pieces.size() < 2) continue;
    const std::vector<int> act = h.active_hyperplanes(c);
    Mat A(m, static_cast<Eigen::Index>(act.size()));
    for (size_t i = 0; i < act.size(); ++i)
      A.col(static_cast<Eigen::Index>(i)) = h.hyperplanes()[static_cast<size_t>(act[i])].a;
    const Mat ranA = act.empty() ? Mat(m, 0) : linalg::range_basis(A);
    const Mat nullAt = act.empty() ? Mat(Mat::Identity(m, m)) : linalg::null_space(A.transpose());
    for (size_t a = 0; a < act_pieces.size(); ++a) {
      for (size_t b = a + 1; b < act_pieces.size(); ++b) {
        const Mat D = h.piece(act_pieces[a]).Q - h.piece(act_pieces[b]).Q;
        const double scale = 1.0 + std::max(h.piece(act_pieces[a]).Q.norm(), h.piece(act_pieces[b]).Q.norm());
        for (Eigen::Index i = 0; i < nullAt.cols(); ++i) {
          const double d = linalg::dist_to_range(ranA, D * nullAt.col(i));
          ++rep.qq_in_range_checks;
          rep.max_qq_in_range_residual = std::max(rep.max_qq_in_range_residual, d);
          if (d > 1e-9 * scale) ++rep.qq_in_range_failures;
        }
      }
    }
  }
  if (rep.continuity_failures > 0)
    fail(std::to_string(rep.continuity_failures) + " continuity probe(s) failed on shared boundaries");
  if (rep.qq_in_range_failures > 0)
    fail(std::to_string(rep.qq_in_range_failures) + " range-condition check(s) failed at manifold candidates");

  // Midpoint-type convexity on random segments of dom h.
  std::uniform_int_distribution<size_t> pick(0, live.size() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int t = 0; t < opts.probes; ++t) {
    const Vec c1 = samplers[static_cast<size_t>(live[pick(rng)])]->draw(rng, 5.0, false);
    const Vec c2 = samplers[static_cast<size_t>(live[pick(rng)])]->draw(rng, 5.0, false);
    const double s = unit(rng);
    ++rep.convexity_probes;
    try {
      const ExtReal f1 = evaluate(h, c1);
      const ExtReal f2 = evaluate(h, c2);
      const ExtReal fm = evaluate(h, s * c1 + (1.0 - s) * c2);
      if (!f1.finite() || !f2.finite()) continue;
      const double rhs = s * f1.value() + (1.0 - s) * f2.value();
      if (!fm.finite() || fm.value() > rhs + 1e-8 * (1.0 + std::abs(rhs))) ++rep.convexity_violations;
    } catch (const RepresentationError&) {
      // already reported by the continuity probes
    }
  }
  if (rep.convexity_violations > 0)
    fail(std::to_string(rep.convexity_violations) + " convexity probe(s) failed");
  return rep;
}

}  // namespace plqn
