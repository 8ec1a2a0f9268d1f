#ifndef PLQN_MANIFOLD_HPP
#define PLQN_MANIFOLD_HPP

#include <string>
#include <vector>

#include "plqn/plq.hpp"

namespace plqn {

/// Entries of mu at or below this are treated as zero.
inline constexpr double kStrictTol = 1e-8;

/// Active manifold through cbar and its block data. Piece j (0-based) of the
/// manifold is h.piece(pieces[j]); the last one is the reference piece, so
/// P.back() is all ones and the columns of A carry its orientation.
struct ManifoldData {
  PLQFunction h;
  Vec cbar{};
  std::vector<int> pieces;  // K(cbar), ascending
  std::vector<int> active;  // common active hyperplanes, ascending
  int kbar = 0;
  int ell = 0;
  Mat A{};                    // m x ell
  std::vector<Vec> P{};       // diagonals of P_j, entries +-1
  bool nondegenerate = false;

  Mat blockA{};   // (kbar m) x (kbar ell), block circulant
  Mat blockQ{};   // (kbar m) x m
  Vec blockB{};   // kbar m
  Mat J{};        // (kbar m) x m
  Mat Qbar{};
  Vec bbar{};
  Mat Abar{};     // m x (kbar ell)
  std::vector<Vec> zeta{};  // basis of Null(blockA)

  Mat AP(int j) const { return A * P[static_cast<size_t>(j)].asDiagonal(); }
  Vec lambda0(const Vec& c) const { return Qbar * c + bbar; }
  const Mat& Q(int j) const { return h.piece(pieces[static_cast<size_t>(j)]).Q; }
  const Vec& b(int j) const { return h.piece(pieces[static_cast<size_t>(j)]).b; }
};

/// Throws SmoothCaseError when only one piece is active, DomainError when none.
ManifoldData build_manifold(const PLQFunction& h, const Vec& cbar);

bool manifold_contains(const ManifoldData& md, const Vec& c);

struct MuVector {
  std::vector<Vec> blocks;

  Vec stacked() const;
  double min_entry() const;
};

/// Unique block multipliers of y at c. Throws PreconditionError for a degenerate
/// A and MembershipError when y is not a subgradient at c.
MuVector mu_of(const ManifoldData& md, const Vec& c, const Vec& y);

struct Strictness {
  bool ri_member = false;
  bool k_strict = false;
};

Strictness strictness_check(const ManifoldData& md, const Vec& c, const Vec& y);

struct PartialSmoothnessCertificate {
  bool certified = false;
  bool nondegenerate = false;
  bool k_strict = false;
  bool ri_member = false;
  bool parallel_identity = false;   // par(U(c)) = Null(blockA), via the zeta LPs
  bool par_matches_range = false;   // par(subdiff) = Ran(A), via ranks
  double min_mu = 0.0;
  std::vector<double> zeta_margins;
  std::vector<std::string> reasons;
};

PartialSmoothnessCertificate certify_partial_smoothness(const ManifoldData& md, const Vec& c, const Vec& y);

}  // namespace plqn

#endif  // PLQN_MANIFOLD_HPP
