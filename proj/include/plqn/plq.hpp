#ifndef PLQN_PLQ_HPP
#define PLQN_PLQ_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "plqn/polyhedron.hpp"
#include "plqn/types.hpp"

namespace plqn {

/// {c : <a, c> = alpha}. The normal must be nonzero.
struct Hyperplane {
  Vec a;
  double alpha = 0.0;
};

/// One polyhedral piece C_k = {c : sign_j (<a_j, c> - alpha_j) <= 0 for all j}
/// carrying the quadratic 1/2 <c, Q c> + <b, c> + beta.
struct Piece {
  std::vector<int> signs;
  Mat Q;
  Vec b;
  double beta = 0.0;
};

/// Tolerance for |<a_j, c> - alpha_j| when deciding whether hyperplane j is active.
inline double active_tolerance(double alpha) { return 1e-9 * (1.0 + std::abs(alpha)); }

/// Piecewise linear-quadratic convex function given over a shared family of
/// hyperplanes: every piece uses every hyperplane with a +-1 orientation.
/// Immutable after construction.
class PLQFunction {
 public:
  PLQFunction(int m, std::vector<Hyperplane> hyperplanes, std::vector<Piece> pieces);

  int m() const { return m_; }
  int num_hyperplanes() const { return static_cast<int>(hyperplanes_.size()); }
  int num_pieces() const { return static_cast<int>(pieces_.size()); }
  const std::vector<Hyperplane>& hyperplanes() const { return hyperplanes_; }
  const std::vector<Piece>& pieces() const { return pieces_; }
  const Piece& piece(int k) const { return pieces_.at(static_cast<size_t>(k)); }

  /// Quadratic formula of piece k evaluated at c (ignores membership).
  double piece_value(int k, const Vec& c) const;
  /// Q_k c + b_k.
  Vec piece_gradient(int k, const Vec& c) const;
  /// Oriented normal sign_kj * a_j (gradient of constraint j of piece k).
  Vec oriented_normal(int k, int j) const;
  /// Whether c lies in C_k up to the active tolerance.
  bool piece_contains(int k, const Vec& c) const;
  /// Exact H-representation of C_k.
  PolyhedronH piece_polyhedron(int k) const;
  /// Indices j with |<a_j, c> - alpha_j| within the active tolerance.
  std::vector<int> active_hyperplanes(const Vec& c) const;

 private:
  int m_;
  std::vector<Hyperplane> hyperplanes_;
  std::vector<Piece> pieces_;
};

struct ActiveProfile {
  ExtReal value;
  std::vector<int> active_pieces;                  // K(c)
  std::map<int, std::vector<int>> active_hyperplanes;  // k -> I_k(c)
  int kbar = 0;
  int ell = 0;  // |I_k(c)| when common across K(c), else -1

  bool operator==(const ActiveProfile&) const = default;
};

/// Value and active structure of h at c. Throws RepresentationError when two
/// active pieces disagree beyond 1e-8 (1 + |value|).
ActiveProfile eval_with_active(const PLQFunction& h, const Vec& c);

/// Plain value h(c) (possibly +inf).
ExtReal evaluate(const PLQFunction& h, const Vec& c);

struct ValidationOptions {
  int probes = 200;
  std::uint64_t seed = 42;
  bool strict = false;  // exact pairwise interior-overlap LPs
};

struct ValidationReport {
  std::vector<bool> piece_feasible;
  std::vector<bool> piece_full_dimensional;
  std::vector<bool> piece_symmetric;
  std::vector<double> piece_min_curvature;  // min eigenvalue of Q_k on par C_k
  double max_continuity_residual = 0.0;
  int continuity_failures = 0;
  int continuity_probes = 0;
  int convexity_violations = 0;
  int convexity_probes = 0;
  int interior_overlaps = 0;
  int qq_in_range_checks = 0;
  int qq_in_range_failures = 0;
  double max_qq_in_range_residual = 0.0;
  bool domain_full_dimensional = true;  // false: certificate chain unsupported
  std::vector<std::string> failures;
  bool all_pass = true;
};

ValidationReport validate_representation(const PLQFunction& h, const ValidationOptions& opts = {});

}  // namespace plqn

#endif  // PLQN_PLQ_HPP
