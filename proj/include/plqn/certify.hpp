#ifndef PLQN_CERTIFY_HPP
#define PLQN_CERTIFY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "plqn/composite.hpp"
#include "plqn/manifold.hpp"

namespace plqn {

/// Reduced Hessians must have eigenvalues above this.
inline constexpr double kPdTol = 1e-8;

struct SOSCReport {
  enum class Mode { CertifiedSubspace, Smooth, HeuristicSampled };
  Mode mode = Mode::Smooth;
  Mat Z;                        // subspace basis (certified and smooth modes)
  std::vector<double> min_eigs; // per active piece; sampled minimum in heuristic mode
  bool pass = false;
  int samples = 0;
  std::string note;
};

std::string to_string(SOSCReport::Mode m);

/// Second-order sufficiency at (xbar, ybar). Throws PreconditionError when the
/// KKT residual is not small.
SOSCReport certify_sosc(const CompositeProblem& p, const Vec& xbar, const Vec& ybar, std::uint64_t seed = 42);

struct SubregularityCertificate {
  bool bcq = false;
  bool m_singleton = false;
  Vec ybar;
  SOSCReport sosc;
  bool sms = false;  // strongly metrically subregular
  std::vector<std::string> reasons;
};

SubregularityCertificate certify_subregularity(const CompositeProblem& p, const Vec& xbar, std::uint64_t seed = 42);

struct KKTMatrix {
  Mat matrix;
  bool nonsingular = false;
};

KKTMatrix restricted_kkt_matrix(const CompositeProblem& p, const ManifoldData& md, const Vec& x, const Vec& y, int j);
/// Same assembly from raw blocks.
KKTMatrix restricted_kkt_matrix(const Mat& H, const Mat& jac, const Mat& Q, const Mat& A, const Mat& AP);

struct IsolationCheck {
  bool isolated = false;       // every critical pair within the radius equals (xbar, ybar)
  int within_radius = 0;
  bool segment_found = false;  // some structure within the radius has a solution segment
  int candidates = 0;
};

/// Piece-enumeration spot check that (xbar, ybar) is an isolated solution of the
/// linearized generalized equation.
IsolationCheck isolated_solution_check(const CompositeProblem& p, const Vec& xbar, const Vec& ybar,
                                       double radius = 0.1);

}  // namespace plqn

#endif  // PLQN_CERTIFY_HPP
