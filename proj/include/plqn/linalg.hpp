#ifndef PLQN_LINALG_HPP
#define PLQN_LINALG_HPP

#include "plqn/types.hpp"

namespace plqn::linalg {

// Relative rank tolerance: singular values below kRankRelTol * sigma_max are zero.
inline constexpr double kRankRelTol = 1e-10;

int rank(const Mat& m);

/// Orthonormal basis (columns) of Null(m). An m with zero rows gives the identity.
Mat null_space(const Mat& m);

/// Orthonormal basis (columns) of Ran(m).
Mat range_basis(const Mat& m);

/// Distance of v to Ran(basis) where basis has orthonormal columns.
double dist_to_range(const Mat& orthonormal_basis, const Vec& v);

/// Vertical concatenation that tolerates empty blocks.
Mat vstack(const Mat& top, const Mat& bottom);
Vec vstack(const Vec& top, const Vec& bottom);
Mat hstack(const Mat& left, const Mat& right);

/// Smallest eigenvalue of the symmetric part of m (m must be square, may be 0x0).
double min_sym_eigenvalue(const Mat& m);

}  // namespace plqn::linalg

#endif  // PLQN_LINALG_HPP
