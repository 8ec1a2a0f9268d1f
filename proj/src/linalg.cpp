#include "plqn/linalg.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace plqn {

std::string ExtReal::str() const {
  if (infinite_) return "+inf";
  std::ostringstream os;
  os.precision(17);
  os << value_;
  return os.str();
}

namespace linalg {

namespace {

int rank_from_singular(const Vec& sv) {
  if (sv.size() == 0) return 0;
  const double smax = sv.maxCoeff();
  if (smax <= 0.0) return 0;
  const double tol = kRankRelTol * smax;
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++r;
  return r;
}

}  // namespace

int rank(const Mat& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(m);
  return rank_from_singular(svd.singularValues());
}

Mat null_space(const Mat& m) {
  const Eigen::Index n = m.cols();
  if (m.rows() == 0) return Mat::Identity(n, n);
  if (n == 0) return Mat(0, 0);
  // Pad to square so that the full V is available regardless of shape.
  Mat padded = m;
  if (m.rows() < n) {
    padded = Mat::Zero(n, n);
    padded.topRows(m.rows()) = m;
  }
  Eigen::JacobiSVD<Mat> svd(padded, Eigen::ComputeFullV);
  const int r = rank_from_singular(svd.singularValues());
  return svd.matrixV().rightCols(n - r);
}

Mat range_basis(const Mat& m) {
  if (m.rows() == 0) return Mat(0, 0);
  if (m.cols() == 0) return Mat(m.rows(), 0);
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullU);
  const int r = rank_from_singular(svd.singularValues());
  return svd.matrixU().leftCols(r);
}

double dist_to_range(const Mat& basis, const Vec& v) {
  if (basis.cols() == 0) return v.norm();
  return (v - basis * (basis.transpose() * v)).norm();
}

Mat vstack(const Mat& top, const Mat& bottom) {
  const Eigen::Index cols = top.rows() > 0 ? top.cols() : bottom.cols();
  Mat out(top.rows() + bottom.rows(), cols);
  if (top.rows() > 0) out.topRows(top.rows()) = top;
  if (bottom.rows() > 0) out.bottomRows(bottom.rows()) = bottom;
  return out;
}

Vec vstack(const Vec& top, const Vec& bottom) {
  Vec out(top.size() + bottom.size());
  out << top, bottom;
  return out;
}

Mat hstack(const Mat& left, const Mat& right) {
  const Eigen::Index rows = left.cols() > 0 ? left.rows() : right.rows();
  Mat out(rows, left.cols() + right.cols());
  if (left.cols() > 0) out.leftCols(left.cols()) = left;
  if (right.cols() > 0) out.rightCols(right.cols()) = right;
  return out;
}

double min_sym_eigenvalue(const Mat& m) {
  if (m.rows() == 0) return std::numeric_limits<double>::infinity();
  const Mat s = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(s, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace linalg
}  // namespace plqn
