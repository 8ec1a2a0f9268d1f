#include "plqn/simplex.hpp"

#include <cmath>
#include <vector>

namespace plqn::lp {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-10;
constexpr double kPhaseOneTol = 1e-9;
constexpr int kMaxPivots = 200000;

class Tableau {
 public:
  Tableau(const Mat& a, const Vec& b, int num_structural)
      : rows_(static_cast<int>(a.rows())),
        structural_(num_structural),
        cols_(num_structural + rows_),
        t_(Mat::Zero(rows_, cols_ + 1)),
        z_(Vec::Zero(cols_ + 1)),
        basis_(rows_),
        active_(rows_, true) {
    t_.leftCols(structural_) = a;
    t_.col(cols_) = b;
    for (int r = 0; r < rows_; ++r) {
      t_(r, structural_ + r) = 1.0;
      basis_[r] = structural_ + r;
    }
  }

  // Phase I: minimize the sum of artificials. Returns the optimal sum.
  double phase_one() {
    z_.setZero();
    for (int r = 0; r < rows_; ++r) {
      z_.head(structural_) -= t_.row(r).head(structural_).transpose();
      z_(cols_) -= t_(r, cols_);
    }
    iterate(cols_);
    return -z_(cols_);
  }

  void drive_out_artificials() {
    for (int r = 0; r < rows_; ++r) {
      if (!active_[r] || basis_[r] < structural_) continue;
      int pivot_col = -1;
      for (int j = 0; j < structural_; ++j) {
        if (std::abs(t_(r, j)) > 1e-9) {
          pivot_col = j;
          break;
        }
      }
      if (pivot_col < 0) {
        active_[r] = false;  // redundant equality
      } else {
        pivot(r, pivot_col);
      }
    }
  }

  // Phase II over structural columns only. Returns false when unbounded.
  bool phase_two(const Vec& cost) {
    z_.setZero();
    z_.head(structural_) = cost;
    for (int r = 0; r < rows_; ++r) {
      if (!active_[r]) continue;
      const int bj = basis_[r];
      const double cb = bj < structural_ ? cost(bj) : 0.0;
      if (cb == 0.0) continue;
      z_.head(structural_) -= cb * t_.row(r).head(structural_).transpose();
      z_(cols_) -= cb * t_(r, cols_);
    }
    return iterate(structural_);
  }

  Vec solution() const {
    Vec x = Vec::Zero(structural_);
    for (int r = 0; r < rows_; ++r)
      if (active_[r] && basis_[r] < structural_) x(basis_[r]) = t_(r, cols_);
    return x;
  }

 private:
  // Bland's rule over columns [0, allowed). Returns false on unboundedness.
  bool iterate(int allowed) {
    for (int it = 0; it < kMaxPivots; ++it) {
      int enter = -1;
      for (int j = 0; j < allowed; ++j) {
        if (z_(j) < -kCostTol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      double best = 0.0;
      for (int r = 0; r < rows_; ++r) {
        if (!active_[r]) continue;
        const double coef = t_(r, enter);
        if (coef <= kPivotTol) continue;
        const double ratio = t_(r, cols_) / coef;
        if (leave < 0 || ratio < best - 1e-14 ||
            (std::abs(ratio - best) <= 1e-14 && basis_[r] < basis_[leave])) {
          leave = r;
          best = ratio;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
    throw std::runtime_error("simplex: pivot limit exceeded");
  }

  void pivot(int r, int j) {
    t_.row(r) /= t_(r, j);
    for (int i = 0; i < rows_; ++i) {
      if (i == r || !active_[i]) continue;
      const double f = t_(i, j);
      if (f != 0.0) t_.row(i) -= f * t_.row(r);
    }
    const double fz = z_(j);
    if (fz != 0.0) z_ -= fz * t_.row(r).transpose();
    basis_[r] = j;
  }

  int rows_;
  int structural_;
  int cols_;
  Mat t_;
  Vec z_;
  std::vector<int> basis_;
  std::vector<bool> active_;
};

}  // namespace

Result solve(const LinearProgram& p) {
  const Eigen::Index n = p.cost.size();
  const Eigen::Index me = p.eq_A.rows();
  const Eigen::Index mi = p.in_A.rows();
  if ((me > 0 && p.eq_A.cols() != n) || (mi > 0 && p.in_A.cols() != n) || p.eq_b.size() != me ||
      p.in_b.size() != mi)
    throw std::invalid_argument("simplex: inconsistent dimensions");

  const Eigen::Index rows = me + mi;
  const Eigen::Index structural = 2 * n + mi;
  Result res;
  if (rows == 0) {
    // Unconstrained: optimal only for a zero cost.
    res.x = Vec::Zero(n);
    res.status = p.cost.cwiseAbs().maxCoeff() > 0.0 ? Status::Unbounded : Status::Optimal;
    if (n == 0) res.status = Status::Optimal;
    return res;
  }

  Mat a = Mat::Zero(rows, structural);
  Vec b(rows);
  for (Eigen::Index i = 0; i < me; ++i) {
    a.row(i).head(n) = p.eq_A.row(i);
    a.row(i).segment(n, n) = -p.eq_A.row(i);
    b(i) = p.eq_b(i);
  }
  for (Eigen::Index i = 0; i < mi; ++i) {
    a.row(me + i).head(n) = p.in_A.row(i);
    a.row(me + i).segment(n, n) = -p.in_A.row(i);
    a(me + i, 2 * n + i) = 1.0;
    b(me + i) = p.in_b(i);
  }
  for (Eigen::Index i = 0; i < rows; ++i) {
    double scale = std::max(a.row(i).cwiseAbs().maxCoeff(), std::abs(b(i)));
    if (scale == 0.0) scale = 1.0;
    if (b(i) < 0) scale = -scale;
    a.row(i) /= scale;
    b(i) /= scale;
  }

  Tableau tab(a, b, static_cast<int>(structural));
  if (tab.phase_one() > kPhaseOneTol) {
    res.status = Status::Infeasible;
    return res;
  }
  tab.drive_out_artificials();

  Vec cost = Vec::Zero(structural);
  cost.head(n) = p.cost;
  cost.segment(n, n) = -p.cost;
  const bool bounded = tab.phase_two(cost);
  const Vec z = tab.solution();
  res.x = z.head(n) - z.segment(n, n);
  res.objective = p.cost.dot(res.x);
  res.status = bounded ? Status::Optimal : Status::Unbounded;
  return res;
}

bool feasible(const Mat& eq_A, const Vec& eq_b, const Mat& in_A, const Vec& in_b, Vec* point) {
  LinearProgram p;
  const Eigen::Index n = eq_A.rows() > 0 ? eq_A.cols() : in_A.cols();
  p.eq_A = eq_A.rows() > 0 ? eq_A : Mat(0, n);
  p.eq_b = eq_b;
  p.in_A = in_A.rows() > 0 ? in_A : Mat(0, n);
  p.in_b = in_b;
  p.cost = Vec::Zero(n);
  const Result r = solve(p);
  if (r.status == Status::Infeasible) return false;
  if (point) *point = r.x;
  return true;
}

}  // namespace plqn::lp
