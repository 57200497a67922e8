#include "cmaml/oracle/simplex.hpp"

#include <Eigen/LU>
#include <cmath>
#include <vector>

#include "cmaml/errors.hpp"

namespace cmaml::oracle {

namespace {

constexpr double kRcTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr double kRatioTieTol = 1e-9;
constexpr double kFeasTol = 1e-7;
constexpr int kRefactorInterval = 40;
constexpr int kStallLimit = 200;  // pivots without progress -> Bland's rule
constexpr int kMaxPivots = 200000;

// Dense tableau simplex over the extended matrix [A | I]. The tableau is
// periodically rebuilt from the pristine data to shed round-off accumulated
// by Gauss-Jordan pivots; entering uses Dantzig pricing with a Bland
// fallback against stalling, leaving breaks ratio ties on pivot magnitude.
class Tableau {
 public:
  Tableau(const Mat& a_ext, const Vec& b, std::vector<int>* basis)
      : a_ext_(a_ext), b_(b), basis_(basis) {
    refactor();
  }

  void refactor() {
    const int m = static_cast<int>(a_ext_.rows());
    Mat basis_mat(m, m);
    for (int i = 0; i < m; ++i) basis_mat.col(i) = a_ext_.col((*basis_)[i]);
    const Eigen::PartialPivLU<Mat> lu(basis_mat);
    tab_.resize(m, a_ext_.cols() + 1);
    tab_.leftCols(a_ext_.cols()) = lu.solve(a_ext_);
    tab_.col(a_ext_.cols()) = lu.solve(b_);
  }

  double rhs(int i) const { return tab_(i, a_ext_.cols()); }
  double entry(int i, int j) const { return tab_(i, j); }
  int rows() const { return static_cast<int>(a_ext_.rows()); }

  void pivot(int row, int col) {
    tab_.row(row) /= tab_(row, col);
    for (int i = 0; i < rows(); ++i) {
      if (i == row) continue;
      const double f = tab_(i, col);
      if (f != 0.0) tab_.row(i) -= f * tab_.row(row);
    }
    (*basis_)[row] = col;
    if (++pivots_since_refactor_ >= kRefactorInterval) {
      pivots_since_refactor_ = 0;
      refactor();
    }
  }

 private:
  const Mat& a_ext_;
  const Vec& b_;
  std::vector<int>* basis_;
  Mat tab_;
  int pivots_since_refactor_ = 0;
};

enum class IterateStatus { Optimal, Unbounded };

IterateStatus iterate(Tableau& tab, std::vector<int>& basis, const Vec& cost,
                      int n_candidates) {
  const int m = tab.rows();
  int stall = 0;
  double last_objective = std::numeric_limits<double>::infinity();
  for (int pivots = 0; pivots < kMaxPivots; ++pivots) {
    double objective = 0.0;
    for (int i = 0; i < m; ++i) objective += cost[basis[i]] * tab.rhs(i);
    if (objective < last_objective - 1e-12) {
      last_objective = objective;
      stall = 0;
    } else {
      ++stall;
    }
    const bool bland = stall > kStallLimit;

    int entering = -1;
    double best_rc = -kRcTol;
    for (int j = 0; j < n_candidates; ++j) {
      double rc = cost[j];
      for (int i = 0; i < m; ++i) rc -= cost[basis[i]] * tab.entry(i, j);
      if (rc < best_rc) {
        entering = j;
        if (bland) break;  // lowest index wins under Bland's rule
        best_rc = rc;
      }
    }
    if (entering < 0) return IterateStatus::Optimal;

    int leaving = -1;
    double best_ratio = 0.0;
    for (int i = 0; i < m; ++i) {
      const double pivot_entry = tab.entry(i, entering);
      if (pivot_entry <= kPivotTol) continue;
      const double ratio = std::max(tab.rhs(i), 0.0) / pivot_entry;
      if (leaving < 0 || ratio < best_ratio - kRatioTieTol) {
        leaving = i;
        best_ratio = ratio;
      } else if (ratio <= best_ratio + kRatioTieTol) {
        // tie: prefer the numerically safest (largest) pivot, or lowest
        // basic index when stalling
        if (bland ? basis[i] < basis[leaving]
                  : std::abs(pivot_entry) >
                        std::abs(tab.entry(leaving, entering))) {
          leaving = i;
          best_ratio = std::min(best_ratio, ratio);
        }
      }
    }
    if (leaving < 0) return IterateStatus::Unbounded;
    tab.pivot(leaving, entering);
  }
  throw NumericError("solve_lp: pivot limit exceeded");
}

}  // namespace

LpSolution solve_lp(const Mat& a, const Vec& b, const Vec& c) {
  const int m = static_cast<int>(a.rows());
  const int n = static_cast<int>(a.cols());
  if (b.size() != m || c.size() != n)
    throw ShapeError("solve_lp: dimension mismatch");
  if (b.minCoeff() < 0.0) throw ShapeError("solve_lp: requires b >= 0");

  Mat a_ext(m, n + m);
  a_ext.leftCols(n) = a;
  a_ext.rightCols(m) = Mat::Identity(m, m);
  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) basis[i] = n + i;
  Tableau tab(a_ext, b, &basis);

  // phase 1: minimize the sum of artificials
  Vec phase1 = Vec::Zero(n + m);
  phase1.tail(m).setOnes();
  if (iterate(tab, basis, phase1, n + m) != IterateStatus::Optimal)
    throw NumericError("solve_lp: phase-1 unbounded (should be impossible)");

  tab.refactor();
  double artificial_sum = 0.0;
  for (int i = 0; i < m; ++i)
    if (basis[i] >= n) artificial_sum += tab.rhs(i);
  LpSolution sol;
  if (artificial_sum > kFeasTol) {
    sol.status = LpStatus::Infeasible;
    return sol;
  }

  // drive zero-level artificials out of the basis where a real column allows;
  // rows that stay artificial are redundant and never move again
  for (int i = 0; i < m; ++i) {
    if (basis[i] < n) continue;
    for (int j = 0; j < n; ++j) {
      if (std::abs(tab.entry(i, j)) > kPivotTol) {
        tab.pivot(i, j);
        break;
      }
    }
  }

  Vec phase2 = Vec::Zero(n + m);
  phase2.head(n) = c;
  if (iterate(tab, basis, phase2, n) != IterateStatus::Optimal) {
    sol.status = LpStatus::Unbounded;
    return sol;
  }

  tab.refactor();
  sol.status = LpStatus::Optimal;
  sol.x = Vec::Zero(n);
  for (int i = 0; i < m; ++i)
    if (basis[i] < n) sol.x[basis[i]] = std::max(tab.rhs(i), 0.0);
  sol.objective = c.dot(sol.x);
  return sol;
}

}  // namespace cmaml::oracle
