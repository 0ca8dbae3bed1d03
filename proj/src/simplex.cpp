#include "powerone/simplex.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace powerone {

namespace {

constexpr double kCostTol = 1e-9;
constexpr double kPivotTol = 1e-11;
constexpr double kFeasTol = 1e-8;

struct Tableau {
  // rows 0..m-1: constraints; row m: phase-2 costs; row m+1: phase-1 costs.
  Eigen::MatrixXd t;
  std::vector<int> basis;  // basis[i] = column basic in row i
  int m = 0;
  int ncol = 0;  // structural + slack + artificial columns

  double& rhs(int row) { return t(row, ncol); }

  void pivot(int row, int col) {
    t.row(row) /= t(row, col);
    for (int r = 0; r < t.rows(); ++r) {
      if (r == row) continue;
      const double factor = t(r, col);
      if (factor != 0.0) t.row(r) -= factor * t.row(row);
    }
    basis[static_cast<size_t>(row)] = col;
  }

  // Bland: entering column = lowest index with negative reduced cost in
  // objective row `obj`; leaving row = min ratio, ties broken by smallest
  // basis column. Returns false when optimal, throws on unbounded.
  bool step(int obj, int allowed_cols) {
    int enter = -1;
    for (int j = 0; j < allowed_cols; ++j) {
      if (t(obj, j) < -kCostTol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) return false;
    int leave = -1;
    double best_ratio = 0.0;
    for (int i = 0; i < m; ++i) {
      if (t(i, enter) > kPivotTol) {
        const double ratio = rhs(i) / t(i, enter);
        if (leave < 0 || ratio < best_ratio - 1e-15 ||
            (std::abs(ratio - best_ratio) <= 1e-15 &&
             basis[static_cast<size_t>(i)] < basis[static_cast<size_t>(leave)])) {
          leave = i;
          best_ratio = ratio;
        }
      }
    }
    if (leave < 0) throw std::runtime_error("simplex: unbounded direction");
    pivot(leave, enter);
    return true;
  }
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp) {
  const int n = static_cast<int>(lp.c.size());
  const int mu = static_cast<int>(lp.b_ub.size());
  const int me = static_cast<int>(lp.b_eq.size());
  const int m = mu + me;
  assert(lp.a_ub.rows() == mu && (mu == 0 || lp.a_ub.cols() == n));
  assert(lp.a_eq.rows() == me && (me == 0 || lp.a_eq.cols() == n));

  // Assemble rows with nonnegative right-hand sides. Slack columns get +1
  // on their own row (or -1 if the row was negated, in which case an
  // artificial carries the initial basis instead).
  Tableau tb;
  tb.m = m;
  std::vector<int> art_of_row(static_cast<size_t>(m), -1);
  int n_art = 0;
  for (int i = 0; i < m; ++i) {
    const bool is_ub = i < mu;
    const double b = is_ub ? lp.b_ub(i) : lp.b_eq(i - mu);
    const bool neg = b < 0.0;
    if (!is_ub || neg) art_of_row[static_cast<size_t>(i)] = n_art++;
  }
  tb.ncol = n + mu + n_art;
  tb.t = Eigen::MatrixXd::Zero(m + 2, tb.ncol + 1);
  tb.basis.assign(static_cast<size_t>(m), -1);

  for (int i = 0; i < m; ++i) {
    const bool is_ub = i < mu;
    Eigen::RowVectorXd row = is_ub ? Eigen::RowVectorXd(lp.a_ub.row(i))
                                   : Eigen::RowVectorXd(lp.a_eq.row(i - mu));
    double b = is_ub ? lp.b_ub(i) : lp.b_eq(i - mu);
    double slack_sign = 1.0;
    if (b < 0.0) {
      row = -row;
      b = -b;
      slack_sign = -1.0;
    }
    tb.t.block(i, 0, 1, n) = row;
    if (is_ub) tb.t(i, n + i) = slack_sign;
    const int a = art_of_row[static_cast<size_t>(i)];
    if (a >= 0) {
      tb.t(i, n + mu + a) = 1.0;
      tb.basis[static_cast<size_t>(i)] = n + mu + a;
    } else {
      tb.basis[static_cast<size_t>(i)] = n + i;
    }
    tb.rhs(i) = b;
  }

  // Phase-2 cost row: artificials cost zero, initial basis has zero cost.
  tb.t.block(m, 0, 1, n) = lp.c.transpose();
  // Phase-1 cost row: minimize the artificial total; cancel basis columns.
  for (int i = 0; i < m; ++i)
    if (art_of_row[static_cast<size_t>(i)] >= 0) tb.t.row(m + 1) -= tb.t.row(i);
  for (int a = 0; a < n_art; ++a) tb.t(m + 1, n + mu + a) = 0.0;

  const int max_pivots = 2000 + 200 * tb.ncol;
  int pivots = 0;

  LpSolution out;
  if (n_art > 0) {
    while (tb.step(m + 1, tb.ncol)) {
      if (++pivots > max_pivots)
        throw std::runtime_error("simplex: phase-1 iteration limit");
    }
    if (-tb.rhs(m + 1) > kFeasTol) {
      out.status = LpStatus::kInfeasible;
      return out;
    }
    // Drive any remaining artificials out of the basis.
    for (int i = 0; i < m; ++i) {
      if (tb.basis[static_cast<size_t>(i)] < n + mu) continue;
      int col = -1;
      for (int j = 0; j < n + mu; ++j) {
        if (std::abs(tb.t(i, j)) > kPivotTol) {
          col = j;
          break;
        }
      }
      if (col >= 0) tb.pivot(i, col);
      // otherwise the row is redundant; its artificial stays basic at zero.
    }
  }

  // Phase 2, with artificial columns frozen out of the entering choice.
  try {
    while (tb.step(m, n + mu)) {
      if (++pivots > max_pivots)
        throw std::runtime_error("simplex: phase-2 iteration limit");
    }
  } catch (const std::runtime_error& e) {
    if (std::string(e.what()).find("unbounded") != std::string::npos) {
      out.status = LpStatus::kUnbounded;
      return out;
    }
    throw;
  }

  out.status = LpStatus::kOptimal;
  out.x = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < m; ++i) {
    const int b = tb.basis[static_cast<size_t>(i)];
    if (b < n) out.x(b) = tb.rhs(i);
  }
  out.objective = lp.c.dot(out.x);
  return out;
}

}  // namespace powerone
