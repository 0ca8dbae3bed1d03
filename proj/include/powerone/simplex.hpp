#pragma once

#include <Eigen/Dense>

namespace powerone {

/**
 * A small dense linear program in the form
 *
 *   min c.x   subject to   a_ub x <= b_ub,  a_eq x = b_eq,  x >= 0.
 *
 * Either constraint block may be empty (0 rows).
 */
struct LinearProgram {
  Eigen::VectorXd c;
  Eigen::MatrixXd a_ub;
  Eigen::VectorXd b_ub;
  Eigen::MatrixXd a_eq;
  Eigen::VectorXd b_eq;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  Eigen::VectorXd x;
  double objective = 0.0;
};

/**
 * Two-phase tableau simplex with Bland's anti-cycling rule. Deterministic:
 * identical inputs produce identical pivot sequences and solutions. Meant
 * for the very small programs arising here (tens of variables), not for
 * large-scale use.
 */
LpSolution solve_lp(const LinearProgram& lp);

}  // namespace powerone
