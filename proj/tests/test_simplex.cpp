#include <doctest.h>

#include "powerone/simplex.hpp"

using namespace powerone;

namespace {

LinearProgram make_lp(int nvars) {
  LinearProgram lp;
  lp.c = Eigen::VectorXd::Zero(nvars);
  lp.a_ub = Eigen::MatrixXd::Zero(0, nvars);
  lp.b_ub = Eigen::VectorXd::Zero(0);
  lp.a_eq = Eigen::MatrixXd::Zero(0, nvars);
  lp.b_eq = Eigen::VectorXd::Zero(0);
  return lp;
}

}  // namespace

TEST_CASE("simplex solves a box problem") {
  // min -x - 2y  s.t. x + y <= 1, y <= 0.6
  LinearProgram lp = make_lp(2);
  lp.c << -1.0, -2.0;
  lp.a_ub = Eigen::MatrixXd(2, 2);
  lp.a_ub << 1.0, 1.0, 0.0, 1.0;
  lp.b_ub = Eigen::Vector2d(1.0, 0.6);
  const LpSolution sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::kOptimal);
  CHECK(sol.objective == doctest::Approx(-1.6).epsilon(1e-10));
  CHECK(sol.x(0) == doctest::Approx(0.4));
  CHECK(sol.x(1) == doctest::Approx(0.6));
}

TEST_CASE("simplex handles equalities via phase one") {
  // min x + y  s.t. x + 2y = 1
  LinearProgram lp = make_lp(2);
  lp.c << 1.0, 1.0;
  lp.a_eq = Eigen::MatrixXd(1, 2);
  lp.a_eq << 1.0, 2.0;
  lp.b_eq = Eigen::VectorXd::Ones(1);
  const LpSolution sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::kOptimal);
  CHECK(sol.objective == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(sol.x(1) == doctest::Approx(0.5));
}

TEST_CASE("simplex detects infeasibility") {
  // x <= -1 with x >= 0
  LinearProgram lp = make_lp(1);
  lp.c << 1.0;
  lp.a_ub = Eigen::MatrixXd(1, 1);
  lp.a_ub << 1.0;
  lp.b_ub = Eigen::VectorXd::Constant(1, -1.0);
  CHECK(solve_lp(lp).status == LpStatus::kInfeasible);

  // sum = 2 with coordinates capped at 0.5
  LinearProgram lp2 = make_lp(2);
  lp2.c << 0.0, 0.0;
  lp2.a_eq = Eigen::MatrixXd(1, 2);
  lp2.a_eq << 1.0, 1.0;
  lp2.b_eq = Eigen::VectorXd::Constant(1, 2.0);
  lp2.a_ub = Eigen::MatrixXd::Identity(2, 2);
  lp2.b_ub = Eigen::Vector2d(0.5, 0.5);
  CHECK(solve_lp(lp2).status == LpStatus::kInfeasible);
}

TEST_CASE("simplex detects unbounded problems") {
  LinearProgram lp = make_lp(2);
  lp.c << -1.0, 0.0;
  lp.a_ub = Eigen::MatrixXd(1, 2);
  lp.a_ub << 0.0, 1.0;
  lp.b_ub = Eigen::VectorXd::Ones(1);
  CHECK(solve_lp(lp).status == LpStatus::kUnbounded);
}

TEST_CASE("simplex solves a small transport problem") {
  // marginals (0.7, 0.3) -> (0.2, 0.8), cost |i - j|
  // vars pi00 pi01 pi10 pi11
  LinearProgram lp = make_lp(4);
  lp.c << 0.0, 1.0, 1.0, 0.0;
  lp.a_eq = Eigen::MatrixXd(4, 4);
  lp.a_eq << 1, 1, 0, 0,
             0, 0, 1, 1,
             1, 0, 1, 0,
             0, 1, 0, 1;
  lp.b_eq = Eigen::VectorXd(4);
  lp.b_eq << 0.7, 0.3, 0.2, 0.8;
  const LpSolution sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::kOptimal);
  CHECK(sol.objective == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("simplex copes with redundant and degenerate rows") {
  // duplicated equality plus a redundant inequality
  LinearProgram lp = make_lp(2);
  lp.c << 2.0, 1.0;
  lp.a_eq = Eigen::MatrixXd(2, 2);
  lp.a_eq << 1.0, 1.0, 1.0, 1.0;
  lp.b_eq = Eigen::Vector2d(1.0, 1.0);
  lp.a_ub = Eigen::MatrixXd(1, 2);
  lp.a_ub << 1.0, 0.0;
  lp.b_ub = Eigen::VectorXd::Ones(1);
  const LpSolution sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::kOptimal);
  CHECK(sol.objective == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(sol.x(1) == doctest::Approx(1.0));
}

TEST_CASE("simplex with negative right-hand sides") {
  // min x st -x <= -0.4  (i.e. x >= 0.4)
  LinearProgram lp = make_lp(1);
  lp.c << 1.0;
  lp.a_ub = Eigen::MatrixXd(1, 1);
  lp.a_ub << -1.0;
  lp.b_ub = Eigen::VectorXd::Constant(1, -0.4);
  const LpSolution sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::kOptimal);
  CHECK(sol.x(0) == doctest::Approx(0.4).epsilon(1e-10));
}
