#include "powerone/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "powerone/errors.hpp"
#include "powerone/simplex.hpp"

namespace powerone {

double tv_distance(const DiscreteMeasure& m, const DiscreteMeasure& n) {
  require_same_space(m, n, "tv_distance");
  return 0.5 * (m.weights() - n.weights()).lpNorm<1>();
}

double bl_distance_with_witness(const DiscreteMeasure& m,
                                const DiscreteMeasure& n, BLFunction* witness) {
  require_same_space(m, n, "bl_distance");
  const FiniteSpace& space = *m.space();
  const int sz = space.size();
  const Eigen::VectorXd diff = m.weights() - n.weights();

  // Variables g = f + 1 in [0, 2]; rows: g_x <= 2 and g_x - g_y <= d(x,y)
  // for every ordered pair. The all-slack basis is feasible, so the solve
  // is a single simplex phase.
  LinearProgram lp;
  lp.c = -diff;
  const int rows = sz + sz * (sz - 1);
  lp.a_ub = Eigen::MatrixXd::Zero(rows, sz);
  lp.b_ub = Eigen::VectorXd::Zero(rows);
  for (int x = 0; x < sz; ++x) {
    lp.a_ub(x, x) = 1.0;
    lp.b_ub(x) = 2.0;
  }
  int r = sz;
  for (int x = 0; x < sz; ++x) {
    for (int y = 0; y < sz; ++y) {
      if (x == y) continue;
      lp.a_ub(r, x) = 1.0;
      lp.a_ub(r, y) = -1.0;
      lp.b_ub(r) = space.distance(x, y);
      ++r;
    }
  }

  const LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::kOptimal)
    throw std::runtime_error("bl_distance: internal LP failure");

  const Eigen::VectorXd f = sol.x.array() - 1.0;
  if (witness) witness->values = f;
  return std::max(diff.dot(f), 0.0);
}

double bl_distance(const DiscreteMeasure& m, const DiscreteMeasure& n) {
  return bl_distance_with_witness(m, n, nullptr);
}

}  // namespace powerone
