#include "powerone/null_class.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "powerone/errors.hpp"
#include "powerone/metrics.hpp"
#include "powerone/simplex.hpp"

namespace powerone {

const char* metric_kind_name(MetricKind kind) {
  return kind == MetricKind::kTv ? "tv" : "bl";
}

Ball::Ball(DiscreteMeasure center_, double radius_, MetricKind metric_,
           bool closed_)
    : center(std::move(center_)), radius(radius_), metric(metric_),
      closed(closed_) {
  if (!(radius > 0.0)) throw UsageError("ball radius must be positive");
}

double Ball::distance_to(const DiscreteMeasure& r) const {
  return metric == MetricKind::kTv ? tv_distance(center, r)
                                   : bl_distance(center, r);
}

bool Ball::contains(const DiscreteMeasure& r) const {
  const double d = distance_to(r);
  return closed ? d <= radius : d < radius;
}

bool Ball::contains(const RunningCounts& counts) const {
  if (metric == MetricKind::kTv) {
    const double d = counts.tv_to(center);
    return closed ? d <= radius : d < radius;
  }
  return contains(counts.measure());
}

NullClass::NullClass(std::vector<DiscreteMeasure> generators, bool hull)
    : generators_(std::move(generators)), hull_(hull) {
  if (generators_.empty()) throw UsageError("null class needs generators");
  for (size_t i = 1; i < generators_.size(); ++i)
    require_same_space(generators_[0], generators_[i], "NullClass");
}

DiscreteMeasure NullClass::mixture(const Eigen::VectorXd& weights) const {
  if (weights.size() != count())
    throw UsageError("mixture weights must match the generator count");
  Eigen::VectorXd w = Eigen::VectorXd::Zero(space()->size());
  for (int k = 0; k < count(); ++k)
    w += weights(k) * generators_[static_cast<size_t>(k)].weights();
  return DiscreteMeasure(space(), std::move(w));
}

std::vector<int> NullClass::union_support() const {
  std::vector<int> out;
  for (int x = 0; x < space()->size(); ++x) {
    for (const auto& g : generators_) {
      if (g(x) > 0.0) {
        out.push_back(x);
        break;
      }
    }
  }
  return out;
}

bool NullClass::contains(const DiscreteMeasure& r, double tol) const {
  if (!hull_) {
    for (const auto& g : generators_)
      if (tv_distance(g, r) <= tol) return true;
    return false;
  }
  return distance_to_class(r, *this, MetricKind::kTv) <= tol;
}

namespace {

double hull_distance_tv(const DiscreteMeasure& q, const NullClass& nc,
                        Eigen::VectorXd* arg_weights) {
  const int m = q.size();
  const int g = nc.count();
  // variables: [w_1..w_g, t_1..t_m]; minimize (1/2) sum t
  LinearProgram lp;
  lp.c = Eigen::VectorXd::Zero(g + m);
  lp.c.tail(m).setConstant(0.5);
  lp.a_ub = Eigen::MatrixXd::Zero(2 * m, g + m);
  lp.b_ub = Eigen::VectorXd::Zero(2 * m);
  for (int x = 0; x < m; ++x) {
    for (int k = 0; k < g; ++k) {
      lp.a_ub(2 * x, k) = nc.generators()[static_cast<size_t>(k)](x);
      lp.a_ub(2 * x + 1, k) = -nc.generators()[static_cast<size_t>(k)](x);
    }
    lp.a_ub(2 * x, g + x) = -1.0;
    lp.a_ub(2 * x + 1, g + x) = -1.0;
    lp.b_ub(2 * x) = q(x);
    lp.b_ub(2 * x + 1) = -q(x);
  }
  lp.a_eq = Eigen::MatrixXd::Zero(1, g + m);
  lp.a_eq.row(0).head(g).setOnes();
  lp.b_eq = Eigen::VectorXd::Ones(1);
  const LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::kOptimal)
    throw std::runtime_error("hull tv distance: internal LP failure");
  if (arg_weights) *arg_weights = sol.x.head(g);
  return std::max(sol.objective, 0.0);
}

double hull_distance_bl(const DiscreteMeasure& q, const NullClass& nc,
                        Eigen::VectorXd* arg_weights) {
  const int m = q.size();
  const int g = nc.count();
  const FiniteSpace& space = *q.space();
  // variables: [pi_xy (m*m, row-major), w_1..w_g]
  // min sum_xy min(d,2) pi_xy
  // s.t. sum_y pi_xy = q_x, sum_x pi_xy - (Pw)_y = 0, sum_k w_k = 1
  const int nv = m * m + g;
  LinearProgram lp;
  lp.c = Eigen::VectorXd::Zero(nv);
  for (int x = 0; x < m; ++x)
    for (int y = 0; y < m; ++y)
      lp.c(x * m + y) = std::min(space.distance(x, y), 2.0);
  lp.a_eq = Eigen::MatrixXd::Zero(2 * m + 1, nv);
  lp.b_eq = Eigen::VectorXd::Zero(2 * m + 1);
  for (int x = 0; x < m; ++x) {
    for (int y = 0; y < m; ++y) lp.a_eq(x, x * m + y) = 1.0;
    lp.b_eq(x) = q(x);
  }
  for (int y = 0; y < m; ++y) {
    for (int x = 0; x < m; ++x) lp.a_eq(m + y, x * m + y) = 1.0;
    for (int k = 0; k < g; ++k)
      lp.a_eq(m + y, m * m + k) = -nc.generators()[static_cast<size_t>(k)](y);
  }
  lp.a_eq.row(2 * m).tail(g).setOnes();
  lp.b_eq(2 * m) = 1.0;
  const LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::kOptimal)
    throw std::runtime_error("hull bl distance: internal LP failure");
  if (arg_weights) *arg_weights = sol.x.tail(g);
  return std::max(sol.objective, 0.0);
}

}  // namespace

double distance_to_class(const DiscreteMeasure& q, const NullClass& nc,
                         MetricKind metric, Eigen::VectorXd* arg_weights) {
  require_same_space(q, nc.generators().front(), "distance_to_class");
  if (!nc.hull()) {
    double best = std::numeric_limits<double>::infinity();
    int best_k = 0;
    for (int k = 0; k < nc.count(); ++k) {
      const auto& g = nc.generators()[static_cast<size_t>(k)];
      const double d = metric == MetricKind::kTv ? tv_distance(q, g)
                                                 : bl_distance(q, g);
      if (d < best) {
        best = d;
        best_k = k;
      }
    }
    if (arg_weights) {
      *arg_weights = Eigen::VectorXd::Zero(nc.count());
      (*arg_weights)(best_k) = 1.0;
    }
    return best;
  }
  return metric == MetricKind::kTv ? hull_distance_tv(q, nc, arg_weights)
                                   : hull_distance_bl(q, nc, arg_weights);
}

}  // namespace powerone
