#pragma once

#include <vector>

#include "powerone/measure.hpp"

namespace powerone {

enum class MetricKind { kTv, kBl };

const char* metric_kind_name(MetricKind kind);

/**
 * A metric ball of measures around a center. Both supported kinds (TV and
 * BL) give convex sets whose closures are weakly closed on a finite space,
 * so the nonasymptotic empirical-measure bound applies to either.
 */
struct Ball {
  DiscreteMeasure center;
  double radius = 0.0;
  MetricKind metric = MetricKind::kTv;
  bool closed = true;

  Ball(DiscreteMeasure center_, double radius_,
       MetricKind metric_ = MetricKind::kTv, bool closed_ = true);

  double distance_to(const DiscreteMeasure& r) const;
  bool contains(const DiscreteMeasure& r) const;

  /// Membership for a running empirical measure; avoids building a
  /// DiscreteMeasure per step for the TV case.
  bool contains(const RunningCounts& counts) const;
};

/**
 * A null hypothesis class: either a finite list of measures, or the convex
 * hull of that list (hull = true). Finite hulls are compact, which is the
 * standing assumption behind every level certificate produced here.
 */
class NullClass {
 public:
  NullClass(std::vector<DiscreteMeasure> generators, bool hull);

  const std::vector<DiscreteMeasure>& generators() const { return generators_; }
  bool hull() const { return hull_; }
  int count() const { return static_cast<int>(generators_.size()); }
  const SpacePtr& space() const { return generators_.front().space(); }

  /// The mixture sum_i w_i P_i for weights on the generator simplex.
  DiscreteMeasure mixture(const Eigen::VectorXd& weights) const;

  /// Points carrying positive mass under at least one generator.
  std::vector<int> union_support() const;

  /// Exact membership up to tolerance: list membership, or hull membership
  /// (solved as a small feasibility program).
  bool contains(const DiscreteMeasure& r, double tol = 1e-9) const;

 private:
  std::vector<DiscreteMeasure> generators_;
  bool hull_;
};

/// min over the class (list or hull) of the distance from q, in the chosen
/// metric. Hull distances are linear programs. When arg_weights is given it
/// receives the mixture weights of the nearest class point (one-hot for
/// list classes).
double distance_to_class(const DiscreteMeasure& q, const NullClass& nc,
                         MetricKind metric,
                         Eigen::VectorXd* arg_weights = nullptr);

}  // namespace powerone
