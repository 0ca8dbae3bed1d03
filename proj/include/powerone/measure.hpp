#pragma once

#include <Eigen/Dense>

#include <vector>

#include "powerone/finite_space.hpp"

namespace powerone {

/**
 * A probability measure with finite support, stored as a weight vector over
 * the points of a FiniteSpace.
 *
 * Construction renormalizes the weights to sum to one and rejects inputs
 * farther than 1e-9 from the probability simplex. Instances are immutable
 * values and safe to share across threads.
 */
class DiscreteMeasure {
 public:
  DiscreteMeasure(SpacePtr space, Eigen::VectorXd weights);

  const Eigen::VectorXd& weights() const { return weights_; }
  double operator()(int x) const { return weights_(x); }
  const SpacePtr& space() const { return space_; }
  int size() const { return static_cast<int>(weights_.size()); }

  /// Indices with strictly positive mass.
  std::vector<int> support() const;

  static DiscreteMeasure point_mass(SpacePtr space, int x);
  static DiscreteMeasure uniform(SpacePtr space);

 private:
  SpacePtr space_;
  Eigen::VectorXd weights_;
};

bool same_space(const DiscreteMeasure& a, const DiscreteMeasure& b);
void require_same_space(const DiscreteMeasure& a, const DiscreteMeasure& b,
                        const char* where);

/**
 * Empirical measure of a sample of point indices: weight_x = count_x / n.
 * The division happens once per coordinate from exact integer counts, so
 * repeated evaluation cannot drift.
 */
DiscreteMeasure empirical_measure(const std::vector<int>& sample, SpacePtr space);

/**
 * Incrementally maintained occupation counts of a growing sample. The counts
 * are exact integers; weights are derived on demand as count / n.
 */
class RunningCounts {
 public:
  explicit RunningCounts(SpacePtr space);

  void add(int x);
  void reset();
  int n() const { return n_; }
  const Eigen::VectorXi& counts() const { return counts_; }
  const SpacePtr& space() const { return space_; }

  DiscreteMeasure measure() const;

  /// Total-variation distance from the current empirical measure to q,
  /// computed fresh from the integer counts.
  double tv_to(const DiscreteMeasure& q) const;

 private:
  SpacePtr space_;
  Eigen::VectorXi counts_;
  int n_ = 0;
};

/**
 * A real-valued test function on the points of a space, used for
 * variational representations and the bounded-Lipschitz metric.
 */
struct BLFunction {
  Eigen::VectorXd values;
};

double sup_norm(const BLFunction& f);
double lipschitz_constant(const BLFunction& f, const FiniteSpace& space);

/// max(sup-norm, Lipschitz constant). The unit ball of this norm is the
/// test class defining bl_distance; radii quoted anywhere in this project
/// are relative to this convention.
double bl_norm(const BLFunction& f, const FiniteSpace& space);

}  // namespace powerone
