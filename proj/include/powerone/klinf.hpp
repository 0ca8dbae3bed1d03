#pragma once

#include <optional>

#include "powerone/divergences.hpp"
#include "powerone/null_class.hpp"

namespace powerone {

struct KlinfOptions {
  double tol = 1e-9;      // target optimality gap
  int max_iterations = 20000;
};

/**
 * Result of the information projection Phi(R) = inf_{P in class} KL(R||P).
 *
 * For list classes the minimum is exact over the generators. For hull
 * classes the mixture weights are optimized by multiplicative (EM-style)
 * updates whose first-order gap certifies optimality:
 * value - gap <= true infimum <= value.
 */
struct PhiResult {
  double value = 0.0;
  double gap = 0.0;
  Eigen::VectorXd mixture;   // minimizing weights over generators
  int argmin_index = -1;     // list classes: index of the minimizer
  bool infinite = false;

  double certified_lower() const;
};

PhiResult phi_klinf(const DiscreteMeasure& r, const NullClass& nc,
                    const KlinfOptions& options = {});

/**
 * Certified record of inf over {R in ball} (and the class, for the Phi
 * variant) of KL(R||P).
 *
 * lower_bound is safe to consume in exp(-n * lower_bound) level
 * certificates: it never exceeds the true infimum. value is the best
 * feasible objective found and witness_r attains it.
 */
struct BallRateCertificate {
  double lower_bound = 0.0;        // certified, may be +infinity
  double value = 0.0;              // best feasible value, may be +infinity
  double gap = 0.0;                // value - lower_bound when both finite
  std::optional<DiscreteMeasure> witness_r;
  std::optional<DiscreteMeasure> witness_p;
  Eigen::VectorXd witness_mixture; // hull classes: weights of witness_p
  bool ball_meets_class = false;   // the ball intersects the class (rate 0)
  bool infeasible = false;         // no ball member is dominated by P
};

/// Single-measure variant: inf over the closed ball of KL(R||P).
BallRateCertificate inf_kl_over_ball(const Ball& ball, const DiscreteMeasure& p,
                                     const KlinfOptions& options = {});

/// Class variant: inf over ball x class of KL(R||P). Joint convex
/// minimization for hull classes, a minimum of single-P solves otherwise.
BallRateCertificate inf_phi_over_ball(const Ball& ball, const NullClass& nc,
                                      const KlinfOptions& options = {});

struct SeparatingBall {
  Ball ball;
  double rate = 0.0;  // certified: inf of Phi over the closed ball >= rate
  BallRateCertificate certificate;
};

/**
 * Closed ball around q whose certified Phi-infimum is at least
 * target_fraction * Phi(q), found by halving the radius from half the
 * metric distance to the class. Throws NoSeparationError when Phi(q) = 0.
 * When Phi(q) is infinite the absolute-rate search below is used with
 * rate 1.
 */
SeparatingBall choose_separating_ball(const DiscreteMeasure& q,
                                      const NullClass& nc,
                                      double target_fraction = 0.5,
                                      MetricKind metric = MetricKind::kTv,
                                      const KlinfOptions& options = {});

/// Closed ball around q certified at an absolute rate. Requires
/// Phi(q) > target_rate (with enough margin for the solver gap).
SeparatingBall choose_ball_with_rate(const DiscreteMeasure& q,
                                     const NullClass& nc, double target_rate,
                                     MetricKind metric = MetricKind::kTv,
                                     const KlinfOptions& options = {});

}  // namespace powerone
