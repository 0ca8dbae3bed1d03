#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "powerone/eprocess_base.hpp"
#include "powerone/null_class.hpp"

namespace powerone {

/**
 * One occupation-count vector of a sample of size n, together with the log
 * of its multinomial coefficient log(n! / prod counts_x!).
 */
struct TypeClass {
  Eigen::VectorXi counts;
  double log_multinomial = 0.0;

  int sample_size() const { return counts.sum(); }
  DiscreteMeasure measure(const SpacePtr& space) const;
};

/// Number of compositions of n into m parts, C(n+m-1, m-1), saturating at
/// the enumeration guard.
double composition_count(int m, int n);

/**
 * All occupation-count vectors of size-n samples on m points, in
 * lexicographic order of the count vectors. Guard: refuses (CapacityError)
 * when C(n+m-1, m-1) exceeds 10^7.
 */
std::vector<TypeClass> enumerate_types(int m, int n);

/**
 * Exact probability, under iid sampling from p, that the empirical measure
 * of n observations satisfies the predicate:
 *
 *   sum over types T with pred(T) of exp(log_mult(T) + sum_x T_x log p(x)).
 *
 * Types putting positive count on a zero-probability point contribute
 * exactly zero. Compensated summation; deterministic.
 */
double event_probability_exact(const DiscreteMeasure& p, int n,
                               const std::function<bool(const TypeClass&)>& pred);

/// Exact probability that the empirical measure lands in the ball.
double ball_hit_probability_exact(const DiscreteMeasure& p, int n,
                                  const Ball& ball);

/**
 * One nonasymptotic large-deviation check: the chance that the empirical
 * measure of n draws from p lands in a convex closed ball never exceeds
 * exp(-n r) for any certified rate r below the ball's KL infimum.
 */
struct CsiszarCheck {
  double exact = 0.0;
  double bound = 0.0;
  double rate = 0.0;
  int n = 0;
  bool holds = false;
};

CsiszarCheck csiszar_bound_check(const DiscreteMeasure& p, const Ball& ball,
                                 double certified_rate, int n);

/**
 * Stopping decision evaluated along a growing prefix: stop_now(n, prefix)
 * is asked at each n = 1..horizon with prefix.size() == n; the first true
 * answer stops.
 */
using StoppingPredicate =
    std::function<bool(int n, const std::vector<int>& prefix)>;

StoppingPredicate fixed_time_rule(int t);

/**
 * Exact E_{P}[ E_{tau ^ horizon} ] by depth-first enumeration of all sample
 * paths (zero-probability branches pruned). Guard: m_eff^horizon <= 10^7
 * where m_eff counts the support of p.
 */
double eprocess_expectation_exact(const DiscreteMeasure& p,
                                  const EProcessFactory& factory,
                                  const StoppingPredicate& stop, int horizon);

/**
 * max over n = 1..horizon and positive-probability prefixes of
 * |E_P[E_n | prefix] - E_{n-1}(prefix)|: the exact one-step martingale
 * residual of the process under p.
 */
double max_one_step_residual(const DiscreteMeasure& p,
                             const EProcessFactory& factory, int horizon);

}  // namespace powerone
