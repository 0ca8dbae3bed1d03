#pragma once

#include <optional>
#include <vector>

#include "powerone/klinf.hpp"
#include "powerone/null_class.hpp"

namespace powerone {

/**
 * One neighborhood of a sequential test: a closed ball with a certified
 * divergence rate, a start index, and an error budget. The budget invariant
 * is the halved-exponent geometric tail
 *
 *   exp(-N r/2) / (1 - exp(-r/2)) <= budget,
 *
 * which combined with the per-n bound P^n(ball) <= exp(-n r) certifies
 * sum_{n >= N} P^n(ball) <= budget for every class member.
 */
struct CoverComponent {
  Ball ball;
  double rate = 0.0;
  int start_index = 1;
  double budget = 0.0;

  /// The tail sum the budget invariant controls.
  double tail_mass() const;
  bool budget_holds() const { return tail_mass() <= budget + 1e-15; }
};

/// Smallest N >= 1 with exp(-N r/2)/(1 - exp(-r/2)) <= budget.
int tail_start_index(double rate, double budget);

/**
 * A first-hit sequential test: stop at the first n that some component j
 * has n >= N_j and the running empirical measure inside ball_j. Level is
 * certified by the sum of component budgets.
 */
struct StoppingRuleSpec {
  std::vector<CoverComponent> components;
  double total_budget = 0.0;
};

struct TrialReport {
  bool stopped = false;
  int stop_time = 0;                 // meaningful only when stopped
  int triggering_component = -1;     // meaningful only when stopped
};

/**
 * Level-alpha test with power one against the single alternative q:
 * a separating ball certified at target_fraction * Phi(q) (default 1/2)
 * and the start index from the geometric tail. Throws NoSeparationError
 * when Phi(q) = 0.
 */
StoppingRuleSpec simple_alt_test(const DiscreteMeasure& q, const NullClass& nc,
                                 double alpha,
                                 MetricKind metric = MetricKind::kTv,
                                 const KlinfOptions& options = {});

/**
 * One component per alternative with budgets alpha * 2^-j. Components whose
 * balls are contained in an earlier kept ball are pruned; pruning never
 * raises the level and can only delay power. Throws NoSeparationError if
 * any alternative has Phi = 0.
 */
StoppingRuleSpec composite_cover_test(const std::vector<DiscreteMeasure>& alternatives,
                                      const NullClass& nc, double alpha,
                                      MetricKind metric = MetricKind::kTv,
                                      const KlinfOptions& options = {});

/**
 * Scan n = 1..horizon maintaining the running empirical measure; report the
 * first hit. Ties between components at the same n go to the smallest
 * index. Not stopping within the horizon is a valid report.
 */
TrialReport run_stopping_rule(const StoppingRuleSpec& rule,
                              const std::vector<int>& path, int horizon);

/**
 * The all-zeros cylinder test on a space with a designated zero point:
 * stop at time m if the first m observations all equal that point, never
 * otherwise. Exact level 2^-m under any null giving the zero point mass
 * 1/2. Requires 2^-m <= alpha.
 */
struct CounterexampleTest {
  SpacePtr space;
  int zero_index = 0;
  int m = 0;

  TrialReport run(const std::vector<int>& path, int horizon) const;
};

CounterexampleTest counterexample_test(SpacePtr space, double alpha, int m,
                                       int zero_index = 0);

/// Smallest m with 2^-m <= alpha.
int counterexample_min_m(double alpha);

}  // namespace powerone
