#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "powerone/eprocess_base.hpp"
#include "powerone/klinf.hpp"
#include "powerone/stopping_rules.hpp"

namespace powerone {

/// The constant process E_n = 1; the simplest valid wealth process.
EProcessFactory constant_eprocess(SpacePtr space);

/**
 * The exact martingale E_0 = 1, E_n = 2^n 1{all observations so far equal
 * the zero point}. Under any null giving that point mass 1/2 this is a
 * martingale; under the point mass at zero it grows at exactly log 2 per
 * step.
 */
EProcessFactory counterexample_eprocess(SpacePtr space, int zero_index = 0);

/**
 * Test aggregation: given rules with budgets alpha_k summing to at most
 * one, the count
 *
 *   E_n = #{ k : max(tau_k, k) <= n }
 *
 * of fired-and-matured rules is a nondecreasing process with expectation
 * at most one at every stopping rule uniformly over the null class, and it
 * climbs to the rule count under any alternative all rules are consistent
 * against.
 */
struct AggregatedRules {
  std::vector<StoppingRuleSpec> rules;
  std::vector<double> budgets;
};

/// Budgets default to 2^-k when omitted. Throws UsageError if they sum
/// above one.
AggregatedRules aggregate_tests(std::vector<StoppingRuleSpec> rules,
                                std::vector<double> budgets = {});

EProcessFactory aggregated_eprocess(const AggregatedRules& aggregated);

/**
 * Deterministic enumeration of positive rationals p/q: reduced fractions
 * walked along diagonals p + q = 2, 3, ... with q ascending inside each
 * diagonal, skipping q > q_max. The first values are 1, 2, 1/2, 3, 1/3,
 * 4, 3/2, 2/3, 1/4, ...
 */
std::vector<double> enumerate_positive_rationals(int count, int q_max);

struct RegrowOptions {
  int rational_count = 16;
  int q_max = 8;
  // Weight damping exp(-r^p) with p = 2. Other exponents keep the process
  // valid (the weight budget only shrinks) but are experimental.
  double damping_exponent = 2.0;
  MetricKind metric = MetricKind::kTv;
  KlinfOptions klinf;
};

/// One certified neighborhood term of the relative-growth process.
struct RegrowCover {
  int k = 0;  // 1-based index of the rate in the rational enumeration
  int j = 0;  // 1-based index within level k
  Ball ball;
  double rate = 0.0;       // enumerated rate r_k
  double certified = 0.0;  // certified infimum over the ball (>= rate)
  double log_weight = 0.0; // log of w_{k,j} = 2^{-k-j} e^{-r_k^2} / (4 S)
};

/**
 * The built process plan: rates, certified covers, and the truncated
 * normalizer S = sum_{k <= K} 2^-k e^{-r_k^2}. Total weight is at most
 * 1/4, so
 *
 *   E_n = 3/4 + sum_{k,j} w_{k,j} sum_{t<=n} v_t e^{r_k t} 1{emp_t in C_{k,j}}
 *
 * with v_t = 6/(pi^2 t^2) has expectation at most one at every stopping
 * rule uniformly over the class.
 */
struct RegrowPlan {
  SpacePtr space;
  std::vector<double> rationals;
  std::vector<RegrowCover> covers;
  double normalizer = 0.0;
  double total_weight = 0.0;
  bool empty_cover = false;

  EProcessFactory factory() const;

  /// Largest enumerated rate strictly below phi that carries a cover;
  /// nullopt when no cover qualifies.
  std::optional<double> best_included_rate(double phi) const;
};

/**
 * Build the truncated relative-growth process: enumerate rates, and for
 * each rate build one certified ball around every hint alternative whose
 * divergence from the class exceeds it. Hints that cannot be certified at
 * a given rate are skipped; with no covers at all the process degenerates
 * to the constant 3/4, which is still valid.
 */
RegrowPlan build_regrow(const NullClass& nc,
                        const std::vector<DiscreteMeasure>& hints,
                        const RegrowOptions& options = {});

/**
 * Monte Carlo growth diagnostics: per recorded n, the mean and standard
 * error over trials of (1/n) log E_n, against the divergence benchmark.
 * A mean above benchmark + 4 se at any recorded n raises the violation
 * flag (the expectation bound forbids it up to noise).
 */
struct GrowthReport {
  std::vector<int> ns;
  std::vector<double> mean_log_growth;
  std::vector<double> se;
  std::vector<double> final_per_trial;  // (1/n_max) log E_{n_max}, per trial
  double benchmark_phi = 0.0;
  double best_included_rate = std::numeric_limits<double>::quiet_NaN();
  int trials = 0;
  bool upper_violation = false;
};

GrowthReport growth_report(const EProcessFactory& factory,
                           const DiscreteMeasure& q, int n_max, int trials,
                           std::uint64_t seed, double benchmark_phi,
                           double best_included_rate =
                               std::numeric_limits<double>::quiet_NaN(),
                           int record_stride = 1);

}  // namespace powerone
