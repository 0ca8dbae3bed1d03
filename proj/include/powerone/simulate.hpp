#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "powerone/eprocess.hpp"
#include "powerone/rng.hpp"
#include "powerone/stopping_rules.hpp"

namespace powerone {

/**
 * Simulation settings. Identical settings produce byte-identical reports
 * at any worker count: every trial draws from its own counter-based
 * stream and results are reduced in trial order.
 */
struct SimConfig {
  int trials = 1000;
  int horizon = 100;
  std::uint64_t seed = 1;
  int workers = 1;
};

/// A sequential test evaluated on a full sample path.
using PathRunner =
    std::function<TrialReport(const std::vector<int>& path, int horizon)>;

PathRunner make_runner(const StoppingRuleSpec& rule);
PathRunner make_runner(const CounterexampleTest& test);

/// Reject when the process reaches 1/alpha within the horizon (the
/// anytime-valid threshold test).
PathRunner make_threshold_runner(const EProcessFactory& factory, double alpha);

struct LevelRow {
  std::string label;
  double frequency = 0.0;
  double se = 0.0;
  bool pass = false;
};

/**
 * Horizon-capped rejection frequency under each generator (for hull
 * classes the generators are the hull vertices). This estimates a lower
 * bound on P(tau < infinity); the analytic budget certificate is the true
 * level guarantee. A row passes when frequency <= alpha + 3 se.
 */
struct LevelReport {
  double alpha = 0.0;
  int trials = 0;
  int horizon = 0;
  std::vector<LevelRow> rows;
  bool pass = false;
};

LevelReport estimate_level(const PathRunner& runner, double alpha,
                           const NullClass& nc, const SimConfig& config);

struct PowerRow {
  std::string label;
  double frequency = 0.0;
  double se = 0.0;
  int horizon = 0;
  bool pass = false;
  bool null_alternative = false;  // the "alternative" sits in the class
};

struct PowerReport {
  int trials = 0;
  std::vector<PowerRow> rows;
  bool pass = false;
};

/**
 * Stop frequency per alternative within its own horizon
 * H = N + ceil(50 / rate) taken from the component covering it; passes at
 * frequency >= 0.99. Alternatives lying in the class are flagged, not
 * failed.
 */
PowerReport estimate_power(const StoppingRuleSpec& rule,
                           const std::vector<DiscreteMeasure>& alternatives,
                           const SimConfig& config,
                           const NullClass* nc = nullptr);

/// The power horizon of one component.
int power_horizon(const CoverComponent& component);

struct StoppingProfile {
  int trials = 0;
  double q50 = 0.0;
  double q90 = 0.0;
  double q99 = 0.0;
  double no_stop_fraction = 0.0;
  int stopped = 0;
};

/// Empirical stop-time quantiles among stopped trials.
StoppingProfile stopping_time_profile(const PathRunner& runner,
                                      const DiscreteMeasure& q,
                                      const SimConfig& config);

/// Stop decision driven by the running process value.
using ProcessStop = std::function<bool(const EProcess& process)>;

struct McExpectation {
  double mean = 0.0;
  double se = 0.0;
  int trials = 0;
};

/**
 * Monte Carlo estimate of E_p[ E_{tau ^ horizon} ] for the stopping rule
 * "first n with stop(process)" (never, when stop is empty).
 */
McExpectation mc_eprocess_expectation(const EProcessFactory& factory,
                                      const DiscreteMeasure& p,
                                      const ProcessStop& stop,
                                      const SimConfig& config);

}  // namespace powerone
