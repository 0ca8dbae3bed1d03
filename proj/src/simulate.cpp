#include "powerone/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "powerone/errors.hpp"

namespace powerone {

namespace {

constexpr std::uint64_t kStreamBlock = 1ULL << 40;

/// Runs body(t) for t = 0..trials-1 across workers. Each call must only
/// touch its own output slot; reductions happen afterwards in index order.
void parallel_trials(int trials, int workers,
                     const std::function<void(int)>& body) {
  workers = std::max(1, std::min(workers, trials));
  if (workers == 1) {
    for (int t = 0; t < trials; ++t) body(t);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (int t = w; t < trials; t += workers) body(t);
    });
  }
  for (auto& th : pool) th.join();
}

double binomial_se(double frequency, int trials) {
  return std::sqrt(frequency * (1.0 - frequency) / trials);
}

double quantile_sorted(const std::vector<int>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * (static_cast<double>(sorted.size()) - 1.0);
  const size_t lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return (1.0 - frac) * sorted[lo] + frac * sorted[hi];
}

}  // namespace

PathRunner make_runner(const StoppingRuleSpec& rule) {
  return [rule](const std::vector<int>& path, int horizon) {
    return run_stopping_rule(rule, path, horizon);
  };
}

PathRunner make_runner(const CounterexampleTest& test) {
  return [test](const std::vector<int>& path, int horizon) {
    return test.run(path, horizon);
  };
}

PathRunner make_threshold_runner(const EProcessFactory& factory, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw UsageError("threshold runner: alpha must lie in (0, 1)");
  const double threshold = 1.0 / alpha;
  return [factory, threshold](const std::vector<int>& path, int horizon) {
    auto process = factory();
    const int limit = std::min<int>(horizon, static_cast<int>(path.size()));
    for (int n = 1; n <= limit; ++n) {
      process->step(path[static_cast<size_t>(n - 1)]);
      if (process->value() >= threshold) return TrialReport{true, n, 0};
    }
    return TrialReport{};
  };
}

namespace {

// Stop frequency of the runner under `source`, one stream per trial.
struct Frequency {
  double value = 0.0;
  std::vector<int> stop_times;  // -1 when not stopped
};

Frequency stop_frequency(const PathRunner& runner, const DiscreteMeasure& source,
                         int horizon, const SimConfig& config,
                         std::uint64_t stream_base) {
  Frequency out;
  out.stop_times.assign(static_cast<size_t>(config.trials), -1);
  parallel_trials(config.trials, config.workers, [&](int t) {
    const std::vector<int> path =
        sample_iid(source, horizon, config.seed,
                   stream_base + static_cast<std::uint64_t>(t));
    const TrialReport report = runner(path, horizon);
    if (report.stopped) out.stop_times[static_cast<size_t>(t)] = report.stop_time;
  });
  int stops = 0;
  for (int s : out.stop_times)
    if (s >= 0) ++stops;
  out.value = static_cast<double>(stops) / config.trials;
  return out;
}

}  // namespace

LevelReport estimate_level(const PathRunner& runner, double alpha,
                           const NullClass& nc, const SimConfig& config) {
  if (config.trials < 1 || config.horizon < 1)
    throw UsageError("estimate_level: trials and horizon must be positive");
  LevelReport report;
  report.alpha = alpha;
  report.trials = config.trials;
  report.horizon = config.horizon;
  report.pass = true;
  for (int k = 0; k < nc.count(); ++k) {
    const auto& p = nc.generators()[static_cast<size_t>(k)];
    const Frequency freq = stop_frequency(runner, p, config.horizon, config,
                                          static_cast<std::uint64_t>(k) * kStreamBlock);
    LevelRow row;
    row.label = "null_" + std::to_string(k);
    row.frequency = freq.value;
    row.se = binomial_se(freq.value, config.trials);
    row.pass = freq.value <= alpha + 3.0 * row.se;
    report.pass = report.pass && row.pass;
    report.rows.push_back(std::move(row));
  }
  return report;
}

int power_horizon(const CoverComponent& component) {
  return component.start_index +
         static_cast<int>(std::ceil(50.0 / component.rate));
}

PowerReport estimate_power(const StoppingRuleSpec& rule,
                           const std::vector<DiscreteMeasure>& alternatives,
                           const SimConfig& config, const NullClass* nc) {
  if (rule.components.empty())
    throw UsageError("estimate_power: rule has no components");
  PowerReport report;
  report.trials = config.trials;
  report.pass = true;
  const PathRunner runner = make_runner(rule);
  for (size_t a = 0; a < alternatives.size(); ++a) {
    const DiscreteMeasure& q = alternatives[a];
    // horizon from the component whose ball covers this alternative;
    // fall back to the loosest component otherwise
    int horizon = 0;
    bool covered = false;
    for (const CoverComponent& c : rule.components) {
      if (c.ball.contains(q)) {
        horizon = std::max(horizon, power_horizon(c));
        covered = true;
      }
    }
    if (!covered)
      for (const CoverComponent& c : rule.components)
        horizon = std::max(horizon, power_horizon(c));

    const Frequency freq =
        stop_frequency(runner, q, horizon, config,
                       (0x400000ULL + static_cast<std::uint64_t>(a)) * kStreamBlock);
    PowerRow row;
    row.label = "alt_" + std::to_string(a);
    row.frequency = freq.value;
    row.se = binomial_se(freq.value, config.trials);
    row.horizon = horizon;
    row.null_alternative = nc != nullptr && nc->contains(q);
    row.pass = row.null_alternative || freq.value >= 0.99;
    report.pass = report.pass && row.pass;
    report.rows.push_back(std::move(row));
  }
  return report;
}

StoppingProfile stopping_time_profile(const PathRunner& runner,
                                      const DiscreteMeasure& q,
                                      const SimConfig& config) {
  const Frequency freq =
      stop_frequency(runner, q, config.horizon, config, 0x800000ULL * kStreamBlock);
  StoppingProfile profile;
  profile.trials = config.trials;
  std::vector<int> stopped;
  for (int s : freq.stop_times)
    if (s >= 0) stopped.push_back(s);
  std::sort(stopped.begin(), stopped.end());
  profile.stopped = static_cast<int>(stopped.size());
  profile.no_stop_fraction =
      1.0 - static_cast<double>(profile.stopped) / config.trials;
  profile.q50 = quantile_sorted(stopped, 0.50);
  profile.q90 = quantile_sorted(stopped, 0.90);
  profile.q99 = quantile_sorted(stopped, 0.99);
  return profile;
}

McExpectation mc_eprocess_expectation(const EProcessFactory& factory,
                                      const DiscreteMeasure& p,
                                      const ProcessStop& stop,
                                      const SimConfig& config) {
  if (config.trials < 1 || config.horizon < 1)
    throw UsageError("mc_eprocess_expectation: trials and horizon positive");
  std::vector<double> values(static_cast<size_t>(config.trials), 0.0);
  parallel_trials(config.trials, config.workers, [&](int t) {
    SplitStream stream(config.seed, 0xE00000ULL * kStreamBlock +
                                        static_cast<std::uint64_t>(t));
    auto process = factory();
    double final_value = 0.0;
    for (int n = 1; n <= config.horizon; ++n) {
      process->step(stream.next_index(p));
      final_value = process->value();
      if (stop && stop(*process)) break;
    }
    values[static_cast<size_t>(t)] = final_value;
  });
  double sum = 0.0, sum_sq = 0.0;
  for (double v : values) {
    sum += v;
    sum_sq += v * v;
  }
  McExpectation out;
  out.trials = config.trials;
  out.mean = sum / config.trials;
  if (config.trials > 1) {
    const double var = std::max(
        0.0, (sum_sq - config.trials * out.mean * out.mean) / (config.trials - 1));
    out.se = std::sqrt(var / config.trials);
  }
  return out;
}

}  // namespace powerone
