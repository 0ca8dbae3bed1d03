#include "powerone/stopping_rules.hpp"

#include <cmath>

#include "powerone/errors.hpp"
#include "powerone/metrics.hpp"

namespace powerone {

double CoverComponent::tail_mass() const {
  const double half = rate / 2.0;
  return std::exp(-start_index * half) / (1.0 - std::exp(-half));
}

int tail_start_index(double rate, double budget) {
  if (!(rate > 0.0)) throw UsageError("tail_start_index: rate must be positive");
  if (!(budget > 0.0 && budget < 1.0))
    throw UsageError("tail_start_index: budget must lie in (0, 1)");
  const double half = rate / 2.0;
  const double target = budget * (1.0 - std::exp(-half));
  int n = std::max(1, static_cast<int>(std::ceil(-std::log(target) / half)));
  // settle float boundaries exactly
  while (std::exp(-n * half) > target) ++n;
  while (n > 1 && std::exp(-(n - 1) * half) <= target) --n;
  return n;
}

StoppingRuleSpec simple_alt_test(const DiscreteMeasure& q, const NullClass& nc,
                                 double alpha, MetricKind metric,
                                 const KlinfOptions& options) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw UsageError("simple_alt_test: alpha must lie in (0, 1)");
  SeparatingBall sep = choose_separating_ball(q, nc, 0.5, metric, options);
  CoverComponent component{std::move(sep.ball), sep.rate,
                           tail_start_index(sep.rate, alpha), alpha};
  return StoppingRuleSpec{{std::move(component)}, alpha};
}

StoppingRuleSpec composite_cover_test(
    const std::vector<DiscreteMeasure>& alternatives, const NullClass& nc,
    double alpha, MetricKind metric, const KlinfOptions& options) {
  if (alternatives.empty())
    throw UsageError("composite_cover_test: need at least one alternative");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw UsageError("composite_cover_test: alpha must lie in (0, 1)");

  StoppingRuleSpec rule;
  double budget_factor = 0.5;
  for (const DiscreteMeasure& q : alternatives) {
    const double budget = alpha * budget_factor;
    budget_factor /= 2.0;
    SeparatingBall sep = choose_separating_ball(q, nc, 0.5, metric, options);

    // prune balls contained in an earlier kept ball
    bool contained = false;
    for (const CoverComponent& kept : rule.components) {
      if (kept.ball.metric != sep.ball.metric) continue;
      const double centers = kept.ball.metric == MetricKind::kTv
                                 ? tv_distance(kept.ball.center, sep.ball.center)
                                 : bl_distance(kept.ball.center, sep.ball.center);
      if (centers + sep.ball.radius <= kept.ball.radius + 1e-15) {
        contained = true;
        break;
      }
    }
    if (contained) continue;

    rule.components.push_back(CoverComponent{
        std::move(sep.ball), sep.rate, tail_start_index(sep.rate, budget),
        budget});
    rule.total_budget += budget;
  }
  return rule;
}

TrialReport run_stopping_rule(const StoppingRuleSpec& rule,
                              const std::vector<int>& path, int horizon) {
  if (horizon < 1) throw UsageError("run_stopping_rule: horizon >= 1");
  if (rule.components.empty()) return {};
  RunningCounts counts(rule.components.front().ball.center.space());
  const int limit = std::min<int>(horizon, static_cast<int>(path.size()));
  for (int n = 1; n <= limit; ++n) {
    counts.add(path[static_cast<size_t>(n - 1)]);
    for (size_t j = 0; j < rule.components.size(); ++j) {
      const CoverComponent& c = rule.components[j];
      if (n < c.start_index) continue;
      if (c.ball.contains(counts))
        return TrialReport{true, n, static_cast<int>(j)};
    }
  }
  return {};
}

int counterexample_min_m(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw UsageError("counterexample_min_m: alpha must lie in (0, 1)");
  int m = 1;
  while (std::exp2(-m) > alpha) ++m;
  return m;
}

CounterexampleTest counterexample_test(SpacePtr space, double alpha, int m,
                                       int zero_index) {
  if (!space) throw UsageError("counterexample_test: needs a space");
  if (zero_index < 0 || zero_index >= space->size())
    throw UsageError("counterexample_test: zero index out of range");
  if (m < 1 || std::exp2(-m) > alpha)
    throw UsageError("counterexample_test: need 2^-m <= alpha");
  return CounterexampleTest{std::move(space), zero_index, m};
}

TrialReport CounterexampleTest::run(const std::vector<int>& path,
                                    int horizon) const {
  if (horizon < m || static_cast<int>(path.size()) < m) return {};
  for (int i = 0; i < m; ++i)
    if (path[static_cast<size_t>(i)] != zero_index) return {};
  return TrialReport{true, m, 0};
}

}  // namespace powerone
