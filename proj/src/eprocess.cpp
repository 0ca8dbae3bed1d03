#include "powerone/eprocess.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "powerone/errors.hpp"
#include "powerone/rng.hpp"

namespace powerone {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
const double kLog2 = std::log(2.0);

double log_add_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

class ConstantProcess final : public EProcess {
 public:
  explicit ConstantProcess(SpacePtr space) : space_(std::move(space)) {}
  double step(int x) override {
    if (x < 0 || x >= space_->size()) throw UsageError("observation out of range");
    ++n_;
    return 1.0;
  }
  double value() const override { return 1.0; }
  double log_value() const override { return 0.0; }
  int time() const override { return n_; }
  std::unique_ptr<EProcess> clone() const override {
    return std::make_unique<ConstantProcess>(*this);
  }

 private:
  SpacePtr space_;
  int n_ = 0;
};

class AllZerosDoubling final : public EProcess {
 public:
  AllZerosDoubling(SpacePtr space, int zero_index)
      : space_(std::move(space)), zero_index_(zero_index) {}

  double step(int x) override {
    if (x < 0 || x >= space_->size()) throw UsageError("observation out of range");
    ++n_;
    if (x != zero_index_) all_zeros_ = false;
    return value();
  }
  double value() const override { return all_zeros_ ? std::exp2(n_) : 0.0; }
  double log_value() const override { return all_zeros_ ? n_ * kLog2 : kNegInf; }
  int time() const override { return n_; }
  std::unique_ptr<EProcess> clone() const override {
    return std::make_unique<AllZerosDoubling>(*this);
  }

 private:
  SpacePtr space_;
  int zero_index_;
  int n_ = 0;
  bool all_zeros_ = true;
};

class AggregatedProcess final : public EProcess {
 public:
  explicit AggregatedProcess(std::shared_ptr<const AggregatedRules> rules)
      : rules_(std::move(rules)),
        counts_(rules_->rules.front().components.front().ball.center.space()),
        fired_(rules_->rules.size(), 0) {}

  double step(int x) override {
    counts_.add(x);
    const int n = counts_.n();
    for (size_t k = 0; k < rules_->rules.size(); ++k) {
      if (fired_[k] > 0) continue;
      for (const CoverComponent& c : rules_->rules[k].components) {
        if (n < c.start_index) continue;
        if (c.ball.contains(counts_)) {
          fired_[k] = n;  // tau_k
          break;
        }
      }
    }
    return value();
  }

  double value() const override {
    const int n = counts_.n();
    int count = 0;
    for (size_t k = 0; k < fired_.size(); ++k) {
      if (fired_[k] == 0) continue;
      const int sigma = std::max(fired_[k], static_cast<int>(k) + 1);
      if (sigma <= n) ++count;
    }
    return count;
  }
  double log_value() const override {
    const double v = value();
    return v > 0.0 ? std::log(v) : kNegInf;
  }
  int time() const override { return counts_.n(); }
  std::unique_ptr<EProcess> clone() const override {
    return std::make_unique<AggregatedProcess>(*this);
  }

 private:
  std::shared_ptr<const AggregatedRules> rules_;
  RunningCounts counts_;
  std::vector<int> fired_;  // realized tau_k, 0 while running
};

struct RegrowShared {
  std::vector<RegrowCover> covers;
  double log_base = std::log(0.75);
};

class RegrowProcess final : public EProcess {
 public:
  RegrowProcess(std::shared_ptr<const RegrowShared> shared, SpacePtr space)
      : shared_(std::move(shared)), counts_(std::move(space)),
        acc_(shared_->covers.size(), kNegInf),
        log_total_(shared_->log_base) {}

  double step(int x) override {
    counts_.add(x);
    const int t = counts_.n();
    // log v_t = log(6/pi^2) - 2 log t
    const double log_vt = std::log(6.0 / (M_PI * M_PI)) - 2.0 * std::log(t);
    for (size_t i = 0; i < shared_->covers.size(); ++i) {
      const RegrowCover& c = shared_->covers[i];
      if (c.ball.contains(counts_))
        acc_[i] = log_add_exp(acc_[i], c.log_weight + log_vt + c.rate * t);
    }
    double total = shared_->log_base;
    for (double a : acc_) total = log_add_exp(total, a);
    log_total_ = total;
    return value();
  }

  double value() const override { return std::exp(log_total_); }
  double log_value() const override { return log_total_; }
  int time() const override { return counts_.n(); }
  std::unique_ptr<EProcess> clone() const override {
    return std::make_unique<RegrowProcess>(*this);
  }

 private:
  std::shared_ptr<const RegrowShared> shared_;
  RunningCounts counts_;
  std::vector<double> acc_;  // per-cover log of sum_t v_t e^{r t} 1{hit}
  double log_total_;
};

}  // namespace

EProcessFactory constant_eprocess(SpacePtr space) {
  if (!space) throw UsageError("constant_eprocess: needs a space");
  return [space]() { return std::make_unique<ConstantProcess>(space); };
}

EProcessFactory counterexample_eprocess(SpacePtr space, int zero_index) {
  if (!space) throw UsageError("counterexample_eprocess: needs a space");
  if (zero_index < 0 || zero_index >= space->size())
    throw UsageError("counterexample_eprocess: zero index out of range");
  return [space, zero_index]() {
    return std::make_unique<AllZerosDoubling>(space, zero_index);
  };
}

AggregatedRules aggregate_tests(std::vector<StoppingRuleSpec> rules,
                                std::vector<double> budgets) {
  if (rules.empty()) throw UsageError("aggregate_tests: need at least one rule");
  if (budgets.empty()) {
    budgets.resize(rules.size());
    double b = 0.5;
    for (double& v : budgets) {
      v = b;
      b /= 2.0;
    }
  }
  if (budgets.size() != rules.size())
    throw UsageError("aggregate_tests: one budget per rule");
  double total = 0.0;
  for (size_t k = 0; k < rules.size(); ++k) {
    if (rules[k].components.empty())
      throw UsageError("aggregate_tests: empty rule");
    if (rules[k].total_budget > budgets[k] + 1e-12)
      throw UsageError("aggregate_tests: rule level exceeds its budget");
    total += budgets[k];
  }
  if (total > 1.0 + 1e-12)
    throw UsageError("aggregate_tests: budgets must sum to at most one");
  return AggregatedRules{std::move(rules), std::move(budgets)};
}

EProcessFactory aggregated_eprocess(const AggregatedRules& aggregated) {
  auto shared = std::make_shared<const AggregatedRules>(aggregated);
  return [shared]() { return std::make_unique<AggregatedProcess>(shared); };
}

std::vector<double> enumerate_positive_rationals(int count, int q_max) {
  if (count < 1 || q_max < 1)
    throw UsageError("rational enumeration: count and q_max must be positive");
  std::vector<double> out;
  out.reserve(static_cast<size_t>(count));
  for (int s = 2; static_cast<int>(out.size()) < count; ++s) {
    for (int q = 1; q < s && static_cast<int>(out.size()) < count; ++q) {
      const int p = s - q;
      if (q > q_max) continue;
      if (std::gcd(p, q) != 1) continue;
      out.push_back(static_cast<double>(p) / q);
    }
    if (s > 4 * (count + q_max) + 16)
      throw UsageError("rational enumeration: q_max too small for count");
  }
  return out;
}

RegrowPlan build_regrow(const NullClass& nc,
                        const std::vector<DiscreteMeasure>& hints,
                        const RegrowOptions& options) {
  for (const auto& h : hints)
    require_same_space(h, nc.generators().front(), "build_regrow");

  RegrowPlan plan;
  plan.space = nc.space();
  plan.rationals =
      enumerate_positive_rationals(options.rational_count, options.q_max);

  double normalizer = 0.0;
  for (size_t k = 0; k < plan.rationals.size(); ++k)
    normalizer += std::exp2(-static_cast<double>(k + 1)) *
                  std::exp(-std::pow(plan.rationals[k], options.damping_exponent));
  plan.normalizer = normalizer;

  std::vector<PhiResult> phis;
  phis.reserve(hints.size());
  for (const auto& h : hints) phis.push_back(phi_klinf(h, nc, options.klinf));

  for (size_t k = 0; k < plan.rationals.size(); ++k) {
    const double rate = plan.rationals[k];
    int j = 0;
    for (size_t h = 0; h < hints.size(); ++h) {
      if (!phis[h].infinite && phis[h].value <= rate) continue;
      try {
        SeparatingBall sep = choose_ball_with_rate(hints[h], nc, rate,
                                                   options.metric, options.klinf);
        ++j;
        const double log_weight =
            -(static_cast<double>(k + 1) + j) * std::log(2.0) -
            std::pow(rate, options.damping_exponent) -
            std::log(4.0 * normalizer);
        plan.covers.push_back(RegrowCover{static_cast<int>(k + 1), j,
                                          std::move(sep.ball), rate, sep.rate,
                                          log_weight});
      } catch (const CertificationError&) {
        // rate too close to the hint's divergence for the solver margin
      }
    }
  }
  plan.empty_cover = plan.covers.empty();
  plan.total_weight = 0.0;
  for (const auto& c : plan.covers) plan.total_weight += std::exp(c.log_weight);
  return plan;
}

EProcessFactory RegrowPlan::factory() const {
  auto shared = std::make_shared<RegrowShared>();
  shared->covers = covers;
  SpacePtr sp = space;
  std::shared_ptr<const RegrowShared> frozen = shared;
  return [frozen, sp]() { return std::make_unique<RegrowProcess>(frozen, sp); };
}

std::optional<double> RegrowPlan::best_included_rate(double phi) const {
  std::optional<double> best;
  for (const auto& c : covers) {
    if (c.rate < phi && (!best || c.rate > *best)) best = c.rate;
  }
  return best;
}

GrowthReport growth_report(const EProcessFactory& factory,
                           const DiscreteMeasure& q, int n_max, int trials,
                           std::uint64_t seed, double benchmark_phi,
                           double best_included_rate, int record_stride) {
  if (n_max < 1 || trials < 1 || record_stride < 1)
    throw UsageError("growth_report: n_max, trials, stride must be positive");

  GrowthReport report;
  report.benchmark_phi = benchmark_phi;
  report.best_included_rate = best_included_rate;
  report.trials = trials;
  for (int n = record_stride; n <= n_max; n += record_stride)
    report.ns.push_back(n);
  if (report.ns.empty() || report.ns.back() != n_max)
    report.ns.push_back(n_max);

  const size_t records = report.ns.size();
  std::vector<double> sum(records, 0.0), sum_sq(records, 0.0);
  std::vector<int> infinite(records, 0);
  report.final_per_trial.reserve(static_cast<size_t>(trials));

  for (int trial = 0; trial < trials; ++trial) {
    SplitStream stream(seed, static_cast<std::uint64_t>(trial));
    auto process = factory();
    size_t rec = 0;
    double final_growth = kNegInf;
    for (int n = 1; n <= n_max; ++n) {
      process->step(stream.next_index(q));
      if (rec < records && report.ns[rec] == n) {
        const double g = process->log_value() / n;
        if (std::isfinite(g)) {
          sum[rec] += g;
          sum_sq[rec] += g * g;
        } else {
          infinite[rec] += 1;
        }
        if (n == n_max) final_growth = g;
        ++rec;
      }
    }
    report.final_per_trial.push_back(final_growth);
  }

  report.mean_log_growth.resize(records);
  report.se.resize(records);
  for (size_t i = 0; i < records; ++i) {
    if (infinite[i] > 0) {
      report.mean_log_growth[i] = kNegInf;
      report.se[i] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    const double mean = sum[i] / trials;
    report.mean_log_growth[i] = mean;
    if (trials > 1) {
      const double var =
          std::max(0.0, (sum_sq[i] - trials * mean * mean) / (trials - 1));
      report.se[i] = std::sqrt(var / trials);
    } else {
      report.se[i] = 0.0;
    }
    if (std::isfinite(benchmark_phi) &&
        mean > benchmark_phi + 4.0 * report.se[i] + 1e-9)
      report.upper_violation = true;
  }
  return report;
}

}  // namespace powerone
