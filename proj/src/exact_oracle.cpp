#include "powerone/exact_oracle.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "powerone/errors.hpp"

namespace powerone {

namespace {

constexpr double kEnumerationGuard = 1e7;

/// Neumaier compensated accumulator: probabilities here span hundreds of
/// orders of magnitude, a plain sum loses the small terms.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }

  double total() const { return sum + comp; }
};

double log_multinomial(const Eigen::VectorXi& counts, int n) {
  double lm = std::lgamma(n + 1.0);
  for (Eigen::Index i = 0; i < counts.size(); ++i)
    lm -= std::lgamma(counts(i) + 1.0);
  return lm;
}

}  // namespace

DiscreteMeasure TypeClass::measure(const SpacePtr& space) const {
  const double n = static_cast<double>(sample_size());
  Eigen::VectorXd w(counts.size());
  for (Eigen::Index i = 0; i < counts.size(); ++i) w(i) = counts(i) / n;
  return DiscreteMeasure(space, std::move(w));
}

double composition_count(int m, int n) {
  double c = 1.0;
  for (int i = 1; i <= m - 1; ++i) {
    c *= static_cast<double>(n + i) / i;
    if (c > 4.0 * kEnumerationGuard) return c;
  }
  return c;
}

std::vector<TypeClass> enumerate_types(int m, int n) {
  if (m < 2) throw UsageError("enumerate_types: need at least 2 points");
  if (n < 1) throw UsageError("enumerate_types: need a positive sample size");
  const double total = composition_count(m, n);
  if (total > kEnumerationGuard) {
    std::ostringstream os;
    os << "enumerate_types: C(" << n + m - 1 << ", " << m - 1 << ") = " << total
       << " exceeds the 1e7 enumeration guard";
    throw CapacityError(os.str());
  }

  std::vector<TypeClass> out;
  out.reserve(static_cast<size_t>(total));
  Eigen::VectorXi counts = Eigen::VectorXi::Zero(m);
  // lexicographic recursion over count vectors
  std::function<void(int, int)> rec = [&](int coord, int remaining) {
    if (coord == m - 1) {
      counts(coord) = remaining;
      out.push_back(TypeClass{counts, log_multinomial(counts, n)});
      return;
    }
    for (int c = 0; c <= remaining; ++c) {
      counts(coord) = c;
      rec(coord + 1, remaining - c);
    }
  };
  rec(0, n);
  return out;
}

double event_probability_exact(
    const DiscreteMeasure& p, int n,
    const std::function<bool(const TypeClass&)>& pred) {
  const std::vector<TypeClass> types = enumerate_types(p.size(), n);
  Eigen::VectorXd log_p(p.size());
  for (int x = 0; x < p.size(); ++x)
    log_p(x) = p(x) > 0.0 ? std::log(p(x)) : -std::numeric_limits<double>::infinity();

  CompensatedSum acc;
  for (const TypeClass& t : types) {
    if (!pred(t)) continue;
    double log_prob = t.log_multinomial;
    bool impossible = false;
    for (int x = 0; x < p.size() && !impossible; ++x) {
      if (t.counts(x) == 0) continue;
      if (p(x) <= 0.0)
        impossible = true;
      else
        log_prob += t.counts(x) * log_p(x);
    }
    if (!impossible) acc.add(std::exp(log_prob));
  }
  return acc.total();
}

double ball_hit_probability_exact(const DiscreteMeasure& p, int n,
                                  const Ball& ball) {
  require_same_space(p, ball.center, "ball_hit_probability_exact");
  const SpacePtr space = p.space();
  return event_probability_exact(
      p, n, [&](const TypeClass& t) { return ball.contains(t.measure(space)); });
}

CsiszarCheck csiszar_bound_check(const DiscreteMeasure& p, const Ball& ball,
                                 double certified_rate, int n) {
  if (n < 1) throw UsageError("csiszar_bound_check: need n >= 1");
  CsiszarCheck out;
  out.n = n;
  out.rate = certified_rate;
  out.exact = ball_hit_probability_exact(p, n, ball);
  out.bound = std::exp(-static_cast<double>(n) * certified_rate);
  out.holds = out.exact <= out.bound + 1e-12;
  return out;
}

StoppingPredicate fixed_time_rule(int t) {
  return [t](int n, const std::vector<int>&) { return n >= t; };
}

namespace {

void expectation_dfs(const DiscreteMeasure& p, const EProcess& process,
                     const StoppingPredicate& stop, int horizon, int depth,
                     double log_prob, std::vector<int>& prefix,
                     CompensatedSum& acc) {
  if (depth == horizon) {
    acc.add(std::exp(log_prob) * process.value());
    return;
  }
  for (int x = 0; x < p.size(); ++x) {
    if (p(x) <= 0.0) continue;
    auto child = process.clone();
    child->step(x);
    prefix.push_back(x);
    const double child_log_prob = log_prob + std::log(p(x));
    if (stop(depth + 1, prefix)) {
      acc.add(std::exp(child_log_prob) * child->value());
    } else {
      expectation_dfs(p, *child, stop, horizon, depth + 1, child_log_prob,
                      prefix, acc);
    }
    prefix.pop_back();
  }
}

}  // namespace

double eprocess_expectation_exact(const DiscreteMeasure& p,
                                  const EProcessFactory& factory,
                                  const StoppingPredicate& stop, int horizon) {
  if (horizon < 1) throw UsageError("eprocess_expectation_exact: horizon >= 1");
  int support = 0;
  for (int x = 0; x < p.size(); ++x)
    if (p(x) > 0.0) ++support;
  if (support > 1 && horizon * std::log(static_cast<double>(support)) >
                         std::log(kEnumerationGuard)) {
    std::ostringstream os;
    os << "eprocess_expectation_exact: " << support << "^" << horizon
       << " paths exceed the 1e7 enumeration guard";
    throw CapacityError(os.str());
  }
  auto process = factory();
  std::vector<int> prefix;
  prefix.reserve(static_cast<size_t>(horizon));
  CompensatedSum acc;
  expectation_dfs(p, *process, stop, horizon, 0, 0.0, prefix, acc);
  return acc.total();
}

namespace {

void residual_dfs(const DiscreteMeasure& p, const EProcess& process,
                  int horizon, int depth, double& worst) {
  // one-step conditional expectation from this prefix
  CompensatedSum step_mean;
  for (int x = 0; x < p.size(); ++x) {
    if (p(x) <= 0.0) continue;
    auto child = process.clone();
    child->step(x);
    step_mean.add(p(x) * child->value());
  }
  worst = std::max(worst, std::abs(step_mean.total() - process.value()));
  if (depth + 1 >= horizon) return;
  for (int x = 0; x < p.size(); ++x) {
    if (p(x) <= 0.0) continue;
    auto child = process.clone();
    child->step(x);
    residual_dfs(p, *child, horizon, depth + 1, worst);
  }
}

}  // namespace

double max_one_step_residual(const DiscreteMeasure& p,
                             const EProcessFactory& factory, int horizon) {
  if (horizon < 1) throw UsageError("max_one_step_residual: horizon >= 1");
  int support = 0;
  for (int x = 0; x < p.size(); ++x)
    if (p(x) > 0.0) ++support;
  if (support > 1 && horizon * std::log(static_cast<double>(support)) >
                         std::log(kEnumerationGuard))
    throw CapacityError("max_one_step_residual: path tree exceeds the guard");
  double worst = 0.0;
  auto process = factory();
  residual_dfs(p, *process, horizon, 0, worst);
  return worst;
}

}  // namespace powerone
