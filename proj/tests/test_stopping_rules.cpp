#include <doctest.h>

#include <cmath>

#include "oracle_helpers.hpp"
#include "powerone/errors.hpp"
#include "powerone/exact_oracle.hpp"
#include "powerone/stopping_rules.hpp"

using namespace powerone;

namespace {
const double kLog2 = std::log(2.0);
}

TEST_CASE("tail start index matches the frozen worked example") {
  // rate 0.2, budget 0.05: the halved-exponent tail needs N = 54
  CHECK(tail_start_index(0.2, 0.05) == 54);

  // independent partial-sum verification of the same boundary
  auto tail_sum = [](double rate, int start) {
    long double acc = 0.0L;
    for (int n = start; n < start + 4000; ++n)
      acc += std::exp(-0.5L * rate * n);
    return static_cast<double>(acc);
  };
  CHECK(tail_sum(0.2, 54) <= 0.05);
  CHECK(tail_sum(0.2, 53) > 0.05);

  CHECK_THROWS_AS(tail_start_index(0.0, 0.05), UsageError);
  CHECK_THROWS_AS(tail_start_index(0.2, 1.5), UsageError);
}

TEST_CASE("tail start index is monotone in the budget") {
  int prev = 1 << 30;
  for (double alpha = 0.01; alpha < 0.95; alpha += 0.007) {
    const int n = tail_start_index(0.35, alpha);
    CHECK(n <= prev);
    prev = n;
  }
}

TEST_CASE("single-alternative test construction") {
  auto space = FiniteSpace::two_point();
  NullClass nc({oracle::bernoulli(space, 0.5)}, false);
  const auto q = DiscreteMeasure::point_mass(space, 0);

  const StoppingRuleSpec rule = simple_alt_test(q, nc, 0.05);
  REQUIRE(rule.components.size() == 1);
  const CoverComponent& c = rule.components.front();
  CHECK(c.rate >= 0.5 * kLog2 - 1e-12);
  CHECK(c.budget == 0.05);
  CHECK(c.start_index == tail_start_index(c.rate, 0.05));
  CHECK(c.budget_holds());
  CHECK(rule.total_budget == 0.05);

  CHECK_THROWS_AS(simple_alt_test(oracle::bernoulli(space, 0.5), nc, 0.05),
                  NoSeparationError);
  CHECK_THROWS_AS(simple_alt_test(q, nc, 1.2), UsageError);
}

TEST_CASE("composite cover splits the budget geometrically") {
  auto space = FiniteSpace::two_point();
  NullClass nc({oracle::bernoulli(space, 0.5)}, false);
  const std::vector<DiscreteMeasure> alts{oracle::bernoulli(space, 0.9),
                                          oracle::bernoulli(space, 0.1)};

  const StoppingRuleSpec rule = composite_cover_test(alts, nc, 0.05);
  REQUIRE(rule.components.size() == 2);
  CHECK(rule.components[0].budget == doctest::Approx(0.025).epsilon(1e-15));
  CHECK(rule.components[1].budget == doctest::Approx(0.0125).epsilon(1e-15));
  CHECK(rule.total_budget == doctest::Approx(0.0375).epsilon(1e-15));
  for (const auto& c : rule.components) {
    CHECK(c.budget_holds());
    CHECK(c.rate > 0.0);
  }

  // singleton list reduces to the single-alternative construction at half
  // the budget
  const StoppingRuleSpec single = composite_cover_test({alts[0]}, nc, 0.05);
  REQUIRE(single.components.size() == 1);
  CHECK(single.components[0].budget == doctest::Approx(0.025).epsilon(1e-15));
  CHECK(single.components[0].rate ==
        doctest::Approx(simple_alt_test(alts[0], nc, 0.05).components[0].rate));
  CHECK(single.components[0].start_index ==
        tail_start_index(single.components[0].rate, 0.025));

  CHECK_THROWS_AS(
      composite_cover_test({oracle::bernoulli(space, 0.5)}, nc, 0.05),
      NoSeparationError);
}

TEST_CASE("start indices blow up as alternatives approach the null") {
  auto space = FiniteSpace::two_point();
  NullClass nc({oracle::bernoulli(space, 0.5)}, false);
  int prev = 0;
  for (double p : {0.9, 0.75, 0.65, 0.58, 0.54}) {
    const StoppingRuleSpec rule =
        simple_alt_test(oracle::bernoulli(space, p), nc, 0.05);
    const int n = rule.components[0].start_index;
    CHECK(n > prev);
    prev = n;
  }
  CHECK(prev > 2000);
}

TEST_CASE("running a rule on constructed paths") {
  auto space = FiniteSpace::two_point();
  // hand-built component: tv ball of radius 0.1 around delta_0, start 54
  StoppingRuleSpec rule;
  rule.components.push_back(CoverComponent{
      Ball(DiscreteMeasure::point_mass(space, 0), 0.1, MetricKind::kTv), 0.2,
      54, 0.05});
  rule.total_budget = 0.05;

  // six ones then zeros: the ones fraction drops to 0.1 exactly at n = 60
  std::vector<int> path(200, 0);
  for (int i = 0; i < 6; ++i) path[static_cast<size_t>(i)] = 1;
  const TrialReport report = run_stopping_rule(rule, path, 200);
  CHECK(report.stopped);
  CHECK(report.stop_time == 60);
  CHECK(report.triggering_component == 0);

  // never stops when the path helps too late
  const TrialReport capped = run_stopping_rule(rule, path, 59);
  CHECK(!capped.stopped);

  // a pure null path keeps the fraction near one half: no stop
  std::vector<int> alternating;
  for (int i = 0; i < 200; ++i) alternating.push_back(i % 2);
  CHECK(!run_stopping_rule(rule, alternating, 200).stopped);

  // ties break toward the smallest component index
  StoppingRuleSpec tie = rule;
  tie.components.push_back(tie.components.front());
  const TrialReport tied = run_stopping_rule(tie, path, 200);
  CHECK(tied.triggering_component == 0);

  // determinism
  for (int it = 0; it < 3; ++it) {
    const TrialReport again = run_stopping_rule(rule, path, 200);
    CHECK(again.stop_time == report.stop_time);
  }
}

TEST_CASE("widening a ball can only stop earlier") {
  auto space = FiniteSpace::two_point();
  SplitStream stream(51, 0);
  const auto q = oracle::bernoulli(space, 0.85);
  for (int trial = 0; trial < 50; ++trial) {
    const auto path =
        sample_iid(q, 200, 7, static_cast<std::uint64_t>(trial));
    StoppingRuleSpec narrow, wide;
    narrow.components.push_back(CoverComponent{
        Ball(oracle::bernoulli(space, 0.85), 0.05, MetricKind::kTv), 0.1, 10,
        0.05});
    wide.components.push_back(CoverComponent{
        Ball(oracle::bernoulli(space, 0.85), 0.12, MetricKind::kTv), 0.1, 10,
        0.05});
    const TrialReport rn = run_stopping_rule(narrow, path, 200);
    const TrialReport rw = run_stopping_rule(wide, path, 200);
    if (rn.stopped) {
      REQUIRE(rw.stopped);
      CHECK(rw.stop_time <= rn.stop_time);
    }
  }
}

TEST_CASE("all-zeros cylinder test") {
  auto space = FiniteSpace::line({0.0, 0.25});

  CHECK(counterexample_min_m(0.05) == 5);
  CHECK(counterexample_min_m(0.5) == 1);

  const CounterexampleTest test = counterexample_test(space, 0.05, 5);
  CHECK(test.m == 5);

  const std::vector<int> zeros(10, 0);
  const TrialReport hit = test.run(zeros, 10);
  CHECK(hit.stopped);
  CHECK(hit.stop_time == 5);

  std::vector<int> spoiled = zeros;
  spoiled[2] = 1;
  CHECK(!test.run(spoiled, 10).stopped);

  // a late nonzero does not matter
  std::vector<int> late = zeros;
  late[7] = 1;
  CHECK(test.run(late, 10).stopped);

  // horizon shorter than m cannot stop
  CHECK(!test.run(zeros, 4).stopped);

  // 2^-4 = 0.0625 > 0.05 is rejected, 2^-5 accepted
  CHECK_THROWS_AS(counterexample_test(space, 0.05, 4), UsageError);
  CHECK_NOTHROW(counterexample_test(space, 0.05, 5));
}

TEST_CASE("level certificate verified term by term by the exact oracle") {
  auto space = FiniteSpace::two_point();
  NullClass nc({oracle::bernoulli(space, 0.5)}, false);
  const std::vector<DiscreteMeasure> alts{oracle::bernoulli(space, 0.9),
                                          oracle::bernoulli(space, 0.1)};
  const StoppingRuleSpec rule = composite_cover_test(alts, nc, 0.05);

  for (const CoverComponent& c : rule.components) {
    for (const auto& p : nc.generators()) {
      long double partial = 0.0L;
      for (int n = c.start_index; n <= c.start_index + 12; ++n) {
        const double term = ball_hit_probability_exact(p, n, c.ball);
        CHECK(term <= std::exp(-n * c.rate) + 1e-15);
        partial += term;
      }
      CHECK(static_cast<double>(partial) <= c.budget);
    }
  }
}
