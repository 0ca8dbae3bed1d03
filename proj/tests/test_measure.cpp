#include <doctest.h>

#include <cmath>

#include "oracle_helpers.hpp"
#include "powerone/divergences.hpp"
#include "powerone/errors.hpp"
#include "powerone/metrics.hpp"

using namespace powerone;

namespace {
const double kLog2 = std::log(2.0);
}

TEST_CASE("finite space validation") {
  Eigen::MatrixXd bad(2, 2);
  bad << 0.0, 1.0, 2.0, 0.0;
  CHECK_THROWS_AS(FiniteSpace({"a", "b"}, bad), UsageError);

  Eigen::MatrixXd diag(2, 2);
  diag << 0.5, 1.0, 1.0, 0.0;
  CHECK_THROWS_AS(FiniteSpace({"a", "b"}, diag), UsageError);

  Eigen::MatrixXd zero_off(2, 2);
  zero_off << 0.0, 0.0, 0.0, 0.0;
  CHECK_THROWS_AS(FiniteSpace({"a", "b"}, zero_off), UsageError);

  // triangle violation: d(0,2) = 10 > d(0,1) + d(1,2) = 2
  Eigen::MatrixXd tri(3, 3);
  tri << 0, 1, 10, 1, 0, 1, 10, 1, 0;
  CHECK_THROWS_AS(FiniteSpace({"a", "b", "c"}, tri), UsageError);

  CHECK_THROWS_AS(FiniteSpace({"a"}, Eigen::MatrixXd::Zero(1, 1)), UsageError);

  auto space = FiniteSpace::line({0.0, 0.5, 1.0});
  CHECK(space->size() == 3);
  CHECK(space->distance(0, 2) == doctest::Approx(1.0));
  CHECK(space->same_as(*FiniteSpace::line({0.0, 0.5, 1.0})));
}

TEST_CASE("measure construction and normalization") {
  auto space = FiniteSpace::two_point();
  Eigen::VectorXd w(2);
  w << 0.5, 0.5 + 4e-10;
  DiscreteMeasure m(space, w);
  CHECK(std::abs(m.weights().sum() - 1.0) <= 1e-12);

  w << 0.5, 0.6;
  CHECK_THROWS_AS(DiscreteMeasure(space, w), UsageError);
  w << -0.1, 1.1;
  CHECK_THROWS_AS(DiscreteMeasure(space, w), UsageError);

  auto delta = DiscreteMeasure::point_mass(space, 0);
  CHECK(delta(0) == 1.0);
  CHECK(delta(1) == 0.0);
  CHECK(delta.support() == std::vector<int>{0});
}

TEST_CASE("empirical measure is exact count over n") {
  auto space = FiniteSpace::two_point();
  const auto half = empirical_measure({0, 0, 1, 1}, space);
  CHECK(half(0) == 0.5);
  CHECK(half(1) == 0.5);

  const auto all_zero = empirical_measure(std::vector<int>(9, 0), space);
  CHECK(all_zero(0) == 1.0);

  const auto thirds = empirical_measure({0, 1, 1}, space);
  CHECK(thirds(0) == 1.0 / 3.0);
  CHECK(thirds(1) == 2.0 / 3.0);

  CHECK_THROWS_AS(empirical_measure({}, space), UsageError);
  CHECK_THROWS_AS(empirical_measure({7}, space), UsageError);
}

TEST_CASE("running counts match a fresh empirical measure") {
  auto space = FiniteSpace::line({0.0, 0.3, 1.0});
  RunningCounts counts(space);
  std::vector<int> sample;
  SplitStream stream(99, 0);
  for (int i = 0; i < 200; ++i) {
    const int x = static_cast<int>(stream.next_uniform() * 3) % 3;
    counts.add(x);
    sample.push_back(x);
    const auto fresh = empirical_measure(sample, space);
    CHECK(counts.measure().weights() == fresh.weights());
    CHECK(counts.tv_to(fresh) == 0.0);
  }
}

TEST_CASE("bl norm combines sup norm and lipschitz constant") {
  auto space = FiniteSpace::two_point(0.5);
  BLFunction f{Eigen::Vector2d(1.0, -1.0)};
  CHECK(sup_norm(f) == 1.0);
  CHECK(lipschitz_constant(f, *space) == doctest::Approx(4.0));
  CHECK(bl_norm(f, *space) == doctest::Approx(4.0));

  BLFunction constant{Eigen::Vector2d(0.7, 0.7)};
  CHECK(bl_norm(constant, *space) == doctest::Approx(0.7));
}

TEST_CASE("kl divergence basics") {
  auto space = FiniteSpace::two_point();
  const auto p8 = oracle::bernoulli(space, 0.8);
  const auto p5 = oracle::bernoulli(space, 0.5);

  CHECK(kl_divergence(p8, p8) == 0.0);
  // frozen from the two-term closed form evaluated in extended precision
  CHECK(std::abs(kl_divergence(p8, p5) - 0.1927447570217574) <= 1e-12);
  CHECK(std::abs(kl_divergence(p8, p5) -
                 oracle::kl_longdouble(p8.weights(), p5.weights())) <= 1e-15);

  // delta_0 against the half-half mixture: exactly log 2
  auto line = FiniteSpace::line({0.0, 0.25});
  auto q = DiscreteMeasure::point_mass(line, 0);
  Eigen::VectorXd w(2);
  w << 0.5, 0.5;
  DiscreteMeasure mix(line, w);
  CHECK(std::abs(kl_divergence(q, mix) - kLog2) <= 1e-15);

  // absolute continuity failure
  CHECK(std::isinf(kl_divergence(mix, q)));

  auto other_space = FiniteSpace::two_point(0.7);
  CHECK_THROWS_AS(kl_divergence(p8, DiscreteMeasure::uniform(other_space)),
                  UsageError);
}

TEST_CASE("tv distance basics") {
  auto space = FiniteSpace::two_point();
  const auto p8 = oracle::bernoulli(space, 0.8);
  const auto p5 = oracle::bernoulli(space, 0.5);
  CHECK(tv_distance(p5, p5) == 0.0);
  CHECK(std::abs(tv_distance(p8, p5) - 0.3) <= 1e-15);
  CHECK(tv_distance(DiscreteMeasure::point_mass(space, 0),
                    DiscreteMeasure::point_mass(space, 1)) == 1.0);
}

TEST_CASE("kl nonnegativity and identity over random pairs") {
  auto space3 = FiniteSpace::line({0.0, 0.4, 1.0});
  SplitStream stream(7, 1);
  for (int it = 0; it < 2000; ++it) {
    const auto m = oracle::random_measure(stream, space3, true);
    const auto n = oracle::random_measure(stream, space3, true);
    const double kl = kl_divergence(m, n);
    CHECK(kl >= 0.0);
    if (kl <= 1e-12) CHECK(tv_distance(m, n) <= 1e-5);
    CHECK(std::abs(kl_divergence(m, m)) <= 1e-15);
  }
}

TEST_CASE("pinsker inequality over random pairs") {
  auto space = FiniteSpace::line({0.0, 0.2, 0.7, 1.0});
  SplitStream stream(11, 2);
  for (int it = 0; it < 2000; ++it) {
    const auto m = oracle::random_measure(stream, space, true);
    const auto n = oracle::random_measure(stream, space, true);
    const double kl = kl_divergence(m, n);
    if (std::isinf(kl)) continue;
    CHECK(tv_distance(m, n) <= std::sqrt(kl / 2.0) + 1e-12);
  }
}

TEST_CASE("dv objective never beats the divergence and attains it") {
  auto space = FiniteSpace::line({0.0, 0.5, 1.0});
  SplitStream stream(13, 3);

  // constants cancel exactly
  const auto m0 = oracle::random_measure(stream, space);
  const auto n0 = oracle::random_measure(stream, space);
  BLFunction c{Eigen::Vector3d(2.3, 2.3, 2.3)};
  CHECK(std::abs(dv_objective(c, m0, n0)) <= 1e-12);

  for (int it = 0; it < 2000; ++it) {
    const auto m = oracle::random_measure(stream, space);
    const auto n = oracle::random_measure(stream, space);
    BLFunction f{Eigen::Vector3d(stream.next_uniform() * 6 - 3,
                                 stream.next_uniform() * 6 - 3,
                                 stream.next_uniform() * 6 - 3)};
    const double kl = kl_divergence(m, n);
    CHECK(dv_objective(f, m, n) <= kl + 1e-12);

    // the log-likelihood-ratio choice attains the supremum
    BLFunction opt{(m.weights().array() / n.weights().array()).log().matrix()};
    CHECK(std::abs(dv_objective(opt, m, n) - kl) <= 1e-9);
  }
}
