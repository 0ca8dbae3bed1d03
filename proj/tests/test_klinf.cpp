#include <doctest.h>

#include <cmath>

#include "oracle_helpers.hpp"
#include "powerone/errors.hpp"
#include "powerone/klinf.hpp"
#include "powerone/metrics.hpp"

using namespace powerone;

namespace {

const double kLog2 = std::log(2.0);

// The shrinking two-atom family: space {0} + {1/k}, nulls (delta_0 + delta_{1/k})/2.
struct TwoAtomFamily {
  SpacePtr space;
  std::vector<DiscreteMeasure> nulls;
  DiscreteMeasure q;

  explicit TwoAtomFamily(int levels)
      : space(make_space(levels)), q(DiscreteMeasure::point_mass(space, 0)) {
    for (int k = 1; k <= levels; ++k) {
      Eigen::VectorXd w = Eigen::VectorXd::Zero(space->size());
      w(0) = 0.5;
      w(k) = 0.5;
      nulls.emplace_back(space, w);
    }
  }

  static SpacePtr make_space(int levels) {
    std::vector<double> coords{0.0};
    for (int k = 1; k <= levels; ++k) coords.push_back(1.0 / k);
    return FiniteSpace::line(coords);
  }
};

}  // namespace

TEST_CASE("phi over a list: the shrinking two-atom family") {
  TwoAtomFamily family(6);
  NullClass nc(family.nulls, /*hull=*/false);

  const PhiResult phi = phi_klinf(family.q, nc);
  CHECK(!phi.infinite);
  CHECK(std::abs(phi.value - kLog2) <= 1e-15);
  CHECK(phi.gap == 0.0);

  // every generator sits at divergence zero from the class
  for (const auto& p : family.nulls) {
    const PhiResult at_gen = phi_klinf(p, nc);
    CHECK(at_gen.value == 0.0);
  }

  // ... while converging to q in the weak metric: the lsc failure witness
  double prev = oracle::kInf;
  for (const auto& p : family.nulls) {
    const double d = bl_distance(family.q, p);
    CHECK(d < prev);
    prev = d;
  }
  CHECK(prev <= 0.5 / 6 + 1e-9);
}

TEST_CASE("phi over a hull matches a fine grid oracle") {
  auto space = FiniteSpace::two_point();
  const auto r = oracle::bernoulli(space, 0.9);
  NullClass nc({oracle::bernoulli(space, 0.3), oracle::bernoulli(space, 0.6)},
               /*hull=*/true);

  // oracle: min over t of KL(Ber(0.9) || Ber(0.3 + 0.3 t)), step 1e-5
  double oracle_min = oracle::kInf;
  for (int i = 0; i <= 100000; ++i) {
    const double t = i * 1e-5;
    const auto mix = oracle::bernoulli(space, 0.3 + 0.3 * t);
    oracle_min = std::min(oracle_min, oracle::kl_longdouble(r.weights(), mix.weights()));
  }

  const PhiResult phi = phi_klinf(r, nc);
  CHECK(!phi.infinite);
  CHECK(phi.gap <= 1e-7);
  CHECK(std::abs(phi.value - oracle_min) <= 1e-6);
  CHECK(phi.certified_lower() <= oracle_min + 1e-12);
  // minimizer pushes all weight onto the closer generator
  CHECK(phi.mixture(1) >= 1.0 - 1e-6);
}

TEST_CASE("phi detects missing absolute continuity") {
  auto space = FiniteSpace::line({0.0, 0.5, 1.0});
  Eigen::VectorXd w(3);
  w << 0.5, 0.5, 0.0;
  const DiscreteMeasure g1(space, w);
  w << 0.8, 0.2, 0.0;
  const DiscreteMeasure g2(space, w);
  const auto r = DiscreteMeasure::point_mass(space, 2);

  for (bool hull : {false, true}) {
    NullClass nc({g1, g2}, hull);
    const PhiResult phi = phi_klinf(r, nc);
    CHECK(phi.infinite);
    CHECK(std::isinf(phi.value));
  }
}

TEST_CASE("phi over a hull never beats any sampled mixture") {
  SplitStream stream(31, 0);
  auto space = oracle::random_metric_space(stream, 3);
  for (int it = 0; it < 25; ++it) {
    std::vector<DiscreteMeasure> gens;
    for (int k = 0; k < 3; ++k) gens.push_back(oracle::random_measure(stream, space));
    NullClass nc(gens, /*hull=*/true);
    const auto r = oracle::random_measure(stream, space, true);
    const PhiResult phi = phi_klinf(r, nc);
    for (int s = 0; s < 30; ++s) {
      Eigen::VectorXd w(3);
      for (int k = 0; k < 3; ++k) w(k) = -std::log(1.0 - stream.next_uniform());
      w /= w.sum();
      CHECK(phi.certified_lower() <=
            oracle::kl_longdouble(r.weights(), nc.mixture(w).weights()) + 1e-9);
    }
  }
}

TEST_CASE("ball infimum matches a 1e-6 grid on the half-line example") {
  auto space = FiniteSpace::two_point();
  const auto p5 = oracle::bernoulli(space, 0.5);
  const Ball ball(DiscreteMeasure::point_mass(space, 0), 0.1, MetricKind::kTv);

  // oracle: min over r1 in [0, 0.1] of KL(Ber(r1) || Ber(0.5))
  double grid_min = oracle::kInf;
  for (int i = 0; i <= 100000; ++i) {
    const double r1 = i * 1e-6;
    const auto r = oracle::bernoulli(space, r1);
    grid_min = std::min(grid_min, oracle::kl_longdouble(r.weights(), p5.weights()));
  }

  const BallRateCertificate cert = inf_kl_over_ball(ball, p5);
  CHECK(!cert.infeasible);
  CHECK(std::abs(cert.value - grid_min) <= 1e-8);
  CHECK(cert.lower_bound <= grid_min + 1e-12);
  CHECK(cert.lower_bound >= grid_min - 1e-6);
  REQUIRE(cert.witness_r.has_value());
  CHECK(ball.contains(*cert.witness_r));
  // the frozen optimum: mass moves as close to the null as allowed
  CHECK(std::abs(cert.value - 0.3680642071684974) <= 1e-8);
}

TEST_CASE("ball infimum agrees with exhaustive simplex grids") {
  SplitStream stream(33, 0);
  for (int it = 0; it < 8; ++it) {
    auto space = oracle::random_metric_space(stream, 3);
    const auto p = oracle::random_measure(stream, space);
    const auto center = oracle::random_measure(stream, space, true);
    const double radius = 0.05 + 0.4 * stream.next_uniform();
    const MetricKind kind = it % 2 == 0 ? MetricKind::kTv : MetricKind::kBl;
    const Ball ball(center, radius, kind);

    const double grid = oracle::grid_min_kl_over_ball(ball, p, 1000);
    const BallRateCertificate cert = inf_kl_over_ball(ball, p);
    if (std::isinf(grid)) {
      // the grid found no dominated member; the solver must still certify
      CHECK(cert.lower_bound >= 0.0);
      continue;
    }
    CHECK(cert.value <= grid + 2e-3);
    CHECK(cert.lower_bound <= grid + 1e-9);
  }
}

TEST_CASE("ball infimum: monotone in radius, bounded by the center") {
  SplitStream stream(34, 0);
  auto space = oracle::random_metric_space(stream, 3);
  for (int it = 0; it < 10; ++it) {
    const auto p = oracle::random_measure(stream, space);
    const auto center = oracle::random_measure(stream, space, true);
    double prev = oracle::kInf;
    for (double radius : {0.05, 0.1, 0.2, 0.4}) {
      const Ball ball(center, radius, MetricKind::kTv);
      const BallRateCertificate cert = inf_kl_over_ball(ball, p);
      CHECK(cert.value <= prev + 1e-9);
      CHECK(cert.lower_bound <=
            oracle::kl_longdouble(center.weights(), p.weights()) + 1e-9);
      prev = cert.value;
    }
  }
}

TEST_CASE("ball infimum approaches the center divergence as radius shrinks") {
  auto space = FiniteSpace::line({0.0, 0.5, 1.0});
  SplitStream stream(35, 0);
  for (int it = 0; it < 6; ++it) {
    const auto p = oracle::random_measure(stream, space);
    const auto center = oracle::random_measure(stream, space);
    const double phi = oracle::kl_longdouble(center.weights(), p.weights());
    const Ball tiny(center, 1e-6, MetricKind::kTv);
    const BallRateCertificate cert = inf_kl_over_ball(tiny, p);
    CHECK(std::abs(cert.value - phi) <= 1e-4);
    CHECK(std::abs(cert.lower_bound - phi) <= 1e-4);
  }
}

TEST_CASE("ball infimum samples stay above the certified bound") {
  SplitStream stream(36, 0);
  auto space = oracle::random_metric_space(stream, 3);
  for (int it = 0; it < 10; ++it) {
    const auto p = oracle::random_measure(stream, space, true);
    const auto center = oracle::random_measure(stream, space);
    const Ball ball(center, 0.15 + 0.2 * stream.next_uniform(), MetricKind::kTv);
    const BallRateCertificate cert = inf_kl_over_ball(ball, p);
    // rejection-sample members of the ball
    int found = 0;
    for (int s = 0; s < 4000 && found < 200; ++s) {
      const auto r = oracle::random_measure(stream, space, true);
      if (!ball.contains(r)) continue;
      ++found;
      CHECK(oracle::kl_longdouble(r.weights(), p.weights()) >=
            cert.lower_bound - 1e-9);
    }
    CHECK(found > 0);
  }
}

TEST_CASE("class ball infimum flags intersection and handles hulls") {
  auto space = FiniteSpace::two_point();
  const auto p5 = oracle::bernoulli(space, 0.5);

  // a generator inside the ball forces rate zero with the flag set
  NullClass nc({p5}, false);
  const Ball wide(oracle::bernoulli(space, 0.45), 0.2, MetricKind::kTv);
  const BallRateCertificate cert = inf_phi_over_ball(wide, nc);
  CHECK(cert.ball_meets_class);
  CHECK(cert.lower_bound == 0.0);
  CHECK(cert.value == 0.0);

  // joint hull optimization against a 2-d grid oracle
  NullClass hull({oracle::bernoulli(space, 0.3), oracle::bernoulli(space, 0.6)},
                 true);
  const Ball ball(oracle::bernoulli(space, 0.9), 0.1, MetricKind::kTv);
  double grid = oracle::kInf;
  for (int i = 0; i <= 1000; ++i) {
    const auto r = oracle::bernoulli(space, 0.8 + 0.2 * i / 1000.0);
    for (int j = 0; j <= 1000; ++j) {
      const auto mix = oracle::bernoulli(space, 0.3 + 0.3 * j / 1000.0);
      grid = std::min(grid, oracle::kl_longdouble(r.weights(), mix.weights()));
    }
  }
  const BallRateCertificate joint = inf_phi_over_ball(ball, hull);
  CHECK(!joint.ball_meets_class);
  CHECK(std::abs(joint.value - grid) <= 2e-3);
  CHECK(joint.lower_bound <= grid + 1e-9);
  CHECK(joint.lower_bound >= grid - 2e-3);
}

TEST_CASE("separating ball certifies half the divergence by default") {
  auto space = FiniteSpace::two_point();
  NullClass nc({oracle::bernoulli(space, 0.5)}, false);
  const auto q = DiscreteMeasure::point_mass(space, 0);

  const SeparatingBall sep = choose_separating_ball(q, nc);
  CHECK(sep.rate >= 0.5 * kLog2 - 1e-12);
  CHECK(sep.ball.radius > 0.0);
  CHECK(!sep.certificate.ball_meets_class);

  CHECK_THROWS_AS(choose_separating_ball(oracle::bernoulli(space, 0.5), nc),
                  NoSeparationError);
}

TEST_CASE("separating ball falls back to an absolute rate when phi is infinite") {
  auto space = FiniteSpace::two_point();
  NullClass nc({DiscreteMeasure::point_mass(space, 1)}, false);
  const auto q = DiscreteMeasure::point_mass(space, 0);
  CHECK(phi_klinf(q, nc).infinite);

  const SeparatingBall sep = choose_separating_ball(q, nc);
  CHECK(sep.rate >= 1.0);

  const SeparatingBall strong = choose_ball_with_rate(q, nc, 7.5);
  CHECK(strong.rate >= 7.5);
}

TEST_CASE("absolute-rate ball search rejects unattainable rates") {
  auto space = FiniteSpace::two_point();
  NullClass nc({oracle::bernoulli(space, 0.5)}, false);
  const auto q = oracle::bernoulli(space, 0.9);
  // phi is about 0.368; a rate above it cannot be certified
  CHECK_THROWS_AS(choose_ball_with_rate(q, nc, 0.5), CertificationError);
  const SeparatingBall ok = choose_ball_with_rate(q, nc, 1.0 / 3.0);
  CHECK(ok.rate >= 1.0 / 3.0);
  CHECK(ok.ball.contains(q));
}
