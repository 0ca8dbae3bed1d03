#pragma once

// Independent test oracles: brute-force and closed-form routes kept free of
// the library's solver paths, so agreement is evidence rather than tautology.

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "powerone/measure.hpp"
#include "powerone/null_class.hpp"
#include "powerone/rng.hpp"

namespace oracle {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Two-term and general KL recomputed in extended precision.
inline double kl_longdouble(const Eigen::VectorXd& m, const Eigen::VectorXd& n) {
  long double acc = 0.0L;
  for (Eigen::Index x = 0; x < m.size(); ++x) {
    if (m(x) == 0.0) continue;
    if (n(x) == 0.0) return kInf;
    acc += static_cast<long double>(m(x)) *
           std::log(static_cast<long double>(m(x)) / n(x));
  }
  return static_cast<double>(acc);
}

inline double tv_longdouble(const Eigen::VectorXd& m, const Eigen::VectorXd& n) {
  long double acc = 0.0L;
  for (Eigen::Index x = 0; x < m.size(); ++x)
    acc += std::abs(static_cast<long double>(m(x)) - n(x));
  return static_cast<double>(acc / 2.0L);
}

/// Bernoulli(p) as a measure on a 2-point space: weight p on point 1.
inline powerone::DiscreteMeasure bernoulli(const powerone::SpacePtr& space,
                                           double p) {
  Eigen::VectorXd w(2);
  w << 1.0 - p, p;
  return powerone::DiscreteMeasure(space, w);
}

/// Exhaustive grid over the m-simplex with resolution 1/steps, calling
/// visit on every grid measure.
inline void for_each_simplex_grid_point(
    const powerone::SpacePtr& space, int steps,
    const std::function<void(const Eigen::VectorXd&)>& visit) {
  const int m = space->size();
  Eigen::VectorXd w(m);
  std::function<void(int, int)> rec = [&](int coord, int remaining) {
    if (coord == m - 1) {
      w(coord) = static_cast<double>(remaining) / steps;
      visit(w);
      return;
    }
    for (int c = 0; c <= remaining; ++c) {
      w(coord) = static_cast<double>(c) / steps;
      rec(coord + 1, remaining - c);
    }
  };
  rec(0, steps);
}

/// min of KL(R||p) over grid measures inside the ball.
inline double grid_min_kl_over_ball(const powerone::Ball& ball,
                                    const powerone::DiscreteMeasure& p,
                                    int steps) {
  double best = kInf;
  for_each_simplex_grid_point(p.space(), steps, [&](const Eigen::VectorXd& w) {
    powerone::DiscreteMeasure r(p.space(), w);
    if (!ball.contains(r)) return;
    best = std::min(best, kl_longdouble(w, p.weights()));
  });
  return best;
}

/// Random full or sparse measure from the library stream (test-case
/// generation only; the checked values never come from here).
inline powerone::DiscreteMeasure random_measure(powerone::SplitStream& stream,
                                                const powerone::SpacePtr& space,
                                                bool allow_zero = false) {
  const int m = space->size();
  Eigen::VectorXd w(m);
  for (int x = 0; x < m; ++x) w(x) = -std::log(1.0 - stream.next_uniform());
  if (allow_zero && stream.next_uniform() < 0.35) {
    const int drop = static_cast<int>(stream.next_uniform() * m) % m;
    w(drop) = 0.0;
  }
  w /= w.sum();
  return powerone::DiscreteMeasure(space, w);
}

/// Random metric space from points scattered in the unit square.
inline powerone::SpacePtr random_metric_space(powerone::SplitStream& stream,
                                              int m) {
  while (true) {
    std::vector<double> px(static_cast<size_t>(m)), py(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) {
      px[static_cast<size_t>(i)] = stream.next_uniform();
      py[static_cast<size_t>(i)] = stream.next_uniform();
    }
    Eigen::MatrixXd d(m, m);
    double min_gap = kInf;
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        d(i, j) = std::hypot(px[static_cast<size_t>(i)] - px[static_cast<size_t>(j)],
                             py[static_cast<size_t>(i)] - py[static_cast<size_t>(j)]);
        if (i != j) min_gap = std::min(min_gap, d(i, j));
      }
    }
    if (min_gap < 1e-3) continue;  // resample near-coincident points
    std::vector<std::string> labels;
    for (int i = 0; i < m; ++i) labels.push_back("x" + std::to_string(i));
    return powerone::FiniteSpace::make(std::move(labels), std::move(d));
  }
}

}  // namespace oracle
