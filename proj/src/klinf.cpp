#include "powerone/klinf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "powerone/errors.hpp"
#include "powerone/metrics.hpp"
#include "powerone/simplex.hpp"

namespace powerone {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Slack subtracted from every certified lower bound. Covers the linear
// oracle's LP tolerance and the gradient floor below.
constexpr double kCertMargin = 1e-9;
constexpr double kGradFloor = 1e-250;

double relative_entropy(const Eigen::VectorXd& r, const Eigen::VectorXd& p) {
  double acc = 0.0;
  for (Eigen::Index x = 0; x < r.size(); ++x) {
    if (r(x) <= 0.0) continue;
    if (p(x) <= 0.0) return kInf;
    acc += r(x) * std::log(r(x) / p(x));
  }
  return acc;
}

/**
 * Linear-minimization oracle over
 *   { R in simplex : dist(center, R) <= radius, R_x = 0 off `allowed` }.
 * TV balls are solved by an exact mass-moving greedy; BL balls by a small
 * transport linear program with cost min(d, 2).
 */
class BallRegion {
 public:
  BallRegion(const Ball& ball, std::vector<char> allowed)
      : ball_(ball), allowed_(std::move(allowed)) {
    const int m = ball_.center.size();
    for (int x = 0; x < m; ++x)
      if (!allowed_[static_cast<size_t>(x)]) banned_mass_ += ball_.center(x);
  }

  std::optional<Eigen::VectorXd> minimize(const Eigen::VectorXd& z) const {
    return ball_.metric == MetricKind::kTv ? minimize_tv(z) : minimize_bl(z);
  }

  bool feasible() const {
    const int m = ball_.center.size();
    return minimize(Eigen::VectorXd::Zero(m)).has_value();
  }

 private:
  std::optional<Eigen::VectorXd> minimize_tv(const Eigen::VectorXd& z) const {
    const int m = ball_.center.size();
    if (banned_mass_ > ball_.radius + 1e-15) return std::nullopt;

    int best = -1;
    for (int x = 0; x < m; ++x) {
      if (!allowed_[static_cast<size_t>(x)]) continue;
      if (best < 0 || z(x) < z(best)) best = x;
    }
    if (best < 0) return std::nullopt;

    Eigen::VectorXd r = Eigen::VectorXd::Zero(m);
    for (int x = 0; x < m; ++x)
      if (allowed_[static_cast<size_t>(x)]) r(x) = ball_.center(x);
    r(best) += banned_mass_;
    double budget = ball_.radius - banned_mass_;

    // donors from the largest z down, smallest index first on ties
    std::vector<int> order;
    for (int x = 0; x < m; ++x)
      if (allowed_[static_cast<size_t>(x)] && x != best) order.push_back(x);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (z(a) != z(b)) return z(a) > z(b);
      return a < b;
    });
    for (int d : order) {
      if (budget <= 0.0) break;
      if (z(d) <= z(best)) break;
      const double amount = std::min(budget, r(d));
      r(d) -= amount;
      r(best) += amount;
      budget -= amount;
    }
    return r;
  }

  std::optional<Eigen::VectorXd> minimize_bl(const Eigen::VectorXd& z) const {
    const int m = ball_.center.size();
    const FiniteSpace& space = *ball_.center.space();
    std::vector<int> cols;
    for (int y = 0; y < m; ++y)
      if (allowed_[static_cast<size_t>(y)]) cols.push_back(y);
    const int nc = static_cast<int>(cols.size());
    if (nc == 0) return std::nullopt;

    // variables pi[x][j] (j indexes allowed destination columns)
    const int nv = m * nc;
    LinearProgram lp;
    lp.c = Eigen::VectorXd::Zero(nv);
    for (int x = 0; x < m; ++x)
      for (int j = 0; j < nc; ++j) lp.c(x * nc + j) = z(cols[static_cast<size_t>(j)]);
    lp.a_eq = Eigen::MatrixXd::Zero(m, nv);
    lp.b_eq = Eigen::VectorXd::Zero(m);
    for (int x = 0; x < m; ++x) {
      for (int j = 0; j < nc; ++j) lp.a_eq(x, x * nc + j) = 1.0;
      lp.b_eq(x) = ball_.center(x);
    }
    lp.a_ub = Eigen::MatrixXd::Zero(1, nv);
    for (int x = 0; x < m; ++x)
      for (int j = 0; j < nc; ++j)
        lp.a_ub(0, x * nc + j) =
            std::min(space.distance(x, cols[static_cast<size_t>(j)]), 2.0);
    lp.b_ub = Eigen::VectorXd::Constant(1, ball_.radius);

    const LpSolution sol = solve_lp(lp);
    if (sol.status != LpStatus::kOptimal) return std::nullopt;
    Eigen::VectorXd r = Eigen::VectorXd::Zero(m);
    for (int x = 0; x < m; ++x)
      for (int j = 0; j < nc; ++j) r(cols[static_cast<size_t>(j)]) += sol.x(x * nc + j);
    // scrub tiny LP noise and renormalize
    for (int y = 0; y < m; ++y) r(y) = std::max(r(y), 0.0);
    const double total = r.sum();
    if (total > 0.0) r /= total;
    return r;
  }

  const Ball& ball_;
  std::vector<char> allowed_;
  double banned_mass_ = 0.0;
};

// Feasible, reasonably central starting point: average of the
// per-coordinate maximizers (each an oracle call with objective -e_x).
Eigen::VectorXd central_start(const BallRegion& region,
                              const std::vector<char>& allowed, int m,
                              const Eigen::VectorXd& probe) {
  Eigen::VectorXd start = probe;
  int count = 1;
  Eigen::VectorXd z = Eigen::VectorXd::Zero(m);
  for (int x = 0; x < m; ++x) {
    if (!allowed[static_cast<size_t>(x)]) continue;
    z.setZero();
    z(x) = -1.0;
    if (auto v = region.minimize(z); v.has_value() && (*v)(x) > 0.0) {
      start += *v;
      ++count;
    }
  }
  return start / count;
}

double floored_log_ratio(double r, double p) {
  return std::log(std::max(r, kGradFloor) / p);
}

// Exact line search for convex phi(gamma) with monotone derivative dphi,
// restricted to [0, gamma_max].
template <typename Dphi>
double bisect_line_search(Dphi&& dphi, double gamma_max) {
  if (dphi(gamma_max) <= 0.0) return gamma_max;
  double lo = 0.0, hi = gamma_max;
  for (int it = 0; it < 70; ++it) {
    const double mid = 0.5 * (lo + hi);
    (dphi(mid) <= 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double PhiResult::certified_lower() const {
  if (infinite) return kInf;
  return std::max(value - gap, 0.0);
}

PhiResult phi_klinf(const DiscreteMeasure& r, const NullClass& nc,
                    const KlinfOptions& options) {
  require_same_space(r, nc.generators().front(), "phi_klinf");
  const int g = nc.count();

  PhiResult out;
  out.mixture = Eigen::VectorXd::Zero(g);

  if (!nc.hull()) {
    double best = kInf;
    int best_k = -1;
    for (int k = 0; k < g; ++k) {
      const double v = kl_divergence(r, nc.generators()[static_cast<size_t>(k)]);
      if (v < best) {
        best = v;
        best_k = k;
      }
    }
    if (best_k < 0 || std::isinf(best)) {
      out.infinite = true;
      out.value = kInf;
      return out;
    }
    out.value = best;
    out.argmin_index = best_k;
    out.mixture(best_k) = 1.0;
    return out;
  }

  // Hull class. Infinite iff some point of supp(r) is outside every
  // generator's support.
  const int m = r.size();
  Eigen::MatrixXd gen(m, g);
  for (int k = 0; k < g; ++k) gen.col(k) = nc.generators()[static_cast<size_t>(k)].weights();
  for (int x = 0; x < m; ++x) {
    if (r(x) > 0.0 && gen.row(x).maxCoeff() <= 0.0) {
      out.infinite = true;
      out.value = kInf;
      return out;
    }
  }

  // Exact zero if r coincides with a generator.
  for (int k = 0; k < g; ++k) {
    if (kl_divergence(r, nc.generators()[static_cast<size_t>(k)]) == 0.0) {
      out.value = 0.0;
      out.argmin_index = k;
      out.mixture(k) = 1.0;
      return out;
    }
  }

  // Multiplicative mixture-weight updates: w_i <- w_i * g_i with
  // g_i = sum_x r_x P_i(x) / N_x and N = sum w_i P_i. The first-order gap
  // max_i g_i - 1 bounds the remaining suboptimality.
  Eigen::VectorXd w = Eigen::VectorXd::Constant(g, 1.0 / g);
  Eigen::VectorXd score(g);
  double gap = kInf;
  for (int it = 0; it < options.max_iterations; ++it) {
    const Eigen::VectorXd n = gen * w;
    score.setZero();
    for (int x = 0; x < m; ++x) {
      if (r(x) <= 0.0) continue;
      score += (r(x) / n(x)) * gen.row(x).transpose();
    }
    gap = score.maxCoeff() - 1.0;
    if (gap <= options.tol) break;
    w = w.cwiseProduct(score);
    w /= w.sum();
  }
  out.value = relative_entropy(r.weights(), gen * w);
  out.gap = std::max(gap, 0.0);
  out.mixture = w;
  return out;
}

BallRateCertificate inf_kl_over_ball(const Ball& ball, const DiscreteMeasure& p,
                                     const KlinfOptions& options) {
  require_same_space(ball.center, p, "inf_kl_over_ball");
  const int m = p.size();

  std::vector<char> allowed(static_cast<size_t>(m), 0);
  for (int x = 0; x < m; ++x) allowed[static_cast<size_t>(x)] = p(x) > 0.0 ? 1 : 0;
  BallRegion region(ball, allowed);

  BallRateCertificate out;
  const auto probe = region.minimize(Eigen::VectorXd::Zero(m));
  if (!probe.has_value()) {
    out.infeasible = true;
    out.lower_bound = kInf;
    out.value = kInf;
    out.witness_p = p;
    return out;
  }

  Eigen::VectorXd r = central_start(region, allowed, m, *probe);
  double best_value = kInf;
  Eigen::VectorXd best_r = r;
  double lower = 0.0;

  Eigen::VectorXd grad(m);
  const Eigen::VectorXd& pw = p.weights();
  for (int it = 0; it < options.max_iterations; ++it) {
    for (int x = 0; x < m; ++x)
      grad(x) = allowed[static_cast<size_t>(x)] ? floored_log_ratio(r(x), pw(x)) + 1.0 : 0.0;
    const auto s_opt = region.minimize(grad);
    if (!s_opt.has_value()) break;  // cannot happen once feasible
    const Eigen::VectorXd& s = *s_opt;
    const double value = relative_entropy(r, pw);
    const double gap = grad.dot(r - s);
    if (value < best_value) {
      best_value = value;
      best_r = r;
    }
    lower = std::max(lower, value - gap - kCertMargin);
    if (gap <= options.tol) break;

    const Eigen::VectorXd delta = s - r;
    const double gamma = bisect_line_search(
        [&](double t) {
          double d = 0.0;
          for (int x = 0; x < m; ++x) {
            if (delta(x) == 0.0) continue;
            d += delta(x) * floored_log_ratio(r(x) + t * delta(x), pw(x));
          }
          return d;
        },
        1.0 - 1e-12);
    r += gamma * delta;
    for (int x = 0; x < m; ++x) r(x) = std::max(r(x), 0.0);
    r /= r.sum();
  }

  out.value = best_value;
  out.lower_bound = std::min(std::max(lower, 0.0), best_value);
  out.gap = out.value - out.lower_bound;
  out.witness_r = DiscreteMeasure(p.space(), best_r);
  out.witness_p = p;
  return out;
}

namespace {

BallRateCertificate inf_phi_over_ball_hull(const Ball& ball,
                                           const NullClass& nc,
                                           const KlinfOptions& options) {
  const int m = ball.center.size();
  const int g = nc.count();
  Eigen::MatrixXd gen(m, g);
  for (int k = 0; k < g; ++k) gen.col(k) = nc.generators()[static_cast<size_t>(k)].weights();

  std::vector<char> allowed(static_cast<size_t>(m), 0);
  for (int x = 0; x < m; ++x)
    allowed[static_cast<size_t>(x)] = gen.row(x).maxCoeff() > 0.0 ? 1 : 0;
  BallRegion region(ball, allowed);

  BallRateCertificate out;
  const auto probe = region.minimize(Eigen::VectorXd::Zero(m));
  if (!probe.has_value()) {
    out.infeasible = true;
    out.lower_bound = kInf;
    out.value = kInf;
    return out;
  }

  Eigen::VectorXd r = central_start(region, allowed, m, *probe);
  Eigen::VectorXd w = Eigen::VectorXd::Constant(g, 1.0 / g);
  double best_value = kInf;
  Eigen::VectorXd best_r = r, best_w = w;
  double lower = 0.0;

  Eigen::VectorXd grad_r(m), grad_w(g);
  for (int it = 0; it < options.max_iterations; ++it) {
    const Eigen::VectorXd n = gen * w;
    for (int x = 0; x < m; ++x)
      grad_r(x) = allowed[static_cast<size_t>(x)]
                      ? floored_log_ratio(r(x), n(x)) + 1.0
                      : 0.0;
    grad_w.setZero();
    for (int x = 0; x < m; ++x) {
      if (r(x) <= 0.0) continue;
      grad_w -= (r(x) / n(x)) * gen.row(x).transpose();
    }
    const auto s_opt = region.minimize(grad_r);
    if (!s_opt.has_value()) break;
    const Eigen::VectorXd& s_r = *s_opt;
    int best_k = 0;
    for (int k = 1; k < g; ++k)
      if (grad_w(k) < grad_w(best_k)) best_k = k;
    Eigen::VectorXd s_w = Eigen::VectorXd::Zero(g);
    s_w(best_k) = 1.0;

    const double value = relative_entropy(r, n);
    const double gap = grad_r.dot(r - s_r) + grad_w.dot(w - s_w);
    if (value < best_value) {
      best_value = value;
      best_r = r;
      best_w = w;
    }
    lower = std::max(lower, value - gap - kCertMargin);
    if (gap <= options.tol) break;

    const Eigen::VectorXd dr = s_r - r;
    const Eigen::VectorXd dw = s_w - w;
    const Eigen::VectorXd dn = gen * dw;
    const double gamma = bisect_line_search(
        [&](double t) {
          double d = 0.0;
          for (int x = 0; x < m; ++x) {
            const double rx = r(x) + t * dr(x);
            const double nx = n(x) + t * dn(x);
            if (dr(x) != 0.0)
              d += dr(x) * (floored_log_ratio(rx, 1.0) - std::log(std::max(nx, kGradFloor)));
            if (dn(x) != 0.0 && rx > 0.0) d -= rx * dn(x) / std::max(nx, kGradFloor);
          }
          return d;
        },
        1.0 - 1e-12);
    r += gamma * dr;
    for (int x = 0; x < m; ++x) r(x) = std::max(r(x), 0.0);
    r /= r.sum();
    w += gamma * dw;
    for (int k = 0; k < g; ++k) w(k) = std::max(w(k), 0.0);
    w /= w.sum();
  }

  out.value = best_value;
  out.lower_bound = std::min(std::max(lower, 0.0), best_value);
  out.gap = out.value - out.lower_bound;
  out.witness_r = DiscreteMeasure(ball.center.space(), best_r);
  out.witness_mixture = best_w;
  out.witness_p = nc.mixture(best_w);
  return out;
}

}  // namespace

BallRateCertificate inf_phi_over_ball(const Ball& ball, const NullClass& nc,
                                      const KlinfOptions& options) {
  require_same_space(ball.center, nc.generators().front(), "inf_phi_over_ball");

  // A ball that meets the class has infimum zero: R = P at any common point.
  Eigen::VectorXd near_w;
  const double class_dist = distance_to_class(ball.center, nc, ball.metric, &near_w);
  if (class_dist <= ball.radius) {
    BallRateCertificate out;
    out.ball_meets_class = true;
    out.lower_bound = 0.0;
    out.value = 0.0;
    out.gap = 0.0;
    out.witness_mixture = near_w;
    out.witness_p = nc.mixture(near_w);
    out.witness_r = out.witness_p;
    return out;
  }

  if (nc.hull()) return inf_phi_over_ball_hull(ball, nc, options);

  // min over generators: the bound of a minimum is the minimum of bounds,
  // the witness pair comes from the best value found.
  BallRateCertificate best;
  double lower = std::numeric_limits<double>::infinity();
  bool first = true;
  for (int k = 0; k < nc.count(); ++k) {
    BallRateCertificate cert =
        inf_kl_over_ball(ball, nc.generators()[static_cast<size_t>(k)], options);
    lower = std::min(lower, cert.lower_bound);
    if (first || cert.value < best.value) {
      best = std::move(cert);
      best.witness_mixture = Eigen::VectorXd::Zero(nc.count());
      best.witness_mixture(k) = 1.0;
      first = false;
    }
  }
  best.infeasible = std::isinf(lower) && std::isinf(best.value);
  best.lower_bound = std::min(lower, best.value);
  best.gap = std::isinf(best.value) ? 0.0 : best.value - best.lower_bound;
  return best;
}

namespace {

SeparatingBall search_ball(const DiscreteMeasure& q, const NullClass& nc,
                           double target_rate, MetricKind metric,
                           const KlinfOptions& options) {
  const double class_dist = distance_to_class(q, nc, metric);
  if (!(class_dist > 0.0))
    throw NoSeparationError("separating ball: center lies in the class");

  const auto certify = [&](double radius) -> std::optional<BallRateCertificate> {
    Ball ball(q, radius, metric, /*closed=*/true);
    BallRateCertificate cert = inf_phi_over_ball(ball, nc, options);
    if (cert.ball_meets_class || cert.lower_bound < target_rate)
      return std::nullopt;
    return cert;
  };

  double radius = class_dist / 2.0;
  for (int halving = 0; halving < 60; ++halving) {
    auto cert = certify(radius);
    if (cert.has_value()) {
      // widen within the bracket: the largest certifiable radius gives the
      // best power at the same certified rate
      double lo = radius;
      double hi = std::min(2.0 * radius, class_dist);
      BallRateCertificate best = std::move(*cert);
      for (int refine = 0; refine < 6 && hi - lo > 1e-9 * class_dist;
           ++refine) {
        const double mid = 0.5 * (lo + hi);
        if (auto wide = certify(mid); wide.has_value()) {
          lo = mid;
          best = std::move(*wide);
        } else {
          hi = mid;
        }
      }
      return SeparatingBall{Ball(q, lo, metric, true), best.lower_bound,
                            std::move(best)};
    }
    radius /= 2.0;
  }
  throw CertificationError(
      "separating ball: could not certify the requested rate");
}

}  // namespace

SeparatingBall choose_separating_ball(const DiscreteMeasure& q,
                                      const NullClass& nc,
                                      double target_fraction, MetricKind metric,
                                      const KlinfOptions& options) {
  if (!(target_fraction > 0.0 && target_fraction < 1.0))
    throw UsageError("target fraction must lie in (0, 1)");
  const PhiResult phi = phi_klinf(q, nc, options);
  if (phi.infinite)
    return choose_ball_with_rate(q, nc, 1.0, metric, options);
  if (phi.value <= 1e-12)
    throw NoSeparationError(
        "choose_separating_ball: the alternative has zero divergence from "
        "the class; no power-one test of level below one exists");
  return search_ball(q, nc, target_fraction * phi.value, metric, options);
}

SeparatingBall choose_ball_with_rate(const DiscreteMeasure& q,
                                     const NullClass& nc, double target_rate,
                                     MetricKind metric,
                                     const KlinfOptions& options) {
  if (!(target_rate > 0.0)) throw UsageError("target rate must be positive");
  const PhiResult phi = phi_klinf(q, nc, options);
  if (!phi.infinite && phi.value <= target_rate)
    throw CertificationError(
        "choose_ball_with_rate: target rate is at or above the divergence of "
        "the center, so no ball around it can be certified");
  return search_ball(q, nc, target_rate, metric, options);
}

}  // namespace powerone
