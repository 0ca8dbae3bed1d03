#include "powerone/divergences.hpp"

#include <cmath>
#include <limits>

#include "powerone/errors.hpp"

namespace powerone {

double kl_divergence(const DiscreteMeasure& m, const DiscreteMeasure& n) {
  require_same_space(m, n, "kl_divergence");
  double acc = 0.0;
  for (int x = 0; x < m.size(); ++x) {
    const double mx = m(x);
    if (mx == 0.0) continue;
    const double nx = n(x);
    if (nx == 0.0) return std::numeric_limits<double>::infinity();
    acc += mx * std::log(mx / nx);
  }
  return std::max(acc, 0.0);
}

double dv_objective(const BLFunction& f, const DiscreteMeasure& m,
                    const DiscreteMeasure& n) {
  require_same_space(m, n, "dv_objective");
  if (f.values.size() != m.size())
    throw UsageError("dv_objective: function length must match the space");
  for (Eigen::Index i = 0; i < f.values.size(); ++i)
    if (!std::isfinite(f.values(i)))
      throw UsageError("dv_objective: f must be finite-valued");

  const double mean_m = f.values.dot(m.weights());

  // log sum_x e^{f(x)} n(x), shifted by the max over the support of n
  double shift = -std::numeric_limits<double>::infinity();
  for (int x = 0; x < n.size(); ++x)
    if (n(x) > 0.0) shift = std::max(shift, f.values(x));
  double acc = 0.0;
  for (int x = 0; x < n.size(); ++x)
    if (n(x) > 0.0) acc += n(x) * std::exp(f.values(x) - shift);
  return mean_m - (shift + std::log(acc));
}

}  // namespace powerone
