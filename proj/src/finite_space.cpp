#include "powerone/finite_space.hpp"

#include <cmath>
#include <sstream>

#include "powerone/errors.hpp"

namespace powerone {

namespace {
constexpr double kSymmetryTol = 1e-12;
constexpr double kTriangleTol = 1e-12;
}  // namespace

FiniteSpace::FiniteSpace(std::vector<std::string> labels, Eigen::MatrixXd metric)
    : labels_(std::move(labels)), metric_(std::move(metric)) {
  const int m = static_cast<int>(labels_.size());
  if (m < 2) throw UsageError("FiniteSpace needs at least 2 points");
  if (metric_.rows() != m || metric_.cols() != m)
    throw UsageError("metric matrix must be m x m");
  for (int x = 0; x < m; ++x) {
    if (std::abs(metric_(x, x)) > 0.0)
      throw UsageError("metric diagonal must be exactly zero");
    for (int y = 0; y < m; ++y) {
      if (!std::isfinite(metric_(x, y)) || metric_(x, y) < 0.0)
        throw UsageError("metric entries must be finite and nonnegative");
      if (x != y && metric_(x, y) <= 0.0)
        throw UsageError("distinct points must have positive distance");
      if (std::abs(metric_(x, y) - metric_(y, x)) > kSymmetryTol)
        throw UsageError("metric must be symmetric");
    }
  }
  // exact symmetry after the tolerance check
  metric_ = ((metric_ + metric_.transpose()) / 2.0).eval();
  for (int x = 0; x < m; ++x)
    for (int y = 0; y < m; ++y)
      for (int z = 0; z < m; ++z)
        if (metric_(x, y) > metric_(x, z) + metric_(z, y) + kTriangleTol)
          throw UsageError("metric violates the triangle inequality");
}

bool FiniteSpace::same_as(const FiniteSpace& other) const {
  if (this == &other) return true;
  if (labels_ != other.labels_) return false;
  return metric_ == other.metric_;
}

std::shared_ptr<const FiniteSpace> FiniteSpace::make(
    std::vector<std::string> labels, Eigen::MatrixXd metric) {
  return std::make_shared<const FiniteSpace>(std::move(labels), std::move(metric));
}

std::shared_ptr<const FiniteSpace> FiniteSpace::two_point(double gap) {
  Eigen::MatrixXd d(2, 2);
  d << 0.0, gap, gap, 0.0;
  return make({"0", "1"}, d);
}

std::shared_ptr<const FiniteSpace> FiniteSpace::line(
    const std::vector<double>& coords) {
  const int m = static_cast<int>(coords.size());
  std::vector<std::string> labels;
  labels.reserve(coords.size());
  for (double c : coords) {
    std::ostringstream os;
    os << c;
    labels.push_back(os.str());
  }
  Eigen::MatrixXd d(m, m);
  for (int x = 0; x < m; ++x)
    for (int y = 0; y < m; ++y) d(x, y) = std::abs(coords[static_cast<size_t>(x)] - coords[static_cast<size_t>(y)]);
  return make(std::move(labels), std::move(d));
}

}  // namespace powerone
