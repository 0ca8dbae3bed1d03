#pragma once

#include <Eigen/Dense>

#include <memory>
#include <string>
#include <vector>

namespace powerone {

/**
 * A finite labeled metric space.
 *
 * Every measure in this library lives on one of these. The metric matrix
 * must be symmetric with zero diagonal, strictly positive off the diagonal,
 * and satisfy the triangle inequality; the constructor validates all of
 * this and throws UsageError otherwise.
 */
class FiniteSpace {
 public:
  FiniteSpace(std::vector<std::string> labels, Eigen::MatrixXd metric);

  int size() const { return static_cast<int>(labels_.size()); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(int x) const { return labels_[static_cast<size_t>(x)]; }
  const Eigen::MatrixXd& metric() const { return metric_; }
  double distance(int x, int y) const { return metric_(x, y); }

  /// Content equality (labels and metric entries), not pointer identity.
  bool same_as(const FiniteSpace& other) const;

  static std::shared_ptr<const FiniteSpace> make(std::vector<std::string> labels,
                                                 Eigen::MatrixXd metric);

  /// Two points at the given distance, labeled "0" and "1".
  static std::shared_ptr<const FiniteSpace> two_point(double gap = 1.0);

  /// Points on the real line; metric is |x_i - x_j|, labels are the
  /// coordinates printed.
  static std::shared_ptr<const FiniteSpace> line(const std::vector<double>& coords);

 private:
  std::vector<std::string> labels_;
  Eigen::MatrixXd metric_;
};

using SpacePtr = std::shared_ptr<const FiniteSpace>;

}  // namespace powerone
