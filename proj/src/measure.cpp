#include "powerone/measure.hpp"

#include <cassert>
#include <cmath>

#include "powerone/errors.hpp"

namespace powerone {

namespace {
constexpr double kSimplexTol = 1e-9;
}

DiscreteMeasure::DiscreteMeasure(SpacePtr space, Eigen::VectorXd weights)
    : space_(std::move(space)), weights_(std::move(weights)) {
  if (!space_) throw UsageError("measure needs a space");
  if (weights_.size() != space_->size())
    throw UsageError("weight vector length must match the space");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < weights_.size(); ++i) {
    const double w = weights_(i);
    if (!std::isfinite(w)) throw UsageError("weights must be finite");
    if (w < -kSimplexTol) throw UsageError("weights must be nonnegative");
    if (w < 0.0) weights_(i) = 0.0;
    sum += weights_(i);
  }
  if (std::abs(sum - 1.0) > kSimplexTol)
    throw UsageError("weights must sum to one (within 1e-9)");
  // renormalize, but keep already-exact inputs (empirical counts/n) bitwise
  if (std::abs(sum - 1.0) > 4e-16) weights_ /= sum;
  assert(std::abs(weights_.sum() - 1.0) <= 1e-12);
}

std::vector<int> DiscreteMeasure::support() const {
  std::vector<int> out;
  for (int i = 0; i < size(); ++i)
    if (weights_(i) > 0.0) out.push_back(i);
  return out;
}

DiscreteMeasure DiscreteMeasure::point_mass(SpacePtr space, int x) {
  if (!space || x < 0 || x >= space->size())
    throw UsageError("point_mass index out of range");
  Eigen::VectorXd w = Eigen::VectorXd::Zero(space->size());
  w(x) = 1.0;
  return DiscreteMeasure(std::move(space), std::move(w));
}

DiscreteMeasure DiscreteMeasure::uniform(SpacePtr space) {
  if (!space) throw UsageError("uniform needs a space");
  const int m = space->size();
  return DiscreteMeasure(std::move(space),
                         Eigen::VectorXd::Constant(m, 1.0 / m));
}

bool same_space(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  return a.space() == b.space() || a.space()->same_as(*b.space());
}

void require_same_space(const DiscreteMeasure& a, const DiscreteMeasure& b,
                        const char* where) {
  if (!same_space(a, b))
    throw UsageError(std::string(where) + ": measures live on different spaces");
}

DiscreteMeasure empirical_measure(const std::vector<int>& sample, SpacePtr space) {
  if (!space) throw UsageError("empirical_measure needs a space");
  if (sample.empty()) throw UsageError("empirical_measure: empty sample");
  Eigen::VectorXi counts = Eigen::VectorXi::Zero(space->size());
  for (int x : sample) {
    if (x < 0 || x >= space->size())
      throw UsageError("empirical_measure: sample index out of range");
    counts(x) += 1;
  }
  const double n = static_cast<double>(sample.size());
  Eigen::VectorXd w(space->size());
  for (int i = 0; i < space->size(); ++i) w(i) = counts(i) / n;
  return DiscreteMeasure(std::move(space), std::move(w));
}

RunningCounts::RunningCounts(SpacePtr space) : space_(std::move(space)) {
  if (!space_) throw UsageError("RunningCounts needs a space");
  counts_ = Eigen::VectorXi::Zero(space_->size());
}

void RunningCounts::add(int x) {
  assert(x >= 0 && x < space_->size());
  counts_(x) += 1;
  ++n_;
}

void RunningCounts::reset() {
  counts_.setZero();
  n_ = 0;
}

DiscreteMeasure RunningCounts::measure() const {
  if (n_ == 0) throw UsageError("RunningCounts: no observations yet");
  Eigen::VectorXd w(space_->size());
  const double n = static_cast<double>(n_);
  for (int i = 0; i < space_->size(); ++i) w(i) = counts_(i) / n;
  return DiscreteMeasure(space_, std::move(w));
}

double RunningCounts::tv_to(const DiscreteMeasure& q) const {
  assert(n_ > 0);
  const double n = static_cast<double>(n_);
  double acc = 0.0;
  for (int i = 0; i < space_->size(); ++i)
    acc += std::abs(counts_(i) / n - q(i));
  return 0.5 * acc;
}

double sup_norm(const BLFunction& f) {
  return f.values.size() == 0 ? 0.0 : f.values.cwiseAbs().maxCoeff();
}

double lipschitz_constant(const BLFunction& f, const FiniteSpace& space) {
  if (f.values.size() != space.size())
    throw UsageError("bl function length must match the space");
  double lip = 0.0;
  for (int x = 0; x < space.size(); ++x)
    for (int y = x + 1; y < space.size(); ++y)
      lip = std::max(lip, std::abs(f.values(x) - f.values(y)) / space.distance(x, y));
  return lip;
}

double bl_norm(const BLFunction& f, const FiniteSpace& space) {
  return std::max(sup_norm(f), lipschitz_constant(f, space));
}

}  // namespace powerone
