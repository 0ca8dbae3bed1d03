#pragma once

#include <functional>
#include <memory>

namespace powerone {

/**
 * A nonnegative adapted process evaluated incrementally along a data path.
 * Implementations keep their running state in log domain where values can
 * exceed the double range; value() then returns +infinity while
 * log_value() stays exact.
 */
class EProcess {
 public:
  virtual ~EProcess() = default;

  /// Feed the next observation (a point index); returns the updated value.
  virtual double step(int x) = 0;

  virtual double value() const = 0;

  /// log of the current value; -infinity when the value is zero.
  virtual double log_value() const = 0;

  virtual int time() const = 0;

  virtual std::unique_ptr<EProcess> clone() const = 0;
};

/// Produces a fresh process instance at time zero.
using EProcessFactory = std::function<std::unique_ptr<EProcess>()>;

}  // namespace powerone
