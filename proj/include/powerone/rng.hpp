#pragma once

#include <cstdint>

#include "powerone/measure.hpp"

namespace powerone {

/// 64-bit finalizer with full avalanche; the core of the counter scheme.
std::uint64_t mix64(std::uint64_t x);

/**
 * Counter-based random stream keyed by (seed, stream id). Stateless apart
 * from the counter: draw i of stream s under seed is a pure function of
 * (seed, s, i), so any trial of any experiment is reproducible in
 * isolation and independent of scheduling.
 */
class SplitStream {
 public:
  SplitStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();

  /// Uniform double in [0, 1) with 53 random bits.
  double next_uniform();

  /// One draw from the measure by inverse CDF over the weight vector.
  int next_index(const DiscreteMeasure& m);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// n iid draws from the measure on stream (seed, stream id); bitwise
/// reproducible.
std::vector<int> sample_iid(const DiscreteMeasure& m, int n,
                            std::uint64_t seed, std::uint64_t stream);

}  // namespace powerone
