#include "powerone/rng.hpp"

#include "powerone/errors.hpp"

namespace powerone {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

SplitStream::SplitStream(std::uint64_t seed, std::uint64_t stream)
    : key_(mix64(seed ^ mix64(stream ^ 0xA5A5A5A5A5A5A5A5ULL))) {}

std::uint64_t SplitStream::next_u64() {
  return mix64(key_ + 0x9E3779B97F4A7C15ULL * ++counter_);
}

double SplitStream::next_uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

int SplitStream::next_index(const DiscreteMeasure& m) {
  const double u = next_uniform();
  double acc = 0.0;
  const int last = m.size() - 1;
  for (int x = 0; x < last; ++x) {
    acc += m(x);
    if (u < acc) return x;
  }
  return last;
}

std::vector<int> sample_iid(const DiscreteMeasure& m, int n, std::uint64_t seed,
                            std::uint64_t stream) {
  if (n < 1) throw UsageError("sample_iid: need n >= 1");
  SplitStream rng(seed, stream);
  std::vector<int> path(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) path[static_cast<size_t>(i)] = rng.next_index(m);
  return path;
}

}  // namespace powerone
