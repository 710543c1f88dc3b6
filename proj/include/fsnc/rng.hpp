#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace fsnc {

/// Counter-free seeded generator (xoshiro256**) with splitmix64 seeding.
/// Every random decision in the project flows through this class so runs
/// are reproducible across platforms and thread counts.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  /// Independent stream derived from (master, index). Streams with
  /// different indices are statistically uncorrelated.
  static RngStream substream(std::uint64_t master, std::uint64_t index);

  std::uint64_t next_u64();

  /// Uniform integer in [0, n), n > 0. Unbiased (rejection sampling).
  std::uint64_t bounded(std::uint64_t n);

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double();

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi);

  /// Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(bounded(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  /// k distinct values from [0, n) in selection order (partial Fisher-Yates).
  std::vector<int> sample_without_replacement(int n, int k);

 private:
  std::array<std::uint64_t, 4> state_;
};

/// splitmix64 step: advances x and returns the next output.
std::uint64_t splitmix64(std::uint64_t& x);

/// Order-sensitive combiner for deriving seeds from structured inputs,
/// e.g. mix_seed({master, repeat, kDevStream, round}).
std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts);

}  // namespace fsnc
