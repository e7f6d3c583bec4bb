#pragma once

#include <cstdint>
#include <random>

namespace gossiplab {

enum class StreamPurpose : std::uint32_t {
  selection = 1,
  communication = 2,
  initial_state = 3,
  verification = 4,
};

/// Seeded draw source keyed by (master seed, trial index, purpose). Equal keys
/// replay equal draws; distinct keys give independently seeded engines.
class RandomStream {
 public:
  RandomStream(std::uint64_t master_seed, std::uint64_t trial, StreamPurpose purpose) {
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32),
                      static_cast<std::uint32_t>(purpose)};
    engine_.seed(seq);
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform integer in [0, bound).
  int index(int bound) {
    const int v = static_cast<int>(uniform() * bound);
    return v < bound ? v : bound - 1;
  }

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace gossiplab
