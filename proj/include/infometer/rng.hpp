#pragma once

#include <cstdint>
#include <random>

namespace infometer {

/// Master seed plus the substream rule: replicate r draws from stream (seed, r).
struct RngSeed {
  std::uint64_t master = 0;

  /// Seed for replicate `index`; independent of the order replicates are run in.
  std::uint64_t substream(std::uint64_t index) const noexcept;
  /// Seed for a named purpose (jitter, simulation, ...) under this master.
  std::uint64_t derive(std::uint64_t tag, std::uint64_t index = 0) const noexcept;

  friend bool operator==(const RngSeed&, const RngSeed&) = default;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// 64-bit Mersenne twister with portable uniform/normal draws, so simulated
/// data is identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform integer on [0, n).
  std::uint64_t below(std::uint64_t n);
  /// Standard normal (Marsaglia polar method, no cached spare).
  double normal();
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace infometer
