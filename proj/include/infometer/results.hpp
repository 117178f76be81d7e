#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "infometer/rng.hpp"

namespace infometer {

enum class SurrogateMethod { TimeShift, Permutation };
const char* to_string(SurrogateMethod m) noexcept;

/// Outcome of a surrogate test. p_value = (1 + #{null >= observed}) / (S + 1).
struct SignificanceResult {
  double observed = 0.0;
  std::vector<double> null_samples;
  double p_value = 1.0;
  SurrogateMethod method = SurrogateMethod::TimeShift;
  std::size_t surrogates = 0;
  RngSeed seed{};
};

enum class ResampleScheme {
  Iid,                // with replacement
  MovingBlock,        // with replacement, block length ceil(N^(1/3))
  HalfSubsample,      // floor(N/2) rows without replacement
  BlockHalfSubsample, // half of the non-overlapping blocks, without replacement
};
const char* to_string(ResampleScheme s) noexcept;

enum class IntervalMethod { Percentile, Basic };
const char* to_string(IntervalMethod m) noexcept;

struct CiResult {
  double point = 0.0;
  double low = 0.0;
  double high = 0.0;
  double level = 0.95;
  std::size_t replicates = 0;
  ResampleScheme scheme = ResampleScheme::Iid;
  IntervalMethod method = IntervalMethod::Basic;
  std::size_t block_length = 1;
  RngSeed seed{};
};

}  // namespace infometer
