#pragma once

#include <optional>
#include <span>

#include "infometer/core.hpp"
#include "infometer/results.hpp"

namespace infometer {

enum class EntropyEstimator { Plugin, MillerMadow, Vasicek, KnnKL };
const char* to_string(EntropyEstimator e) noexcept;

struct EntropyEstimate {
  double value = 0.0;  // nats
  EntropyEstimator estimator = EntropyEstimator::Plugin;
  Json hyperparams = Json::object();
  std::optional<CiResult> ci;
  PreprocessLog preprocessing;
};

EntropyEstimate entropy_plugin(const ProbTable& p);
EntropyEstimate entropy_plugin(const DiscreteSeries& series);

/// Plugin estimate plus (K_observed - 1) / (2N).
EntropyEstimate entropy_miller_madow(const DiscreteSeries& series);

/// m-spacing estimate for one-dimensional samples; m defaults to floor(sqrt(N)).
EntropyEstimate entropy_vasicek(std::span<const double> samples, std::optional<std::size_t> m = {});
/// Throws InvalidConfig for more than one column.
EntropyEstimate entropy_vasicek(const SampleMatrix& samples, std::optional<std::size_t> m = {});

struct KnnEntropyOptions {
  std::size_t k = 4;
  bool jitter = true;
  RngSeed seed{};
};

/// Kozachenko-Leonenko estimate under the max-norm. Samples are not rescaled
/// (differential entropy depends on scale), only tie-jittered.
EntropyEstimate entropy_knn(const SampleMatrix& samples, const KnnEntropyOptions& options = {});

/// -sum p log p over raw weights, 0 log 0 = 0. Shared by the discrete estimators.
double shannon_nats(std::span<const double> p);

}  // namespace infometer
