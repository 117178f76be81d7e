#pragma once

#include <optional>
#include <span>
#include <vector>

#include "infometer/causal.hpp"
#include "infometer/core.hpp"
#include "infometer/entropy.hpp"
#include "infometer/inference.hpp"
#include "infometer/manifest.hpp"
#include "infometer/mi.hpp"
#include "infometer/temporal.hpp"

namespace infometer {

/// Shared settings for full analyses: an estimate plus its interval and,
/// where a null exists, its surrogate test. Purposes draw from disjoint
/// seed streams (jitter, surrogates, bootstrap) under `seed`.
struct AnalysisConfig {
  std::size_t k = 4;
  std::size_t surrogates = 200;
  double alpha = 0.05;
  std::size_t replicates = 500;
  double level = 0.95;
  RngSeed seed{};
  Workers workers{};

  RngSeed jitter_seed() const { return {seed.derive(1)}; }
  RngSeed surrogate_seed() const { return {seed.derive(2)}; }
  RngSeed bootstrap_seed() const { return {seed.derive(3)}; }
};

/// Entropy of one or more columns with a bootstrap interval. Plugin and
/// Miller-Madow take one integer column and resample rows iid; Vasicek and
/// kNN use half-sample subsampling (duplicated rows would break spacings
/// and neighbor distances).
EntropyEstimate analyze_entropy(const SampleMatrix& samples, EntropyEstimator estimator,
                                const AnalysisConfig& config);

/// (Conditional) MI with a permutation test of y and a bootstrap interval.
MiEstimate analyze_mi(const SampleMatrix& x, const SampleMatrix& y, const SampleMatrix* z,
                      MiEstimator estimator, const AnalysisConfig& config);

/// TE with a time-shift surrogate test and a block bootstrap interval.
TeResult analyze_te(std::span<const double> source, std::span<const double> target, const EmbeddingSpec& spec,
                    MiEstimator estimator, const AnalysisConfig& config,
                    std::span<const std::vector<double>> conditioning = {});

/// AIS with a time-shift surrogate test and a block bootstrap interval.
TeResult analyze_ais(std::span<const double> series, const EmbeddingSpec& spec, MiEstimator estimator,
                     const AnalysisConfig& config);

/// Predictive information with a time-shift test and a block bootstrap interval.
MiEstimate analyze_predictive(std::span<const double> series, std::size_t window, MiEstimator estimator,
                              const AnalysisConfig& config);

/// Observational autonomy with an interval from resampling episodes (or
/// contiguous chunks of a single long episode).
struct AutonomyAnalysis {
  ObservationalAutonomy estimate;
  CiResult ci;
};
AutonomyAnalysis analyze_autonomy(std::span<const Episode> episodes, std::size_t history,
                                  const AnalysisConfig& config);

/// Manifest drafts for exact TPM quantities (no sampling error, no null).
ManifestDraft exact_draft(const std::string& measure, double value, const Tpm& tpm);

}  // namespace infometer
