#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "infometer/core.hpp"
#include "infometer/mi.hpp"
#include "infometer/parallel.hpp"
#include "infometer/results.hpp"

namespace infometer {

/// Which past values condition a prediction of x(t+1). A lag of j refers to
/// the value at time t + 1 - j, so lag 1 is the present x(t).
///
/// Uniform mode takes `target_lags` taps of the target and `source_lags` taps
/// of the source, spaced `delay` apart starting at lag 1. Explicit lag sets,
/// when given, replace the uniform taps for that side.
struct EmbeddingSpec {
  std::size_t target_lags = 1;
  std::size_t source_lags = 1;
  std::size_t delay = 1;
  std::optional<std::vector<std::size_t>> target_lag_set;
  std::optional<std::vector<std::size_t>> source_lag_set;
  /// True when no embedding was supplied and the defaults were used.
  bool defaulted = false;

  std::vector<std::size_t> target_taps() const;
  std::vector<std::size_t> source_taps() const;
  std::size_t max_lag() const;
  /// Throws InvalidConfig on zero counts or non-increasing lag sets.
  void validate() const;
  Json to_json() const;
};

/// Embedded blocks: row r describes prediction time t = max_lag - 1 + r.
struct Embedding {
  SampleMatrix future;       // x(t+1)
  SampleMatrix target_past;  // target taps, in tap order
  std::optional<SampleMatrix> source_past;
};

/// Lagged copies of `target` (and `source`, when non-empty). Row count is
/// N - max_lag. Throws InsufficientData when N <= max_lag.
Embedding embed(std::span<const double> target, std::span<const double> source,
                const EmbeddingSpec& spec);

/// Columns series[t + 1 - lag] for t = max_lag - 1 ... N - 2, one per lag.
SampleMatrix lagged_block(std::span<const double> series, std::span<const std::size_t> lags,
                          std::size_t max_lag);

struct TemporalOptions {
  MiEstimator estimator = MiEstimator::Ksg;
  std::size_t k = 4;  // KSG neighbors
  bool standardize = true;
  bool jitter = true;
  RngSeed seed{};
};

struct TeResult {
  std::string measure = "transfer_entropy";  // or active_information_storage
  double value = 0.0;                        // nats
  /// value / entropy of the target's next value (differential entropy of
  /// the standardized target for KSG).
  double effect_size = 0.0;
  double target_entropy = 0.0;
  EmbeddingSpec embedding;
  MiEstimator estimator = MiEstimator::Ksg;
  std::size_t k = 0;
  std::size_t rows = 0;  // embedded sample count
  Json hyperparams = Json::object();
  std::vector<std::string> warnings;
  PreprocessLog preprocessing;
  std::optional<SignificanceResult> significance;
  std::optional<CiResult> ci;
};

/// Conditional MI of x(t+1) with a source block given a fixed conditioning
/// block, prepared once so surrogate sources and row subsets are cheap.
///
/// The conditioning block is the target's own past plus, optionally, the
/// pasts of further series (network conditioning). Series are standardized
/// and jittered once, before embedding, so every embedded column is an exact
/// lagged slice of a prepared series.
class TeEvaluator {
 public:
  TeEvaluator(std::span<const double> target, std::span<const double> source,
              const EmbeddingSpec& spec, const TemporalOptions& options,
              std::span<const std::vector<double>> conditioning = {});

  std::size_t series_length() const noexcept { return source_.size(); }
  std::size_t rows() const noexcept { return future_.rows(); }
  std::size_t max_lag() const noexcept { return max_lag_; }

  double observed() const;
  /// Statistic with the prepared source reordered: source'[i] = source[order[i]].
  double with_source_order(std::span<const std::size_t> order) const;
  /// Statistic on a subset of embedded rows (repeats allowed for discrete data).
  double on_rows(std::span<const std::size_t> rows) const;

  const PreprocessLog& preprocessing() const noexcept { return log_; }
  /// Entropy of x(t+1) in nats, as used for effect sizes.
  double target_entropy() const;

 private:
  double evaluate(const SampleMatrix& source_block) const;

  EmbeddingSpec spec_;
  TemporalOptions options_;
  std::size_t max_lag_ = 0;
  std::vector<double> source_;
  std::vector<std::size_t> source_taps_;
  SampleMatrix future_;
  SampleMatrix conditioning_;  // target past, then other series' pasts
  SampleMatrix source_block_;
  std::optional<KsgEngine> engine_;
  PreprocessLog log_;
};

/// MI between two windows of one series: a fixed block and a block read at
/// given offsets, where the second block can be taken from a reordered copy
/// of the series (surrogates) or restricted to row subsets (resampling).
/// Backs active information storage and predictive information.
class BlockMiEvaluator {
 public:
  /// x(t+1) against the target taps of `spec`.
  static BlockMiEvaluator storage(std::span<const double> series, const EmbeddingSpec& spec,
                                  const TemporalOptions& options);
  /// Length-T future against length-T past.
  static BlockMiEvaluator predictive(std::span<const double> series, std::size_t window,
                                     const TemporalOptions& options);

  std::size_t series_length() const noexcept { return series_.size(); }
  std::size_t rows() const noexcept { return fixed_.rows(); }
  std::size_t max_lag() const noexcept { return max_lag_; }
  const SampleMatrix& fixed_block() const noexcept { return fixed_; }
  const PreprocessLog& preprocessing() const noexcept { return log_; }

  double observed() const;
  double with_series_order(std::span<const std::size_t> order) const;
  double on_rows(std::span<const std::size_t> rows) const;

 private:
  BlockMiEvaluator(std::span<const double> series, std::size_t first_row, std::size_t rows,
                   std::vector<std::ptrdiff_t> fixed_offsets, std::vector<std::ptrdiff_t> moving_offsets,
                   std::size_t max_lag, const TemporalOptions& options);
  SampleMatrix block(std::span<const double> series, std::span<const std::ptrdiff_t> offsets) const;
  double evaluate(const SampleMatrix& moving) const;

  TemporalOptions options_;
  std::vector<double> series_;
  std::size_t first_row_ = 0;
  std::size_t row_count_ = 0;
  std::size_t max_lag_ = 0;
  std::vector<std::ptrdiff_t> moving_offsets_;
  SampleMatrix fixed_;
  SampleMatrix moving_;
  std::optional<KsgEngine> engine_;
  PreprocessLog log_;
};

/// T(source -> target) = I(x(t+1); source past | target past [, other pasts]).
TeResult transfer_entropy(std::span<const double> source, std::span<const double> target,
                          const EmbeddingSpec& spec, const TemporalOptions& options = {},
                          std::span<const std::vector<double>> conditioning = {});

/// I(target past; x(t+1)); uses only the target side of the embedding.
TeResult active_information_storage(std::span<const double> series, const EmbeddingSpec& spec,
                                    const TemporalOptions& options = {});

/// I(past block of length T; future block of length T).
MiEstimate predictive_information(std::span<const double> series, std::size_t window,
                                  const TemporalOptions& options = {});

struct SurrogateConfig;

/// Time-shift or permutation test of a TeEvaluator's source.
SignificanceResult te_surrogate_test(const TeEvaluator& evaluator, const SurrogateConfig& config);
/// The same test with the moving block read from the reordered series.
SignificanceResult block_surrogate_test(const BlockMiEvaluator& evaluator, const SurrogateConfig& config);

struct LagCandidate {
  std::size_t series = 0;  // 0 = target, i >= 1 = candidate source i - 1
  std::size_t lag = 0;

  friend bool operator==(const LagCandidate&, const LagCandidate&) = default;
};

struct SelectionStep {
  LagCandidate candidate;
  double cmi = 0.0;
  double p_value = 1.0;
  bool accepted = false;
};

struct NonuniformSelection {
  std::vector<LagCandidate> selected;  // in order of selection
  std::vector<SelectionStep> steps;    // the last step is the rejected one, if any
  /// Explicit lag sets for the target and for each source.
  std::vector<std::size_t> target_lags;
  std::vector<std::vector<std::size_t>> source_lags;
  std::size_t max_lag = 0;
  Json to_json() const;
};

struct SelectionConfig {
  std::size_t max_lag = 5;
  std::size_t surrogates = 200;
  double alpha = 0.05;
  TemporalOptions estimator{};
  Workers workers{};
};

/// Greedy forward selection over one pool of (series, lag) candidates: the
/// target's own lags and every source's lags up to max_lag. Each step adds
/// the candidate with the largest CMI with x(t+1) given the current set, if
/// it beats the maximum-over-candidates surrogate null (candidate columns
/// permuted) at level alpha.
NonuniformSelection select_embedding_nonuniform(std::span<const double> target,
                                                std::span<const std::vector<double>> sources,
                                                const SelectionConfig& config);

}  // namespace infometer
