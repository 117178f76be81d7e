#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "infometer/core.hpp"
#include "infometer/parallel.hpp"
#include "infometer/results.hpp"
#include "infometer/temporal.hpp"

namespace infometer {

/// A statistic recomputed with the source rows reordered; order[i] is the
/// original row placed at position i.
using ReorderedStatistic = std::function<double(std::span<const std::size_t> order)>;

struct SurrogateConfig {
  SurrogateMethod method = SurrogateMethod::TimeShift;
  std::size_t surrogates = 200;
  double alpha = 0.05;
  /// Time shifts are drawn uniformly from [max_lag, N - max_lag].
  std::size_t max_lag = 1;
  RngSeed seed{};
  Workers workers{};
};

/// Null distribution from S reorderings of the source. Replicate r uses RNG
/// stream seed.substream(r). Throws InvalidConfig when S < 19, when
/// alpha < 1/(S+1), or when a time shift range is empty.
SignificanceResult surrogate_test(double observed, std::size_t n, const ReorderedStatistic& statistic,
                                  const SurrogateConfig& config);

/// Draws one surrogate reordering from a replicate's RNG stream.
using OrderGenerator = std::function<std::vector<std::size_t>(Rng& rng)>;

/// The same test with caller-supplied reorderings (e.g. stratified permutations).
SignificanceResult surrogate_test(double observed, const OrderGenerator& generate,
                                  const ReorderedStatistic& statistic, const SurrogateConfig& config);

/// Plus-one p-value: (1 + #{null >= observed}) / (S + 1).
double plus_one_p_value(double observed, std::span<const double> null_samples);

/// The shift rotation for time-shift replicates: order[i] = (i + offset) mod n.
std::vector<std::size_t> rotation(std::size_t n, std::size_t offset);

/// A statistic recomputed on the rows of a resample (repeats allowed).
using ResampledStatistic = std::function<double(std::span<const std::size_t> rows)>;

struct BootstrapConfig {
  std::size_t replicates = 500;
  double level = 0.95;
  ResampleScheme scheme = ResampleScheme::Iid;
  IntervalMethod method = IntervalMethod::Basic;
  /// Block length for block schemes; ceil(N^(1/3)) when unset.
  std::optional<std::size_t> block_length;
  RngSeed seed{};
  Workers workers{};
};

/// Resampling interval around `point`. Basic intervals reflect the replicate
/// quantiles about the point; both methods are clamped so low <= point <= high.
/// Throws InvalidConfig when B < 100 or level is outside (0, 1).
CiResult bootstrap_ci(double point, std::size_t n, const ResampledStatistic& statistic,
                      const BootstrapConfig& config);

/// Row indices of replicate r under `scheme` (exposed for tests).
std::vector<std::size_t> resample_rows(std::size_t n, ResampleScheme scheme, std::size_t block_length,
                                       Rng& rng);

std::size_t default_block_length(std::size_t n);

enum class Correction { Bonferroni, BhFdr };
const char* to_string(Correction c) noexcept;
Correction correction_from_string(const std::string& name);

struct CorrectedPValues {
  std::vector<double> adjusted;
  std::vector<bool> rejected;  // adjusted <= alpha
  Correction method = Correction::Bonferroni;
  double alpha = 0.05;
};

/// Bonferroni min(1, m p) or Benjamini-Hochberg step-up adjusted p-values.
CorrectedPValues correct_pvalues(std::span<const double> p_values, Correction method, double alpha);

struct ScanConfig {
  EmbeddingSpec embedding{};
  TemporalOptions estimator{};
  std::size_t surrogates = 200;
  double alpha = 0.05;
  Correction correction = Correction::Bonferroni;
  /// Condition each pair on the pasts of all other streams (source taps).
  bool condition_on_others = true;
  /// Block bootstrap replicates per edge; 0 skips the intervals.
  std::size_t bootstrap_replicates = 0;
  double level = 0.95;
  RngSeed seed{};
  Workers workers{};
};

struct ScanEdge {
  std::size_t source = 0;
  std::size_t target = 0;
  TeResult te;
  double adjusted_p = 1.0;
  bool rejected = false;
};

struct ScanResult {
  std::vector<std::string> names;
  std::vector<ScanEdge> edges;  // source-major order, m(m-1) entries
  CorrectedPValues correction;
  bool conditioned = true;
  std::vector<std::pair<std::size_t, std::size_t>> rejected_edges() const;
};

/// TE with a surrogate test for every ordered pair of columns of `streams`,
/// then a multiple-comparison correction across all pairs. Pair i uses the
/// surrogate seed stream seed.derive(pair tag, i).
ScanResult network_scan(const SampleMatrix& streams, const ScanConfig& config);

}  // namespace infometer
