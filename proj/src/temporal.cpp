#include "infometer/temporal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "infometer/entropy.hpp"
#include "infometer/inference.hpp"

namespace infometer {

namespace {

std::vector<std::size_t> uniform_taps(std::size_t count, std::size_t delay) {
  std::vector<std::size_t> taps(count);
  for (std::size_t i = 0; i < count; ++i) taps[i] = 1 + i * delay;
  return taps;
}

void check_lag_set(const std::vector<std::size_t>& lags, const char* side) {
  require(!lags.empty(), ErrorKind::InvalidConfig, std::string(side) + " lag set is empty");
  for (std::size_t i = 0; i < lags.size(); ++i) {
    require(lags[i] >= 1, ErrorKind::InvalidConfig, std::string(side) + " lags must be >= 1");
    require(i == 0 || lags[i] > lags[i - 1], ErrorKind::InvalidConfig,
            std::string(side) + " lags must be strictly increasing");
  }
}

void check_integral(std::span<const double> series) {
  for (double v : series)
    require(std::floor(v) == v, ErrorKind::InvalidInput,
            "plugin estimator needs integer symbols; discretize continuous data first");
}

std::vector<double> prepare_series(std::span<const double> series, const TemporalOptions& options,
                                   PreprocessLog* log) {
  if (options.estimator == MiEstimator::Plugin) {
    check_integral(series);
    return {series.begin(), series.end()};
  }
  const SampleMatrix prepared = prepare_for_knn(SampleMatrix::from_column(series, true),
                                                {options.standardize, options.jitter, options.seed}, log);
  return {prepared.data().begin(), prepared.data().end()};
}

double conditional_mi(const SampleMatrix& x, const SampleMatrix& y, const SampleMatrix* z,
                      const TemporalOptions& options) {
  if (options.estimator == MiEstimator::Plugin) return plugin_cmi_rows(x, y, z);
  const KsgEngine engine(x, z ? std::optional<SampleMatrix>(*z) : std::nullopt, options.k);
  return engine.estimate(y);
}

double future_entropy(const SampleMatrix& future, const TemporalOptions& options) {
  if (options.estimator == MiEstimator::Plugin) return plugin_entropy_rows(future);
  return entropy_knn(future, {options.k, false, options.seed}).value;
}

void stationarity_warnings(std::span<const double> series, const char* name,
                           std::vector<std::string>& warnings) {
  if (series.size() < 20) return;
  const StationarityReport report = check_stationarity(SampleMatrix::from_column(series, true, name));
  for (const auto& w : report.warnings) warnings.push_back(w);
}

}  // namespace

// ---- embedding ----------------------------------------------------------

std::vector<std::size_t> EmbeddingSpec::target_taps() const {
  return target_lag_set ? *target_lag_set : uniform_taps(target_lags, delay);
}

std::vector<std::size_t> EmbeddingSpec::source_taps() const {
  return source_lag_set ? *source_lag_set : uniform_taps(source_lags, delay);
}

std::size_t EmbeddingSpec::max_lag() const {
  const auto t = target_taps();
  const auto s = source_taps();
  return std::max(t.empty() ? 0 : t.back(), s.empty() ? 0 : s.back());
}

void EmbeddingSpec::validate() const {
  require(delay >= 1, ErrorKind::InvalidConfig, "embedding delay must be >= 1");
  if (target_lag_set) check_lag_set(*target_lag_set, "target");
  else require(target_lags >= 1, ErrorKind::InvalidConfig, "target history length must be >= 1");
  if (source_lag_set) check_lag_set(*source_lag_set, "source");
  else require(source_lags >= 1, ErrorKind::InvalidConfig, "source history length must be >= 1");
}

Json EmbeddingSpec::to_json() const {
  Json j = {{"target_lags", target_lags}, {"source_lags", source_lags}, {"delay", delay},
            {"target_taps", target_taps()}, {"source_taps", source_taps()},
            {"max_lag", max_lag()}, {"defaulted", defaulted}};
  if (target_lag_set || source_lag_set) j["mode"] = "nonuniform";
  else j["mode"] = "uniform";
  return j;
}

SampleMatrix lagged_block(std::span<const double> series, std::span<const std::size_t> lags,
                          std::size_t max_lag) {
  const std::size_t n = series.size();
  require(n > max_lag, ErrorKind::InsufficientData,
          "series of length " + std::to_string(n) + " is too short for maximum lag " +
              std::to_string(max_lag));
  const std::size_t rows = n - max_lag;
  const std::size_t cols = lags.size();
  std::vector<double> data(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t next = max_lag + r;  // index of x(t+1)
    for (std::size_t c = 0; c < cols; ++c) data[r * cols + c] = series[next - lags[c]];
  }
  return SampleMatrix(rows, cols, std::move(data), {}, true);
}

Embedding embed(std::span<const double> target, std::span<const double> source,
                const EmbeddingSpec& spec) {
  spec.validate();
  require(source.empty() || source.size() == target.size(), ErrorKind::InvalidInput,
          "source and target differ in length");
  const std::size_t max_lag = source.empty() ? spec.target_taps().back() : spec.max_lag();
  const std::size_t zero = 0;
  Embedding e{lagged_block(target, {&zero, 1}, max_lag),
              lagged_block(target, spec.target_taps(), max_lag), std::nullopt};
  if (!source.empty()) e.source_past = lagged_block(source, spec.source_taps(), max_lag);
  return e;
}

// ---- evaluator ----------------------------------------------------------

TeEvaluator::TeEvaluator(std::span<const double> target, std::span<const double> source,
                         const EmbeddingSpec& spec, const TemporalOptions& options,
                         std::span<const std::vector<double>> conditioning)
    : spec_(spec), options_(options) {
  spec_.validate();
  require(source.size() == target.size(), ErrorKind::InvalidInput, "source and target differ in length");
  for (const auto& c : conditioning)
    require(c.size() == target.size(), ErrorKind::InvalidInput,
            "conditioning series differ in length from the target");
  max_lag_ = spec_.max_lag();
  require(target.size() > max_lag_ + 1, ErrorKind::InsufficientData,
          "series too short for the embedding (N=" + std::to_string(target.size()) +
              ", max lag=" + std::to_string(max_lag_) + ")");

  const std::vector<double> tgt = prepare_series(target, options_, &log_);
  source_ = prepare_series(source, options_, nullptr);
  source_taps_ = spec_.source_taps();

  const std::size_t zero = 0;
  future_ = lagged_block(tgt, {&zero, 1}, max_lag_);
  conditioning_ = lagged_block(tgt, spec_.target_taps(), max_lag_);
  for (const auto& c : conditioning) {
    const std::vector<double> prepared = prepare_series(c, options_, nullptr);
    conditioning_ = SampleMatrix::hstack(conditioning_, lagged_block(prepared, source_taps_, max_lag_));
  }
  source_block_ = lagged_block(source_, source_taps_, max_lag_);
  if (options_.estimator == MiEstimator::Ksg) {
    require(options_.k >= 1 && options_.k < future_.rows(), ErrorKind::InvalidConfig,
            "KSG needs 1 <= k < embedded N");
    engine_.emplace(future_, conditioning_, options_.k);
  }
  log_.push_back({"embedding", spec_.to_json()});
  if (!conditioning.empty())
    log_.push_back({"conditioning", {{"extra_series", conditioning.size()},
                                     {"taps", source_taps_}}});
}

double TeEvaluator::evaluate(const SampleMatrix& source_block) const {
  if (engine_) return engine_->estimate(source_block);
  return plugin_cmi_rows(future_, source_block, &conditioning_);
}

double TeEvaluator::observed() const { return evaluate(source_block_); }

double TeEvaluator::with_source_order(std::span<const std::size_t> order) const {
  require(order.size() == source_.size(), ErrorKind::InvalidInput, "reordering has the wrong length");
  std::vector<double> shuffled(source_.size());
  for (std::size_t i = 0; i < order.size(); ++i) shuffled[i] = source_[order[i]];
  return evaluate(lagged_block(shuffled, source_taps_, max_lag_));
}

double TeEvaluator::on_rows(std::span<const std::size_t> rows) const {
  const SampleMatrix f = future_.select_rows(rows);
  const SampleMatrix z = conditioning_.select_rows(rows);
  const SampleMatrix y = source_block_.select_rows(rows);
  return conditional_mi(f, y, &z, options_);
}

double TeEvaluator::target_entropy() const { return future_entropy(future_, options_); }

TeResult transfer_entropy(std::span<const double> source, std::span<const double> target,
                          const EmbeddingSpec& spec, const TemporalOptions& options,
                          std::span<const std::vector<double>> conditioning) {
  const TeEvaluator evaluator(target, source, spec, options, conditioning);
  TeResult r;
  r.measure = "transfer_entropy";
  r.value = evaluator.observed();
  r.target_entropy = evaluator.target_entropy();
  r.effect_size = r.target_entropy > 0.0 ? r.value / r.target_entropy : 0.0;
  r.embedding = spec;
  r.estimator = options.estimator;
  r.k = options.estimator == MiEstimator::Ksg ? options.k : 0;
  r.rows = evaluator.rows();
  r.preprocessing = evaluator.preprocessing();
  r.hyperparams = {{"estimator", to_string(options.estimator)}, {"embedding", spec.to_json()},
                   {"conditioning_series", conditioning.size()}};
  if (options.estimator == MiEstimator::Ksg) r.hyperparams["k"] = options.k;
  if (spec.defaulted)
    r.warnings.push_back("default embedding l=k=tau=1 used; the embedding should be justified or selected");
  stationarity_warnings(source, "source", r.warnings);
  stationarity_warnings(target, "target", r.warnings);
  if (options.estimator == MiEstimator::Ksg && r.value < 0.0)
    r.warnings.push_back("negative KSG estimate reported unclipped (finite-sample bias)");
  return r;
}

TeResult active_information_storage(std::span<const double> series, const EmbeddingSpec& spec,
                                    const TemporalOptions& options) {
  const BlockMiEvaluator evaluator = BlockMiEvaluator::storage(series, spec, options);
  TeResult r;
  r.measure = "active_information_storage";
  r.value = evaluator.observed();
  r.target_entropy = future_entropy(evaluator.fixed_block(), options);
  r.effect_size = r.target_entropy > 0.0 ? r.value / r.target_entropy : 0.0;
  r.embedding = spec;
  r.estimator = options.estimator;
  r.k = options.estimator == MiEstimator::Ksg ? options.k : 0;
  r.rows = evaluator.rows();
  r.preprocessing = evaluator.preprocessing();
  r.hyperparams = {{"estimator", to_string(options.estimator)}, {"target_taps", spec.target_taps()}};
  if (options.estimator == MiEstimator::Ksg) r.hyperparams["k"] = options.k;
  if (spec.defaulted)
    r.warnings.push_back("default embedding l=1 used; the history length should be justified");
  stationarity_warnings(series, "series", r.warnings);
  return r;
}

MiEstimate predictive_information(std::span<const double> series, std::size_t window,
                                  const TemporalOptions& options) {
  const BlockMiEvaluator evaluator = BlockMiEvaluator::predictive(series, window, options);
  MiEstimate e;
  e.preprocessing = evaluator.preprocessing();
  e.estimator = options.estimator;
  e.value = evaluator.observed();
  if (options.estimator == MiEstimator::Ksg) {
    e.k = options.k;
    if (2 * window > kKsgMaxDims)
      e.warnings.push_back("combined dimension " + std::to_string(2 * window) +
                           " exceeds 20: kNN statistics are unreliable here");
  }
  e.hyperparams = {{"window", window}, {"estimator", to_string(options.estimator)},
                   {"rows", evaluator.rows()}};
  if (options.estimator == MiEstimator::Ksg) e.hyperparams["k"] = options.k;
  std::vector<std::string> drift;
  stationarity_warnings(series, "series", drift);
  for (auto& w : drift) e.warnings.push_back(std::move(w));
  return e;
}

// ---- block evaluator -------------------------------------------------------

BlockMiEvaluator::BlockMiEvaluator(std::span<const double> series, std::size_t first_row,
                                   std::size_t rows, std::vector<std::ptrdiff_t> fixed_offsets,
                                   std::vector<std::ptrdiff_t> moving_offsets, std::size_t max_lag,
                                   const TemporalOptions& options)
    : options_(options),
      first_row_(first_row),
      row_count_(rows),
      max_lag_(max_lag),
      moving_offsets_(std::move(moving_offsets)) {
  series_ = prepare_series(series, options_, &log_);
  fixed_ = block(series_, fixed_offsets);
  moving_ = block(series_, moving_offsets_);
  if (options_.estimator == MiEstimator::Ksg) {
    require(options_.k >= 1 && options_.k < fixed_.rows(), ErrorKind::InvalidConfig,
            "KSG needs 1 <= k < embedded N");
    engine_.emplace(fixed_, std::nullopt, options_.k);
  }
}

BlockMiEvaluator BlockMiEvaluator::storage(std::span<const double> series, const EmbeddingSpec& spec,
                                           const TemporalOptions& options) {
  spec.validate();
  const std::vector<std::size_t> taps = spec.target_taps();
  const std::size_t max_lag = taps.back();
  require(series.size() > max_lag + 1, ErrorKind::InsufficientData,
          "series too short for the embedding (N=" + std::to_string(series.size()) +
              ", max lag=" + std::to_string(max_lag) + ")");
  std::vector<std::ptrdiff_t> past;
  for (std::size_t lag : taps) past.push_back(-static_cast<std::ptrdiff_t>(lag));
  BlockMiEvaluator e(series, max_lag, series.size() - max_lag, {0}, std::move(past), max_lag, options);
  e.log_.push_back({"embedding", spec.to_json()});
  return e;
}

BlockMiEvaluator BlockMiEvaluator::predictive(std::span<const double> series, std::size_t window,
                                              const TemporalOptions& options) {
  require(window >= 1, ErrorKind::InvalidConfig, "window must be >= 1");
  require(series.size() > 2 * window, ErrorKind::InsufficientData,
          "predictive information needs N > 2T (N=" + std::to_string(series.size()) +
              ", T=" + std::to_string(window) + ")");
  // Row anchor a = t + 1: future x(a .. a+T-1), past x(a-1 .. a-T).
  std::vector<std::ptrdiff_t> future, past;
  for (std::size_t j = 0; j < window; ++j) {
    future.push_back(static_cast<std::ptrdiff_t>(j));
    past.push_back(-1 - static_cast<std::ptrdiff_t>(j));
  }
  BlockMiEvaluator e(series, window, series.size() - 2 * window + 1, std::move(future), std::move(past),
                     window, options);
  e.log_.push_back({"block_embedding", {{"window", window}}});
  return e;
}

SampleMatrix BlockMiEvaluator::block(std::span<const double> series,
                                     std::span<const std::ptrdiff_t> offsets) const {
  // Row r is anchored at first_row_ + r.
  const std::size_t rows = row_count_;
  std::vector<double> data(rows * offsets.size());
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < offsets.size(); ++c)
      data[r * offsets.size() + c] =
          series[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(first_row_ + r) + offsets[c])];
  return SampleMatrix(rows, offsets.size(), std::move(data), {}, true);
}

double BlockMiEvaluator::evaluate(const SampleMatrix& moving) const {
  if (engine_) return engine_->estimate(moving);
  return plugin_cmi_rows(fixed_, moving, nullptr);
}

double BlockMiEvaluator::observed() const { return evaluate(moving_); }

double BlockMiEvaluator::with_series_order(std::span<const std::size_t> order) const {
  require(order.size() == series_.size(), ErrorKind::InvalidInput, "reordering has the wrong length");
  std::vector<double> shuffled(series_.size());
  for (std::size_t i = 0; i < order.size(); ++i) shuffled[i] = series_[order[i]];
  return evaluate(block(shuffled, moving_offsets_));
}

double BlockMiEvaluator::on_rows(std::span<const std::size_t> rows) const {
  return conditional_mi(fixed_.select_rows(rows), moving_.select_rows(rows), nullptr, options_);
}

SignificanceResult block_surrogate_test(const BlockMiEvaluator& evaluator, const SurrogateConfig& config) {
  SurrogateConfig c = config;
  c.max_lag = std::max(c.max_lag, evaluator.max_lag());
  return surrogate_test(
      evaluator.observed(), evaluator.series_length(),
      [&](std::span<const std::size_t> order) { return evaluator.with_series_order(order); }, c);
}

SignificanceResult te_surrogate_test(const TeEvaluator& evaluator, const SurrogateConfig& config) {
  SurrogateConfig c = config;
  c.max_lag = std::max(c.max_lag, evaluator.max_lag());
  return surrogate_test(
      evaluator.observed(), evaluator.series_length(),
      [&](std::span<const std::size_t> order) { return evaluator.with_source_order(order); }, c);
}

// ---- non-uniform embedding ----------------------------------------------

Json NonuniformSelection::to_json() const {
  Json sel = Json::array();
  for (const auto& c : selected) sel.push_back({{"series", c.series}, {"lag", c.lag}});
  Json st = Json::array();
  for (const auto& s : steps)
    st.push_back({{"series", s.candidate.series}, {"lag", s.candidate.lag}, {"cmi", s.cmi},
                  {"p_value", s.p_value}, {"accepted", s.accepted}});
  return {{"selected", sel}, {"steps", st}, {"target_lags", target_lags},
          {"source_lags", source_lags}, {"max_lag", max_lag}};
}

NonuniformSelection select_embedding_nonuniform(std::span<const double> target,
                                                std::span<const std::vector<double>> sources,
                                                const SelectionConfig& config) {
  const std::size_t max_lag = config.max_lag;
  require(max_lag >= 1, ErrorKind::InvalidConfig, "max_lag must be >= 1");
  for (const auto& s : sources)
    require(s.size() == target.size(), ErrorKind::InvalidInput, "sources differ in length from the target");
  require(config.surrogates >= 19, ErrorKind::InvalidConfig, "at least 19 surrogates are required");
  require(config.alpha >= 1.0 / static_cast<double>(config.surrogates + 1), ErrorKind::InvalidConfig,
          "alpha is below the smallest attainable p-value 1/(S+1)");
  const TemporalOptions& options = config.estimator;

  std::vector<std::vector<double>> series;
  series.push_back(prepare_series(target, options, nullptr));
  for (const auto& s : sources) series.push_back(prepare_series(s, options, nullptr));

  const std::size_t zero = 0;
  const SampleMatrix future = lagged_block(series[0], {&zero, 1}, max_lag);
  const std::size_t rows = future.rows();
  if (options.estimator == MiEstimator::Ksg)
    require(options.k >= 1 && options.k < rows, ErrorKind::InvalidConfig, "KSG needs 1 <= k < rows");

  std::vector<LagCandidate> pool;
  std::vector<SampleMatrix> columns;
  for (std::size_t s = 0; s < series.size(); ++s)
    for (std::size_t lag = 1; lag <= max_lag; ++lag) {
      pool.push_back({s, lag});
      columns.push_back(lagged_block(series[s], {&lag, 1}, max_lag));
    }

  NonuniformSelection out;
  out.max_lag = max_lag;
  out.source_lags.resize(sources.size());
  std::optional<SampleMatrix> chosen;
  std::vector<bool> used(pool.size(), false);

  for (std::size_t step = 0; step < pool.size(); ++step) {
    std::optional<KsgEngine> engine;
    if (options.estimator == MiEstimator::Ksg) engine.emplace(future, chosen, options.k);
    auto score = [&](const SampleMatrix& column) {
      if (engine) return engine->estimate(column);
      return plugin_cmi_rows(future, column, chosen ? &*chosen : nullptr);
    };

    std::vector<std::size_t> remaining;
    for (std::size_t c = 0; c < pool.size(); ++c)
      if (!used[c]) remaining.push_back(c);
    std::vector<double> scores(remaining.size());
    parallel_for(remaining.size(), config.workers,
                 [&](std::size_t i) { scores[i] = score(columns[remaining[i]]); });
    std::size_t best = 0;
    for (std::size_t i = 1; i < remaining.size(); ++i)
      if (scores[i] > scores[best]) best = i;

    // Maximum statistic over all remaining candidates, each candidate column
    // permuted by the replicate's shuffle.
    std::vector<double> null_max(config.surrogates);
    parallel_for(config.surrogates, config.workers, [&](std::size_t r) {
      Rng rng(config.estimator.seed.derive(0x73656c656374ULL + step, r));
      std::vector<std::size_t> perm(rows);
      std::iota(perm.begin(), perm.end(), 0);
      for (std::size_t i = rows; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
      double m = -INFINITY;
      for (std::size_t c : remaining) m = std::max(m, score(columns[c].select_rows(perm)));
      null_max[r] = m;
    });
    const double p = plus_one_p_value(scores[best], null_max);
    const LagCandidate cand = pool[remaining[best]];
    const bool accept = p <= config.alpha;
    out.steps.push_back({cand, scores[best], p, accept});
    if (!accept) break;
    used[remaining[best]] = true;
    out.selected.push_back(cand);
    if (cand.series == 0) out.target_lags.push_back(cand.lag);
    else out.source_lags[cand.series - 1].push_back(cand.lag);
    chosen = chosen ? SampleMatrix::hstack(*chosen, columns[remaining[best]]) : columns[remaining[best]];
  }
  std::sort(out.target_lags.begin(), out.target_lags.end());
  for (auto& l : out.source_lags) std::sort(l.begin(), l.end());
  return out;
}

}  // namespace infometer
