#include "infometer/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace infometer {

const char* to_string(SurrogateMethod m) noexcept {
  return m == SurrogateMethod::TimeShift ? "time_shift" : "permutation";
}

const char* to_string(ResampleScheme s) noexcept {
  switch (s) {
    case ResampleScheme::Iid: return "iid";
    case ResampleScheme::MovingBlock: return "moving_block";
    case ResampleScheme::HalfSubsample: return "half_subsample";
    case ResampleScheme::BlockHalfSubsample: return "block_half_subsample";
  }
  return "?";
}

const char* to_string(IntervalMethod m) noexcept {
  return m == IntervalMethod::Percentile ? "percentile" : "basic";
}

const char* to_string(Correction c) noexcept {
  return c == Correction::Bonferroni ? "bonferroni" : "bh_fdr";
}

Correction correction_from_string(const std::string& name) {
  if (name == "bonferroni") return Correction::Bonferroni;
  if (name == "bh_fdr" || name == "fdr" || name == "bh") return Correction::BhFdr;
  fail(ErrorKind::InvalidConfig, "unknown correction '" + name + "' (bonferroni, bh_fdr)");
}

// ---- surrogates -----------------------------------------------------------

double plus_one_p_value(double observed, std::span<const double> null_samples) {
  const auto exceed = std::count_if(null_samples.begin(), null_samples.end(),
                                    [&](double v) { return v >= observed; });
  return static_cast<double>(1 + exceed) / static_cast<double>(null_samples.size() + 1);
}

std::vector<std::size_t> rotation(std::size_t n, std::size_t offset) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = (i + offset) % n;
  return order;
}

namespace {

void check_surrogate_config(const SurrogateConfig& config) {
  const std::size_t s = config.surrogates;
  require(s >= 19, ErrorKind::InvalidConfig, "at least 19 surrogates are required");
  require(config.alpha >= 1.0 / static_cast<double>(s + 1), ErrorKind::InvalidConfig,
          "alpha=" + std::to_string(config.alpha) + " is below the smallest attainable p-value 1/(S+1)=" +
              std::to_string(1.0 / static_cast<double>(s + 1)) + "; increase --surrogates");
}

}  // namespace

SignificanceResult surrogate_test(double observed, const OrderGenerator& generate,
                                  const ReorderedStatistic& statistic, const SurrogateConfig& config) {
  check_surrogate_config(config);
  SignificanceResult result;
  result.observed = observed;
  result.method = config.method;
  result.surrogates = config.surrogates;
  result.seed = config.seed;
  result.null_samples.resize(config.surrogates);
  parallel_for(config.surrogates, config.workers, [&](std::size_t r) {
    Rng rng(config.seed.substream(r));
    result.null_samples[r] = statistic(generate(rng));
  });
  result.p_value = plus_one_p_value(observed, result.null_samples);
  return result;
}

SignificanceResult surrogate_test(double observed, std::size_t n, const ReorderedStatistic& statistic,
                                  const SurrogateConfig& config) {
  check_surrogate_config(config);
  if (config.method == SurrogateMethod::TimeShift) {
    require(n >= 2 * config.max_lag && config.max_lag >= 1, ErrorKind::InsufficientData,
            "series too short for time-shift surrogates beyond the maximum lag");
    const std::size_t lo = config.max_lag;
    const std::size_t span = n - 2 * config.max_lag + 1;  // offsets in [max_lag, n - max_lag]
    return surrogate_test(
        observed, [&](Rng& rng) { return rotation(n, lo + rng.below(span)); }, statistic, config);
  }
  return surrogate_test(
      observed,
      [&](Rng& rng) {
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
        return order;
      },
      statistic, config);
}

// ---- bootstrap --------------------------------------------------------------

std::size_t default_block_length(std::size_t n) {
  auto b = static_cast<std::size_t>(std::ceil(std::cbrt(static_cast<double>(n))));
  // cbrt may round just above an exact cube
  while (b > 1 && (b - 1) * (b - 1) * (b - 1) >= n) --b;
  return std::max<std::size_t>(b, 1);
}

std::vector<std::size_t> resample_rows(std::size_t n, ResampleScheme scheme, std::size_t block_length,
                                       Rng& rng) {
  std::vector<std::size_t> rows;
  switch (scheme) {
    case ResampleScheme::Iid:
      rows.resize(n);
      for (auto& r : rows) r = rng.below(n);
      break;
    case ResampleScheme::MovingBlock: {
      const std::size_t b = std::min(block_length, n);
      rows.reserve(n + b);
      while (rows.size() < n) {
        const std::size_t start = rng.below(n - b + 1);
        for (std::size_t i = 0; i < b && rows.size() < n; ++i) rows.push_back(start + i);
      }
      break;
    }
    case ResampleScheme::HalfSubsample: {
      std::vector<std::size_t> all(n);
      std::iota(all.begin(), all.end(), 0);
      const std::size_t m = n / 2;
      for (std::size_t i = 0; i < m; ++i) std::swap(all[i], all[i + rng.below(n - i)]);
      rows.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(m));
      std::sort(rows.begin(), rows.end());
      break;
    }
    case ResampleScheme::BlockHalfSubsample: {
      const std::size_t b = std::min(block_length, n);
      const std::size_t blocks = n / b;
      std::vector<std::size_t> ids(blocks);
      std::iota(ids.begin(), ids.end(), 0);
      const std::size_t m = std::max<std::size_t>(blocks / 2, 1);
      for (std::size_t i = 0; i < m; ++i) std::swap(ids[i], ids[i + rng.below(blocks - i)]);
      std::sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(m));
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < b; ++j) rows.push_back(ids[i] * b + j);
      break;
    }
  }
  return rows;
}

namespace {

// Type-7 quantile of sorted values.
double quantile(const std::vector<double>& sorted, double q) {
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

CiResult bootstrap_ci(double point, std::size_t n, const ResampledStatistic& statistic,
                      const BootstrapConfig& config) {
  require(config.replicates >= 100, ErrorKind::InvalidConfig, "at least 100 bootstrap replicates are required");
  require(config.level > 0.0 && config.level < 1.0, ErrorKind::InvalidConfig, "level must be in (0, 1)");
  require(n >= 2, ErrorKind::InsufficientData, "bootstrap needs at least 2 rows");
  CiResult ci;
  ci.point = point;
  ci.level = config.level;
  ci.replicates = config.replicates;
  ci.scheme = config.scheme;
  ci.method = config.method;
  ci.seed = config.seed;
  const bool blocked =
      config.scheme == ResampleScheme::MovingBlock || config.scheme == ResampleScheme::BlockHalfSubsample;
  ci.block_length = blocked ? config.block_length.value_or(default_block_length(n)) : 1;

  std::vector<double> reps(config.replicates);
  parallel_for(config.replicates, config.workers, [&](std::size_t r) {
    Rng rng(config.seed.substream(r));
    const std::vector<std::size_t> rows = resample_rows(n, config.scheme, ci.block_length, rng);
    reps[r] = statistic(rows);
  });
  std::sort(reps.begin(), reps.end());
  const double tail = 0.5 * (1.0 - config.level);
  const double q_lo = quantile(reps, tail);
  const double q_hi = quantile(reps, 1.0 - tail);
  if (config.method == IntervalMethod::Percentile) {
    ci.low = q_lo;
    ci.high = q_hi;
  } else {
    ci.low = 2.0 * point - q_hi;
    ci.high = 2.0 * point - q_lo;
  }
  ci.low = std::min(ci.low, point);
  ci.high = std::max(ci.high, point);
  return ci;
}

// ---- multiple comparisons -----------------------------------------------------

CorrectedPValues correct_pvalues(std::span<const double> p_values, Correction method, double alpha) {
  for (double p : p_values)
    require(p > 0.0 && p <= 1.0, ErrorKind::InvalidInput, "p-values must lie in (0, 1]");
  require(alpha > 0.0 && alpha < 1.0, ErrorKind::InvalidConfig, "alpha must be in (0, 1)");
  const std::size_t m = p_values.size();
  CorrectedPValues out;
  out.method = method;
  out.alpha = alpha;
  out.adjusted.resize(m);
  if (method == Correction::Bonferroni) {
    for (std::size_t i = 0; i < m; ++i)
      out.adjusted[i] = std::min(1.0, static_cast<double>(m) * p_values[i]);
  } else {
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });
    double running = 1.0;
    for (std::size_t rank = m; rank >= 1; --rank) {
      const std::size_t i = order[rank - 1];
      running = std::min(running, p_values[i] * (static_cast<double>(m) / static_cast<double>(rank)));
      out.adjusted[i] = std::min(1.0, running);
    }
  }
  out.rejected.resize(m);
  for (std::size_t i = 0; i < m; ++i) out.rejected[i] = out.adjusted[i] <= alpha;
  return out;
}

// ---- network scan ---------------------------------------------------------------

std::vector<std::pair<std::size_t, std::size_t>> ScanResult::rejected_edges() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const auto& e : edges)
    if (e.rejected) out.emplace_back(e.source, e.target);
  return out;
}

ScanResult network_scan(const SampleMatrix& streams, const ScanConfig& config) {
  const std::size_t m = streams.cols();
  require(m >= 2, ErrorKind::InvalidInput, "network scan needs at least 2 streams");
  std::vector<std::vector<double>> cols(m);
  for (std::size_t c = 0; c < m; ++c) cols[c] = streams.column(c);

  ScanResult result;
  result.names = streams.column_names();
  result.conditioned = config.condition_on_others;
  for (std::size_t s = 0; s < m; ++s)
    for (std::size_t t = 0; t < m; ++t)
      if (s != t) result.edges.push_back({s, t, {}, 1.0, false});

  constexpr std::uint64_t kPairTag = 0x7363616e70616972ULL;
  constexpr std::uint64_t kBootTag = 0x7363616e626f6f74ULL;
  for (std::size_t i = 0; i < result.edges.size(); ++i) {
    ScanEdge& edge = result.edges[i];
    std::vector<std::vector<double>> others;
    if (config.condition_on_others)
      for (std::size_t c = 0; c < m; ++c)
        if (c != edge.source && c != edge.target) others.push_back(cols[c]);
    edge.te = transfer_entropy(cols[edge.source], cols[edge.target], config.embedding, config.estimator, others);
    const TeEvaluator evaluator(cols[edge.target], cols[edge.source], config.embedding, config.estimator, others);
    SurrogateConfig sc;
    sc.method = SurrogateMethod::TimeShift;
    sc.surrogates = config.surrogates;
    sc.alpha = config.alpha;
    sc.max_lag = evaluator.max_lag();
    sc.seed = RngSeed{config.seed.derive(kPairTag, i)};
    sc.workers = config.workers;
    edge.te.significance = te_surrogate_test(evaluator, sc);
    if (config.bootstrap_replicates > 0) {
      BootstrapConfig bc;
      bc.replicates = config.bootstrap_replicates;
      bc.level = config.level;
      bc.scheme = config.estimator.estimator == MiEstimator::Plugin ? ResampleScheme::MovingBlock
                                                                    : ResampleScheme::BlockHalfSubsample;
      bc.seed = RngSeed{config.seed.derive(kBootTag, i)};
      bc.workers = config.workers;
      edge.te.ci = bootstrap_ci(
          edge.te.value, evaluator.rows(),
          [&](std::span<const std::size_t> rows) { return evaluator.on_rows(rows); }, bc);
    }
  }
  std::vector<double> p(result.edges.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = result.edges[i].te.significance->p_value;
  result.correction = correct_pvalues(p, config.correction, config.alpha);
  for (std::size_t i = 0; i < p.size(); ++i) {
    result.edges[i].adjusted_p = result.correction.adjusted[i];
    result.edges[i].rejected = result.correction.rejected[i];
  }
  return result;
}

}  // namespace infometer
