#include "infometer/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace infometer {

namespace {

// Dense symbols for the distinct rows (joint symbols for several columns).
DiscreteSeries relabel(const SampleMatrix& samples) {
  std::map<std::vector<double>, int> ids;
  for (double v : samples.data())
    require(std::floor(v) == v, ErrorKind::InvalidInput,
            "plugin estimator needs integer symbols; discretize continuous data first");
  for (std::size_t r = 0; r < samples.rows(); ++r) {
    const auto row = samples.row(r);
    ids.emplace(std::vector<double>(row.begin(), row.end()), 0);
  }
  int next = 0;
  for (auto& [v, id] : ids) id = next++;
  std::vector<int> symbols;
  symbols.reserve(samples.rows());
  for (std::size_t r = 0; r < samples.rows(); ++r) {
    const auto row = samples.row(r);
    symbols.push_back(ids[std::vector<double>(row.begin(), row.end())]);
  }
  return DiscreteSeries(std::move(symbols), next);
}

EntropyEstimate entropy_once(const SampleMatrix& samples, EntropyEstimator estimator,
                             const AnalysisConfig& config) {
  switch (estimator) {
    case EntropyEstimator::Plugin: return entropy_plugin(relabel(samples));
    case EntropyEstimator::MillerMadow: return entropy_miller_madow(relabel(samples));
    case EntropyEstimator::Vasicek: return entropy_vasicek(samples);
    case EntropyEstimator::KnnKL: return entropy_knn(samples, {config.k, true, config.jitter_seed()});
  }
  fail(ErrorKind::InvalidConfig, "unknown entropy estimator");
}

BootstrapConfig bootstrap_config(const AnalysisConfig& c, ResampleScheme scheme) {
  BootstrapConfig b;
  b.replicates = c.replicates;
  b.level = c.level;
  b.scheme = scheme;
  b.seed = c.bootstrap_seed();
  b.workers = c.workers;
  return b;
}

SurrogateConfig surrogate_config(const AnalysisConfig& c, SurrogateMethod method, std::size_t max_lag = 1) {
  SurrogateConfig s;
  s.method = method;
  s.surrogates = c.surrogates;
  s.alpha = c.alpha;
  s.max_lag = max_lag;
  s.seed = c.surrogate_seed();
  s.workers = c.workers;
  return s;
}

// Groups of row indices whose y values may be exchanged under H0: y _||_ x | z.
using Strata = std::vector<std::vector<std::size_t>>;

Strata strata_by_value(const SampleMatrix& z) {
  std::map<std::vector<double>, std::vector<std::size_t>> groups;
  for (std::size_t r = 0; r < z.rows(); ++r) {
    const auto row = z.row(r);
    groups[{row.begin(), row.end()}].push_back(r);
  }
  Strata out;
  for (auto& [key, rows] : groups) out.push_back(std::move(rows));
  return out;
}

// Consecutive runs of `size` rows along a Morton curve over the z ranks.
Strata strata_by_proximity(const SampleMatrix& z, std::size_t size) {
  const std::size_t n = z.rows();
  const std::size_t d = std::min<std::size_t>(z.cols(), 63);
  const std::size_t bits = std::min<std::size_t>(21, 63 / d);
  const SampleMatrix ranks = rank_transform(z);
  std::vector<std::uint64_t> key(n, 0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t b = 0; b < bits; ++b) {
      for (std::size_t c = 0; c < d; ++c) {
        const auto q = static_cast<std::uint64_t>(ranks(r, c) * static_cast<double>(1ULL << bits));
        key[r] = (key[r] << 1) | ((q >> (bits - 1 - b)) & 1);
      }
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key[a] < key[b]; });
  Strata out;
  for (std::size_t i = 0; i < n; i += size)
    out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i),
                     order.begin() + static_cast<std::ptrdiff_t>(std::min(n, i + size)));
  return out;
}

OrderGenerator stratified_permutation(std::size_t n, Strata strata) {
  return [n, strata = std::move(strata)](Rng& rng) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (const auto& group : strata) {
      std::vector<std::size_t> perm = group;
      for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
      for (std::size_t i = 0; i < group.size(); ++i) order[group[i]] = perm[i];
    }
    return order;
  };
}

constexpr std::size_t kStratumSize = 8;

}  // namespace

EntropyEstimate analyze_entropy(const SampleMatrix& samples, EntropyEstimator estimator,
                                const AnalysisConfig& config) {
  EntropyEstimate e = entropy_once(samples, estimator, config);
  const bool discrete = estimator == EntropyEstimator::Plugin || estimator == EntropyEstimator::MillerMadow;
  const auto scheme = discrete ? ResampleScheme::Iid : ResampleScheme::HalfSubsample;
  e.ci = bootstrap_ci(
      e.value, samples.rows(),
      [&](std::span<const std::size_t> rows) {
        return entropy_once(samples.select_rows(rows), estimator, config).value;
      },
      bootstrap_config(config, scheme));
  return e;
}

MiEstimate analyze_mi(const SampleMatrix& x, const SampleMatrix& y, const SampleMatrix* z,
                      MiEstimator estimator, const AnalysisConfig& config) {
  const std::size_t n = x.rows();
  require(y.rows() == n && (!z || z->rows() == n), ErrorKind::InvalidInput, "blocks differ in length");
  MiEstimate e;
  std::function<double(const SampleMatrix&, std::span<const std::size_t>)> reordered;
  std::function<double(std::span<const std::size_t>)> on_rows;
  SampleMatrix px, py, pz;
  std::optional<KsgEngine> engine;

  if (estimator == MiEstimator::Plugin) {
    e.estimator = MiEstimator::Plugin;
    e.value = plugin_cmi_rows(x, y, z);
    e.hyperparams = {{"n", n}, {"dx", x.cols()}, {"dy", y.cols()}, {"conditional", z != nullptr}};
    if (z) e.hyperparams["dz"] = z->cols();
    e.preprocessing.push_back({"none", {{"reason", "integer symbols used as given"}}});
    reordered = [&](const SampleMatrix& yy, std::span<const std::size_t> order) {
      return plugin_cmi_rows(x, yy.select_rows(order), z);
    };
    on_rows = [&](std::span<const std::size_t> rows) {
      const SampleMatrix zs = z ? z->select_rows(rows) : SampleMatrix{};
      return plugin_cmi_rows(x.select_rows(rows), y.select_rows(rows), z ? &zs : nullptr);
    };
    py = y;
  } else {
    const KsgOptions opts{config.k, true, true, config.jitter_seed()};
    e = z ? cmi_ksg(x, y, *z, opts) : mi_ksg(x, y, opts);
    px = ksg_prepare(x, opts, nullptr);
    py = ksg_prepare(y, opts, nullptr);
    if (z) pz = ksg_prepare(*z, opts, nullptr);
    engine.emplace(px, z ? std::optional<SampleMatrix>(pz) : std::nullopt, config.k);
    reordered = [&](const SampleMatrix& yy, std::span<const std::size_t> order) {
      return engine->estimate_reordered(yy, order);
    };
    on_rows = [&](std::span<const std::size_t> rows) {
      const KsgEngine sub(px.select_rows(rows), z ? std::optional<SampleMatrix>(pz.select_rows(rows)) : std::nullopt,
                          config.k);
      return sub.estimate(py.select_rows(rows));
    };
  }

  const ReorderedStatistic statistic = [&](std::span<const std::size_t> order) { return reordered(py, order); };
  SurrogateConfig sc = surrogate_config(config, SurrogateMethod::Permutation);
  if (!z) {
    e.significance = surrogate_test(e.value, n, statistic, sc);
  } else {
    const bool discrete = estimator == MiEstimator::Plugin;
    Strata strata = discrete ? strata_by_value(*z) : strata_by_proximity(pz, kStratumSize);
    e.significance = surrogate_test(e.value, stratified_permutation(n, std::move(strata)), statistic, sc);
    e.hyperparams["null"] = discrete ? "permutation within z strata"
                                     : "permutation within runs of 8 z-neighbors (Morton order)";
  }
  const auto scheme = estimator == MiEstimator::Plugin ? ResampleScheme::Iid : ResampleScheme::HalfSubsample;
  e.ci = bootstrap_ci(e.value, n, on_rows, bootstrap_config(config, scheme));
  return e;
}

TeResult analyze_te(std::span<const double> source, std::span<const double> target, const EmbeddingSpec& spec,
                    MiEstimator estimator, const AnalysisConfig& config,
                    std::span<const std::vector<double>> conditioning) {
  const TemporalOptions opts{estimator, config.k, true, true, config.jitter_seed()};
  TeResult r = transfer_entropy(source, target, spec, opts, conditioning);
  const TeEvaluator evaluator(target, source, spec, opts, conditioning);
  r.significance = te_surrogate_test(evaluator, surrogate_config(config, SurrogateMethod::TimeShift));
  const auto scheme =
      estimator == MiEstimator::Plugin ? ResampleScheme::MovingBlock : ResampleScheme::BlockHalfSubsample;
  r.ci = bootstrap_ci(
      r.value, evaluator.rows(), [&](std::span<const std::size_t> rows) { return evaluator.on_rows(rows); },
      bootstrap_config(config, scheme));
  return r;
}

TeResult analyze_ais(std::span<const double> series, const EmbeddingSpec& spec, MiEstimator estimator,
                     const AnalysisConfig& config) {
  const TemporalOptions opts{estimator, config.k, true, true, config.jitter_seed()};
  TeResult r = active_information_storage(series, spec, opts);
  const BlockMiEvaluator evaluator = BlockMiEvaluator::storage(series, spec, opts);
  r.significance = block_surrogate_test(evaluator, surrogate_config(config, SurrogateMethod::TimeShift));
  const auto scheme =
      estimator == MiEstimator::Plugin ? ResampleScheme::MovingBlock : ResampleScheme::BlockHalfSubsample;
  r.ci = bootstrap_ci(
      r.value, evaluator.rows(), [&](std::span<const std::size_t> rows) { return evaluator.on_rows(rows); },
      bootstrap_config(config, scheme));
  return r;
}

MiEstimate analyze_predictive(std::span<const double> series, std::size_t window, MiEstimator estimator,
                              const AnalysisConfig& config) {
  const TemporalOptions opts{estimator, config.k, true, true, config.jitter_seed()};
  MiEstimate e = predictive_information(series, window, opts);
  const BlockMiEvaluator evaluator = BlockMiEvaluator::predictive(series, window, opts);
  e.significance = block_surrogate_test(evaluator, surrogate_config(config, SurrogateMethod::TimeShift));
  const auto scheme =
      estimator == MiEstimator::Plugin ? ResampleScheme::MovingBlock : ResampleScheme::BlockHalfSubsample;
  e.ci = bootstrap_ci(
      e.value, evaluator.rows(), [&](std::span<const std::size_t> rows) { return evaluator.on_rows(rows); },
      bootstrap_config(config, scheme));
  return e;
}

AutonomyAnalysis analyze_autonomy(std::span<const Episode> episodes, std::size_t history,
                                  const AnalysisConfig& config) {
  AutonomyAnalysis out;
  out.estimate = autonomy_observational(episodes, history);
  // Resampling units: whole episodes when there are enough, otherwise
  // contiguous chunks that overlap by `history` steps so no transition is lost.
  std::vector<Episode> units;
  std::size_t block = 1;
  if (episodes.size() >= 10) {
    units.assign(episodes.begin(), episodes.end());
  } else {
    block = std::max<std::size_t>(default_block_length(out.estimate.samples), 2);
    for (const Episode& ep : episodes) {
      for (std::size_t start = 0; start + history < ep.v.size(); start += block) {
        const std::size_t end = std::min(ep.v.size(), start + block + history);
        units.push_back({{ep.v.begin() + static_cast<std::ptrdiff_t>(start), ep.v.begin() + static_cast<std::ptrdiff_t>(end)},
                         {ep.e.begin() + static_cast<std::ptrdiff_t>(start), ep.e.begin() + static_cast<std::ptrdiff_t>(end)}});
      }
    }
  }
  out.ci = bootstrap_ci(
      out.estimate.value, units.size(),
      [&](std::span<const std::size_t> rows) {
        std::vector<Episode> picked;
        picked.reserve(rows.size());
        for (std::size_t r : rows) picked.push_back(units[r]);
        return autonomy_observational(picked, history).value;
      },
      bootstrap_config(config, ResampleScheme::Iid));
  out.ci.block_length = block;
  return out;
}

ManifestDraft exact_draft(const std::string& measure, double value, const Tpm& tpm) {
  ManifestDraft d;
  d.measure = measure;
  d.value = value;
  d.unit = "bits";
  d.estimator = "exact-enumeration";
  d.hyperparameters = {{"nodes", tpm.nodes()}, {"intervention", "uniform"}};
  d.exact_uncertainty = Json{{"type", "exact"},
                             {"reason", "computed from the full transition matrix; no sampling error"}};
  d.significance_not_applicable = "exact property of a given mechanism; there is no sample to test";
  d.preprocessing = PreprocessLog{{"load_tpm", {{"nodes", tpm.nodes()}, {"source_format", tpm.source_format()}}}};
  d.details["warnings"] = tpm.warnings();
  return d;
}

}  // namespace infometer
