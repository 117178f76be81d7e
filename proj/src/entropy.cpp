#include "infometer/entropy.hpp"

#include <algorithm>
#include <cmath>

#include "infometer/knn.hpp"
#include "infometer/special.hpp"

namespace infometer {

const char* to_string(EntropyEstimator e) noexcept {
  switch (e) {
    case EntropyEstimator::Plugin: return "plugin";
    case EntropyEstimator::MillerMadow: return "miller_madow";
    case EntropyEstimator::Vasicek: return "vasicek";
    case EntropyEstimator::KnnKL: return "knn_kl";
  }
  return "?";
}

double shannon_nats(std::span<const double> p) {
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log(v);
  return h;
}

EntropyEstimate entropy_plugin(const ProbTable& p) {
  EntropyEstimate e;
  e.value = shannon_nats(p.probs());
  e.estimator = EntropyEstimator::Plugin;
  e.hyperparams = {{"alphabet_size", p.size()}, {"input", "distribution"}};
  return e;
}

EntropyEstimate entropy_plugin(const DiscreteSeries& series) {
  EntropyEstimate e = entropy_plugin(ProbTable::from_series(series));
  e.hyperparams = {{"alphabet_size", series.alphabet_size()}, {"n", series.size()},
                   {"input", "empirical frequencies"}};
  return e;
}

EntropyEstimate entropy_miller_madow(const DiscreteSeries& series) {
  require(series.size() >= 1, ErrorKind::InsufficientData, "Miller-Madow needs N >= 1");
  const ProbTable p = ProbTable::from_series(series);
  const auto observed = static_cast<double>(
      std::count_if(p.probs().begin(), p.probs().end(), [](double v) { return v > 0.0; }));
  const double n = static_cast<double>(series.size());
  EntropyEstimate e;
  e.value = shannon_nats(p.probs()) + (observed - 1.0) / (2.0 * n);
  e.estimator = EntropyEstimator::MillerMadow;
  e.hyperparams = {{"alphabet_size", series.alphabet_size()}, {"observed_symbols", observed},
                   {"n", series.size()}};
  return e;
}

EntropyEstimate entropy_vasicek(std::span<const double> samples, std::optional<std::size_t> m_opt) {
  const std::size_t n = samples.size();
  require(n >= 3, ErrorKind::InsufficientData, "Vasicek estimator needs N >= 3");
  const std::size_t m = m_opt.value_or(static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n)))));
  require(m >= 1, ErrorKind::InvalidConfig, "spacing m must be >= 1");
  require(n >= 2 * m + 1, ErrorKind::InvalidConfig, "Vasicek estimator needs N >= 2m + 1");
  std::vector<double> x(samples.begin(), samples.end());
  for (double v : x) require(std::isfinite(v), ErrorKind::InvalidInput, "non-finite sample");
  std::sort(x.begin(), x.end());
  require(x.back() > x.front(), ErrorKind::DegenerateInput, "constant sample has no density");

  const double scale = static_cast<double>(n) / (2.0 * static_cast<double>(m));
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double upper = x[std::min(i + m, n - 1)];
    const double lower = x[i >= m ? i - m : 0];
    const double spacing = upper - lower;
    require(spacing > 0.0, ErrorKind::DegenerateInput,
            "zero m-spacing: more than 2m tied values; increase m or jitter");
    sum += std::log(scale * spacing);
  }
  EntropyEstimate e;
  e.value = sum / static_cast<double>(n);
  e.estimator = EntropyEstimator::Vasicek;
  e.hyperparams = {{"m", m}, {"n", n}, {"m_rule", m_opt ? "user" : "floor(sqrt(N))"}};
  return e;
}

EntropyEstimate entropy_vasicek(const SampleMatrix& samples, std::optional<std::size_t> m) {
  require(samples.cols() == 1, ErrorKind::InvalidConfig,
          "spacing estimators are only defined for one-dimensional data; use the kNN estimator");
  return entropy_vasicek(samples.data(), m);
}

EntropyEstimate entropy_knn(const SampleMatrix& samples, const KnnEntropyOptions& options) {
  const std::size_t n = samples.rows();
  const std::size_t d = samples.cols();
  const std::size_t k = options.k;
  require(k >= 1 && k < n, ErrorKind::InvalidConfig, "kNN entropy needs 1 <= k < N");
  EntropyEstimate e;
  const SampleMatrix prepared =
      prepare_for_knn(samples, {.standardize = false, .jitter = options.jitter, .seed = options.seed},
                      &e.preprocessing);
  const NeighborIndex index(prepared);
  double log_sum = 0.0;
  for (const double eps : index.kth_distance_all(k)) {
    require(eps > 0.0, ErrorKind::DegenerateInput,
            "duplicate points give a zero neighbor distance");
    log_sum += std::log(eps);
  }
  const double dd = static_cast<double>(d);
  e.value = digamma(static_cast<double>(n)) - digamma(static_cast<double>(k)) + dd * kLn2 +
            dd * log_sum / static_cast<double>(n);
  e.estimator = EntropyEstimator::KnnKL;
  e.hyperparams = {{"k", k}, {"n", n}, {"d", d}, {"norm", "max"}};
  return e;
}

}  // namespace infometer
