#include <doctest.h>

#include <cmath>

#include "infometer/inference.hpp"
#include "infometer/simulate.hpp"
#include "infometer/temporal.hpp"
#include "oracle.hpp"

using namespace infometer;

TEST_CASE("embedding taps and lagged slices") {
  EmbeddingSpec spec;
  spec.target_lags = 2;
  spec.source_lags = 3;
  spec.delay = 2;
  CHECK(spec.target_taps() == std::vector<std::size_t>{1, 3});
  CHECK(spec.source_taps() == std::vector<std::size_t>{1, 3, 5});
  CHECK(spec.max_lag() == 5);

  const std::vector<double> target{0, 1, 2, 3, 4, 5, 6, 7};
  const std::vector<double> source{10, 11, 12, 13, 14, 15, 16, 17};
  const Embedding e = embed(target, source, spec);
  CHECK(e.future.rows() == 3);
  // row 0 predicts x(5) from x(4), x(2) and y(4), y(2), y(0)
  CHECK(e.future(0, 0) == 5);
  CHECK(e.target_past(0, 0) == 4);
  CHECK(e.target_past(0, 1) == 2);
  CHECK(e.source_past->row(0)[2] == 10);
  CHECK(e.source_past->row(2)[0] == 16);

  EmbeddingSpec explicit_lags;
  explicit_lags.source_lag_set = std::vector<std::size_t>{2, 4};
  CHECK(explicit_lags.source_taps() == std::vector<std::size_t>{2, 4});
  CHECK(explicit_lags.max_lag() == 4);

  EmbeddingSpec bad;
  bad.target_lag_set = std::vector<std::size_t>{3, 3};
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = {};
  bad.delay = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
  CHECK_THROWS_AS(embed(std::vector<double>{1, 2}, {}, spec), Error);
}

TEST_CASE("plugin TE of a noisy copy matches enumeration") {
  Rng rng(40);
  const std::size_t n = 3000;
  std::vector<double> y(n), x(n, 0.0);
  for (std::size_t t = 0; t < n; ++t) y[t] = static_cast<double>(rng.below(2));
  for (std::size_t t = 0; t + 1 < n; ++t) x[t + 1] = rng.bernoulli(0.9) ? y[t] : 1.0 - y[t];

  std::vector<std::vector<int>> fut, src, past;
  for (std::size_t t = 0; t + 1 < n; ++t) {
    fut.push_back({static_cast<int>(x[t + 1])});
    src.push_back({static_cast<int>(y[t])});
    past.push_back({static_cast<int>(x[t])});
  }
  const double expect = oracle::plugin_cmi(fut, src, past);
  const TeResult r = transfer_entropy(y, x, {}, {.estimator = MiEstimator::Plugin});
  CHECK(r.value == doctest::Approx(expect).epsilon(1e-12));
  // ln 2 - H_b(0.1) in nats
  CHECK(r.value == doctest::Approx(std::log(2.0) + 0.9 * std::log(0.9) + 0.1 * std::log(0.1)).epsilon(0.05));
  CHECK(transfer_entropy(x, y, {}, {.estimator = MiEstimator::Plugin}).value < 0.01);
}

TEST_CASE("KSG TE equals conditional KSG on the prepared embedding") {
  const auto d = sim::coupled_ar(600, 0.5, 1, 3);
  const TemporalOptions o{.k = 4, .standardize = false, .jitter = false};
  const TeResult r = transfer_entropy(d.y, d.x, {}, o);
  oracle::Points fut, src, past;
  for (std::size_t t = 0; t + 1 < d.x.size(); ++t) {
    fut.push_back({d.x[t + 1]});
    src.push_back({d.y[t]});
    past.push_back({d.x[t]});
  }
  CHECK(r.value == doctest::Approx(oracle::ksg_cmi(fut, src, past, 4)).epsilon(1e-12));
  CHECK(r.rows == 599);
}

TEST_CASE("default embedding is flagged") {
  const auto d = sim::coupled_ar(300, 0.5, 1, 3);
  EmbeddingSpec spec;
  spec.defaulted = true;
  const TeResult r = transfer_entropy(d.y, d.x, spec);
  CHECK_FALSE(r.warnings.empty());
}

TEST_CASE("AIS and predictive information of AR(1) approach the Gaussian value") {
  const std::vector<double> x = sim::ar1(4000, 0.8, 2);
  const double expect = -0.5 * std::log(1.0 - 0.64);
  const TeResult ais = active_information_storage(x, {});
  CHECK(ais.measure == "active_information_storage");
  CHECK(ais.value == doctest::Approx(expect).epsilon(0.05 / expect));
  const MiEstimate pi = predictive_information(x, 1);
  CHECK(pi.value == doctest::Approx(expect).epsilon(0.05 / expect));
  // a second lag adds nothing for a Markov process
  EmbeddingSpec two;
  two.target_lags = 2;
  CHECK(active_information_storage(x, two).value == doctest::Approx(expect).epsilon(0.06 / expect));
}

TEST_CASE("surrogate evaluator reproduces the observed statistic on the identity order") {
  const auto d = sim::coupled_ar(800, 0.5, 1, 5);
  const TeEvaluator ev(d.x, d.y, {}, {});
  std::vector<std::size_t> id(ev.series_length());
  for (std::size_t i = 0; i < id.size(); ++i) id[i] = i;
  CHECK(ev.with_source_order(id) == ev.observed());
  std::vector<std::size_t> rows(ev.rows());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  CHECK(ev.on_rows(rows) == doctest::Approx(ev.observed()).epsilon(1e-12));
}

TEST_CASE("TE surrogate test separates driver and driven") {
  const auto d = sim::coupled_ar(2000, 0.5, 1, 9);
  const TeEvaluator forward(d.x, d.y, {}, {});
  const TeEvaluator reverse(d.y, d.x, {}, {});
  SurrogateConfig c;
  c.surrogates = 99;
  c.seed = RngSeed{1};
  const SignificanceResult f = te_surrogate_test(forward, c);
  CHECK(f.p_value == doctest::Approx(0.01));
  CHECK(f.null_samples.size() == 99);
  const SignificanceResult r = te_surrogate_test(reverse, c);
  CHECK(r.p_value > 0.05);
}

TEST_CASE("network conditioning removes an indirect path") {
  const SampleMatrix m = sim::chain(3000, 4);
  const std::vector<double> a = m.column(0), b = m.column(1), c = m.column(2);
  const std::vector<std::vector<double>> cond{b};
  EmbeddingSpec spec;
  spec.source_lags = 2;
  const double direct = transfer_entropy(a, c, spec).value;
  const double conditioned = transfer_entropy(a, c, spec, {}, cond).value;
  CHECK(conditioned < direct);
  CHECK(conditioned < 0.01);
}

TEST_CASE("nonuniform embedding picks the coupling lag") {
  const auto d = sim::coupled_ar(1500, 0.8, 3, 6);
  const std::vector<std::vector<double>> sources{d.y};
  SelectionConfig c;
  c.max_lag = 4;
  c.surrogates = 49;
  c.alpha = 0.05;
  const NonuniformSelection s = select_embedding_nonuniform(d.x, sources, c);
  REQUIRE(s.source_lags.size() == 1);
  // y(t+1-delay) drives x(t+1), i.e. source lag 3
  CHECK(std::find(s.source_lags[0].begin(), s.source_lags[0].end(), 3) != s.source_lags[0].end());
  CHECK(std::find(s.target_lags.begin(), s.target_lags.end(), 1) != s.target_lags.end());
  CHECK(s.to_json().contains("steps"));
}
