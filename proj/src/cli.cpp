#include "infometer/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <sstream>

#include "infometer/advisor.hpp"
#include "infometer/analysis.hpp"
#include "infometer/divergence.hpp"
#include "infometer/io.hpp"
#include "infometer/simulate.hpp"
#include "infometer/special.hpp"

namespace infometer::cli {

namespace {

struct Options {
  // shared
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  double alpha = 0.05;
  std::size_t surrogates = 200;
  std::size_t k = 4;
  std::size_t replicates = 500;
  double level = 0.95;
  std::string embedding;
  std::vector<std::size_t> target_lag_set;
  std::vector<std::size_t> source_lag_set;
  bool bits = false;
  std::string format = "json";
  std::string output;

  // data
  std::string input;
  std::vector<std::string> columns;
  std::string estimator = "auto";
  int bins = 0;
  std::string bin_rule = "equal_frequency";
  std::vector<std::string> x, y, z;
  std::string source, target;
  std::vector<std::string> condition;
  std::size_t window = 1;
  std::size_t select_max_lag = 0;

  // kl
  std::vector<double> p, q;
  std::string smoothing = "none";
  double epsilon = 1e-10;

  // causal
  std::string tpm;
  std::vector<std::size_t> grain;
  std::vector<std::size_t> v_nodes, e_nodes;
  std::size_t history = 1;

  // scan
  std::string correction = "bonferroni";
  bool pairwise = false;

  // advise
  std::string objective;
  std::string kind = "continuous";
  bool discrete = false, continuous = false, mixed = false;
  std::size_t dimension = 1;
  std::size_t samples = 1000;
  bool time_ordered = false;
  bool interventional = false;

  // simulate
  std::string system;
  std::size_t n = 10000;
  double coupling = 0.5;
  std::size_t delay = 1;
  double phi = 0.9;
  double rho = 0.6;
  std::size_t streams = 5;
  std::size_t nodes = 3;
  double stay = 0.9;
  std::size_t episodes = 200;
  std::size_t length = 50;
};

struct Context {
  Options o;
  std::uint64_t seed = 0;
  bool seed_generated = false;
  Workers workers{};

  AnalysisConfig analysis() const {
    AnalysisConfig c;
    c.k = o.k;
    c.surrogates = o.surrogates;
    c.alpha = o.alpha;
    c.replicates = o.replicates;
    c.level = o.level;
    c.seed = RngSeed{seed};
    c.workers = workers;
    return c;
  }
};

// ---- input helpers ---------------------------------------------------------

SampleMatrix load(const Options& o, bool time_ordered) {
  require(!o.input.empty(), ErrorKind::InvalidConfig, "--input is required");
  return load_samples(o.input, time_ordered);
}

SampleMatrix pick(const SampleMatrix& data, const std::vector<std::string>& names) {
  if (names.empty()) return data;
  std::vector<std::size_t> idx;
  for (const auto& name : names) idx.push_back(data.column_index(name));
  return data.select_columns(idx);
}

bool integral(const SampleMatrix& m) {
  return std::all_of(m.data().begin(), m.data().end(), [](double v) { return std::floor(v) == v; });
}

BinRule bin_rule(const Options& o) {
  if (o.bin_rule == "equal_width") return BinRule::EqualWidth;
  if (o.bin_rule == "equal_frequency") return BinRule::EqualFrequency;
  fail(ErrorKind::InvalidConfig, "unknown bin rule '" + o.bin_rule + "'");
}

// Each column replaced by its bin symbols; steps appended to `log`.
SampleMatrix discretize_columns(const SampleMatrix& m, const Options& o, PreprocessLog& log) {
  std::vector<std::vector<double>> cols;
  for (std::size_t c = 0; c < m.cols(); ++c) {
    const auto col = m.column(c);
    Discretized d = discretize(col, bin_rule(o), o.bins);
    d.step.params["column"] = m.column_names()[c];
    d.step.params["edges"] = d.edges;
    log.push_back(d.step);
    cols.emplace_back(d.series.symbols().begin(), d.series.symbols().end());
  }
  return SampleMatrix::from_columns(cols, m.time_ordered(), m.column_names());
}

std::vector<double> discretize_series(std::span<const double> v, const std::string& name, const Options& o,
                                      PreprocessLog& log) {
  Discretized d = discretize(v, bin_rule(o), o.bins);
  d.step.params["column"] = name;
  d.step.params["edges"] = d.edges;
  log.push_back(d.step);
  return {d.series.symbols().begin(), d.series.symbols().end()};
}

MiEstimator mi_estimator(const Options& o, bool data_integral) {
  if (o.estimator == "plugin") return MiEstimator::Plugin;
  if (o.estimator == "ksg") return MiEstimator::Ksg;
  require(o.estimator == "auto", ErrorKind::InvalidConfig, "unknown estimator '" + o.estimator + "'");
  return data_integral || o.bins > 0 ? MiEstimator::Plugin : MiEstimator::Ksg;
}

EmbeddingSpec embedding(const Options& o) {
  EmbeddingSpec spec;
  if (!o.embedding.empty()) {
    std::vector<std::size_t> v;
    std::stringstream ss(o.embedding);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t pos = 0;
        const long long x = std::stoll(item, &pos);
        require(pos == item.size() && x >= 1, ErrorKind::InvalidConfig, "");
        v.push_back(static_cast<std::size_t>(x));
      } catch (const std::logic_error&) {
        fail(ErrorKind::InvalidConfig, "--embedding expects l,k,tau with positive integers");
      }
    }
    require(v.size() == 3, ErrorKind::InvalidConfig, "--embedding expects l,k,tau");
    spec.target_lags = v[0];
    spec.source_lags = v[1];
    spec.delay = v[2];
  }
  if (!o.target_lag_set.empty()) spec.target_lag_set = o.target_lag_set;
  if (!o.source_lag_set.empty()) spec.source_lag_set = o.source_lag_set;
  spec.defaulted = o.embedding.empty() && o.target_lag_set.empty() && o.source_lag_set.empty();
  spec.validate();
  return spec;
}

Tpm load_tpm(const Options& o) {
  require(!o.tpm.empty(), ErrorKind::InvalidConfig, "--tpm is required");
  std::ifstream in(o.tpm);
  require(static_cast<bool>(in), ErrorKind::InvalidInput, "cannot open " + o.tpm);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    fail(ErrorKind::InvalidInput, o.tpm + ": " + e.what());
  }
  return Tpm::from_json(j);
}

// ---- manifests ------------------------------------------------------------

void convert_to_bits(Json& m) {
  if (m["result"]["unit"] != "nats") return;
  m["result"]["value"] = nats_to_bits(m["result"]["value"].get<double>());
  m["result"]["unit"] = "bits";
  auto& u = m["uncertainty"];
  for (const char* key : {"point", "low", "high"})
    if (u.contains(key)) u[key] = nats_to_bits(u[key].get<double>());
  auto& s = m["significance"];
  if (s.contains("observed")) {
    s["observed"] = nats_to_bits(s["observed"].get<double>());
    for (auto& v : s["null_samples"]) v = nats_to_bits(v.get<double>());
  }
}

Json finalize(ManifestDraft d, const Context& ctx) {
  if (d.preprocessing && d.preprocessing->empty())
    d.preprocessing->push_back({"none", {{"reason", "data used as given"}}});
  Json m = build_manifest(d).to_json();
  if (ctx.o.bits) convert_to_bits(m);
  return ReportManifest::parse(m).to_json();
}

PreprocessLog concat(PreprocessLog a, const PreprocessLog& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

// ---- commands -------------------------------------------------------------

Json cmd_entropy(const Context& ctx) {
  const Options& o = ctx.o;
  SampleMatrix data = pick(load(o, false), o.columns);
  PreprocessLog pre;
  EntropyEstimator est;
  if (o.estimator == "plugin") est = EntropyEstimator::Plugin;
  else if (o.estimator == "miller_madow") est = EntropyEstimator::MillerMadow;
  else if (o.estimator == "vasicek") est = EntropyEstimator::Vasicek;
  else if (o.estimator == "knn" || o.estimator == "knn_kl") est = EntropyEstimator::KnnKL;
  else {
    require(o.estimator == "auto", ErrorKind::InvalidConfig, "unknown estimator '" + o.estimator + "'");
    if (integral(data) || o.bins > 0) est = EntropyEstimator::Plugin;
    else est = data.cols() == 1 ? EntropyEstimator::Vasicek : EntropyEstimator::KnnKL;
  }
  const bool discrete = est == EntropyEstimator::Plugin || est == EntropyEstimator::MillerMadow;
  if (discrete && !integral(data)) {
    require(o.bins > 0, ErrorKind::InvalidConfig, "plugin entropy of continuous data needs --bins");
    data = discretize_columns(data, o, pre);
  }
  EntropyEstimate e = analyze_entropy(data, est, ctx.analysis());
  e.preprocessing = concat(pre, e.preprocessing);
  ManifestDraft d = draft_for(e);
  d.details["columns"] = data.column_names();
  d.details["n"] = data.rows();
  return Json::array({finalize(d, ctx)});
}

Json cmd_kl(const Context& ctx) {
  const Options& o = ctx.o;
  Smoothing smoothing = NoSmoothing{};
  if (o.smoothing == "additive") smoothing = AdditiveSmoothing{o.epsilon};
  else if (o.smoothing == "clip") smoothing = ClipFloor{o.epsilon};
  else require(o.smoothing == "none", ErrorKind::InvalidConfig, "unknown smoothing '" + o.smoothing + "'");

  struct Measure {
    const char* name;
    std::function<double(const ProbTable&, const ProbTable&)> f;
  };
  const std::vector<Measure> measures = {
      {"kl_forward", [&](const ProbTable& p, const ProbTable& q) { return kl_discrete(p, q, smoothing).value; }},
      {"kl_reverse",
       [&](const ProbTable& p, const ProbTable& q) {
         return kl_discrete(p, q, smoothing, Direction::Reverse).value;
       }},
      {"cross_entropy", [&](const ProbTable& p, const ProbTable& q) { return cross_entropy(p, q, smoothing); }},
      {"jensen_shannon", [](const ProbTable& p, const ProbTable& q) { return jensen_shannon(p, q); }},
  };

  Json out = Json::array();
  PreprocessLog pre{{"smoothing", describe(smoothing)}};
  if (!o.p.empty() || !o.q.empty()) {
    require(o.p.size() == o.q.size() && !o.p.empty(), ErrorKind::InvalidInput,
            "--p and --q must have the same length");
    const ProbTable p = ProbTable::from_counts(o.p);
    const ProbTable q = ProbTable::from_counts(o.q);
    for (const auto& m : measures) {
      ManifestDraft d;
      d.measure = m.name;
      d.value = m.f(p, q);
      d.estimator = "plugin";
      d.hyperparameters = {{"alphabet", p.size()}};
      d.exact_uncertainty = Json{{"type", "exact"}, {"reason", "distributions supplied directly; no sampling error"}};
      d.significance_not_applicable = "divergence between given distributions; there is no sample to test";
      d.preprocessing = pre;
      out.push_back(finalize(d, ctx));
    }
    return out;
  }
  // Two columns of integer symbols, one sample from each distribution.
  const SampleMatrix data = pick(load(o, false), o.columns);
  require(data.cols() == 2, ErrorKind::InvalidConfig, "kl from samples needs exactly two columns");
  require(integral(data), ErrorKind::InvalidInput, "kl from samples needs integer symbols");
  double lo = data(0, 0), hi = lo;
  for (double v : data.data()) lo = std::min(lo, v), hi = std::max(hi, v);
  const auto alphabet = static_cast<std::size_t>(hi - lo) + 1;
  auto tables = [&](std::span<const std::size_t> rows) {
    std::vector<double> cp(alphabet, 0.0), cq(alphabet, 0.0);
    for (std::size_t r : rows) {
      cp[static_cast<std::size_t>(data(r, 0) - lo)] += 1.0;
      cq[static_cast<std::size_t>(data(r, 1) - lo)] += 1.0;
    }
    return std::pair{ProbTable::from_counts(cp), ProbTable::from_counts(cq)};
  };
  std::vector<std::size_t> all(data.rows());
  std::iota(all.begin(), all.end(), 0);
  const auto [p, q] = tables(all);
  const AnalysisConfig cfg = ctx.analysis();
  for (const auto& m : measures) {
    ManifestDraft d;
    d.measure = m.name;
    d.value = m.f(p, q);
    d.estimator = "plugin";
    d.hyperparameters = {{"alphabet", alphabet}, {"n", data.rows()}};
    BootstrapConfig bc;
    bc.replicates = cfg.replicates;
    bc.level = cfg.level;
    bc.seed = cfg.bootstrap_seed();
    bc.workers = cfg.workers;
    d.ci = bootstrap_ci(
        d.value, data.rows(),
        [&](std::span<const std::size_t> rows) {
          const auto [bp, bq] = tables(rows);
          return m.f(bp, bq);
        },
        bc);
    d.significance_not_applicable = "divergence is descriptive here; no null hypothesis is tested";
    d.preprocessing = pre;
    d.details["columns"] = data.column_names();
    out.push_back(finalize(d, ctx));
  }
  return out;
}

Json cmd_mi(const Context& ctx, bool conditional) {
  const Options& o = ctx.o;
  require(!o.x.empty() && !o.y.empty(), ErrorKind::InvalidConfig, "--x and --y are required");
  require(!conditional || !o.z.empty(), ErrorKind::InvalidConfig, "cmi needs --z");
  const SampleMatrix data = load(o, false);
  SampleMatrix x = pick(data, o.x), y = pick(data, o.y);
  std::optional<SampleMatrix> z;
  if (conditional) z = pick(data, o.z);
  const bool all_integral = integral(x) && integral(y) && (!z || integral(*z));
  const MiEstimator est = mi_estimator(o, all_integral);
  PreprocessLog pre;
  if (est == MiEstimator::Plugin && !all_integral) {
    require(o.bins > 0, ErrorKind::InvalidConfig, "plugin MI of continuous data needs --bins");
    x = discretize_columns(x, o, pre);
    y = discretize_columns(y, o, pre);
    if (z) z = discretize_columns(*z, o, pre);
  }
  MiEstimate e = analyze_mi(x, y, z ? &*z : nullptr, est, ctx.analysis());
  e.preprocessing = concat(pre, e.preprocessing);
  ManifestDraft d = draft_for(e, conditional ? "conditional_mutual_information" : "mutual_information");
  d.details["x"] = o.x;
  d.details["y"] = o.y;
  if (conditional) d.details["z"] = o.z;
  d.details["n"] = x.rows();
  return Json::array({finalize(d, ctx)});
}

// Target, source and conditioning series, discretized for plugin estimation.
struct TemporalInputs {
  std::vector<double> target, source;
  std::vector<std::vector<double>> conditioning;
  MiEstimator estimator = MiEstimator::Ksg;
  PreprocessLog pre;
};

TemporalInputs temporal_inputs(const Context& ctx, const std::string& target, const std::string& source,
                               const std::vector<std::string>& condition) {
  const Options& o = ctx.o;
  const SampleMatrix data = load(o, true);
  std::vector<std::string> names{target};
  if (!source.empty()) names.push_back(source);
  names.insert(names.end(), condition.begin(), condition.end());
  const SampleMatrix used = pick(data, names);
  TemporalInputs in;
  in.estimator = mi_estimator(o, integral(used));
  auto get = [&](const std::string& name) {
    std::vector<double> v = data.column(data.column_index(name));
    if (in.estimator == MiEstimator::Plugin && !integral(SampleMatrix::from_column(v))) {
      require(o.bins > 0, ErrorKind::InvalidConfig, "plugin estimation of continuous data needs --bins");
      v = discretize_series(v, name, o, in.pre);
    }
    return v;
  };
  in.target = get(target);
  if (!source.empty()) in.source = get(source);
  for (const auto& c : condition) in.conditioning.push_back(get(c));
  return in;
}

Json cmd_te(const Context& ctx) {
  const Options& o = ctx.o;
  require(!o.source.empty() && !o.target.empty(), ErrorKind::InvalidConfig, "--source and --target are required");
  TemporalInputs in = temporal_inputs(ctx, o.target, o.source, o.condition);
  EmbeddingSpec spec = embedding(o);
  std::optional<NonuniformSelection> selection;
  if (o.select_max_lag > 0) {
    SelectionConfig sc;
    sc.max_lag = o.select_max_lag;
    sc.surrogates = o.surrogates;
    sc.alpha = o.alpha;
    sc.estimator = {in.estimator, o.k, true, true, ctx.analysis().jitter_seed()};
    sc.workers = ctx.workers;
    const std::vector<std::vector<double>> sources{in.source};
    selection = select_embedding_nonuniform(in.target, sources, sc);
    require(!selection->target_lags.empty() || !selection->source_lags[0].empty(), ErrorKind::InvalidInput,
            "embedding selection found no informative lag");
    EmbeddingSpec chosen;
    chosen.target_lag_set = selection->target_lags.empty() ? std::vector<std::size_t>{1} : selection->target_lags;
    chosen.source_lag_set =
        selection->source_lags[0].empty() ? std::vector<std::size_t>{1} : selection->source_lags[0];
    spec = chosen;
  }
  TeResult r = analyze_te(in.source, in.target, spec, in.estimator, ctx.analysis(), in.conditioning);
  r.preprocessing = concat(in.pre, r.preprocessing);
  ManifestDraft d = draft_for(r);
  d.details["source"] = o.source;
  d.details["target"] = o.target;
  d.details["conditioning"] = o.condition;
  if (selection) d.details["embedding_selection"] = selection->to_json();
  return Json::array({finalize(d, ctx)});
}

std::string single_column(const Options& o) {
  require(o.columns.size() == 1, ErrorKind::InvalidConfig, "exactly one --column is required");
  return o.columns.front();
}

Json cmd_ais(const Context& ctx) {
  const std::string column = single_column(ctx.o);
  TemporalInputs in = temporal_inputs(ctx, column, "", {});
  TeResult r = analyze_ais(in.target, embedding(ctx.o), in.estimator, ctx.analysis());
  r.preprocessing = concat(in.pre, r.preprocessing);
  ManifestDraft d = draft_for(r);
  d.details["column"] = column;
  return Json::array({finalize(d, ctx)});
}

Json cmd_predinfo(const Context& ctx) {
  const std::string column = single_column(ctx.o);
  TemporalInputs in = temporal_inputs(ctx, column, "", {});
  MiEstimate e = analyze_predictive(in.target, ctx.o.window, in.estimator, ctx.analysis());
  e.preprocessing = concat(in.pre, e.preprocessing);
  ManifestDraft d = draft_for(e, "predictive_information");
  d.details["column"] = column;
  d.details["window"] = ctx.o.window;
  return Json::array({finalize(d, ctx)});
}

Json cmd_ei(const Context& ctx) {
  const Tpm tpm = load_tpm(ctx.o);
  ManifestDraft d = exact_draft("effective_information", effective_information(tpm), tpm);
  d.details["max_bits"] = tpm.nodes();
  return Json::array({finalize(d, ctx)});
}

Json cmd_phi(const Context& ctx) {
  const Tpm tpm = load_tpm(ctx.o);
  const PhiResult r = phi(tpm, ctx.workers);
  ManifestDraft d = exact_draft("phi", r.value, tpm);
  d.estimator = "exhaustive-bipartition-search";
  d.hyperparameters["variant"] = r.variant;
  d.details["variant"] = r.variant;
  d.details["mip"] = r.mip.to_json();
  d.details["cuts_evaluated"] = r.cuts_evaluated;
  auto warnings = tpm.warnings();
  warnings.insert(warnings.end(), r.warnings.begin(), r.warnings.end());
  d.details["warnings"] = warnings;
  return Json::array({finalize(d, ctx)});
}

Json cmd_emergence(const Context& ctx) {
  const Tpm tpm = load_tpm(ctx.o);
  const CoarseGraining grain{ctx.o.grain};
  const EmergenceResult r = causal_emergence(tpm, grain);
  ManifestDraft d = exact_draft("causal_emergence", r.ei_macro - r.ei_micro, tpm);
  d.preprocessing->push_back({"coarse_graining", grain.to_json()});
  Json macro = Json::array();
  for (std::size_t i = 0; i < r.macro.inputs(); ++i) {
    const auto row = r.macro.row(i);
    macro.push_back(std::vector<double>(row.begin(), row.end()));
  }
  d.details["ei_micro"] = r.ei_micro;
  d.details["ei_macro"] = r.ei_macro;
  d.details["emergent"] = r.emergent;
  d.details["grain"] = grain.to_json();
  d.details["macro_tpm"] = macro;
  return Json::array({finalize(d, ctx)});
}

std::vector<Episode> load_episodes(const Options& o) {
  const SampleMatrix data = load(o, true);
  const std::size_t v = data.column_index("v");
  const std::size_t e = data.column_index("e");
  const auto& names = data.column_names();
  const bool has_episode = std::find(names.begin(), names.end(), "episode") != names.end();
  const std::size_t ep = has_episode ? data.column_index("episode") : 0;
  require(integral(data), ErrorKind::InvalidInput, "episode files hold integer symbols");
  std::vector<Episode> out;
  for (std::size_t r = 0; r < data.rows(); ++r) {
    if (out.empty() || (has_episode && data(r, ep) != data(r - 1, ep))) out.emplace_back();
    out.back().v.push_back(static_cast<int>(data(r, v)));
    out.back().e.push_back(static_cast<int>(data(r, e)));
  }
  return out;
}

Json cmd_autonomy(const Context& ctx) {
  const Options& o = ctx.o;
  require(!o.tpm.empty() || !o.input.empty(), ErrorKind::InvalidConfig,
          "autonomy needs --tpm (causal) and/or --input episodes (observational)");
  Json out = Json::array();
  if (!o.tpm.empty()) {
    const Tpm tpm = load_tpm(o);
    SystemSplit split{o.v_nodes, o.e_nodes, o.history};
    split.validate(tpm.nodes());
    const CausalAutonomy a = autonomy_causal(tpm, split);
    ManifestDraft d = exact_draft("autonomy_causal", a.value, tpm);
    d.preprocessing->push_back({"system_split", split.to_json()});
    d.details["split"] = split.to_json();
    d.details["ei_total"] = a.ei_total;
    d.details["ratio"] = a.ratio ? Json(*a.ratio) : Json(nullptr);
    out.push_back(finalize(d, ctx));
  }
  if (!o.input.empty()) {
    const std::vector<Episode> episodes = load_episodes(o);
    const AutonomyAnalysis a = analyze_autonomy(episodes, o.history, ctx.analysis());
    ManifestDraft d;
    d.measure = "autonomy_observational";
    d.value = a.estimate.value;
    d.unit = "bits";
    d.estimator = "plugin";
    d.hyperparameters = {{"history", o.history}};
    d.ci = a.ci;
    d.significance_not_applicable = "no surrogate null is defined for observational autonomy";
    d.preprocessing = PreprocessLog{{"episodes", {{"count", episodes.size()}, {"samples", a.estimate.samples}}}};
    if (!o.v_nodes.empty()) d.preprocessing->push_back({"system_split", {{"v_nodes", o.v_nodes}, {"e_nodes", o.e_nodes}}});
    d.details = {{"h_given_env", a.estimate.h_given_env},
                 {"h_given_self_and_env", a.estimate.h_given_self_and_env},
                 {"samples", a.estimate.samples},
                 {"episodes", a.estimate.episodes}};
    out.push_back(finalize(d, ctx));
  }
  return out;
}

Json cmd_scan(const Context& ctx, Json& summary) {
  const Options& o = ctx.o;
  SampleMatrix data = pick(load(o, true), o.columns);
  PreprocessLog pre;
  const MiEstimator est = mi_estimator(o, integral(data));
  if (est == MiEstimator::Plugin && !integral(data)) {
    require(o.bins > 0, ErrorKind::InvalidConfig, "plugin estimation of continuous data needs --bins");
    data = discretize_columns(data, o, pre);
  }
  const AnalysisConfig cfg = ctx.analysis();
  ScanConfig sc;
  sc.embedding = embedding(o);
  sc.estimator = {est, o.k, true, true, cfg.jitter_seed()};
  sc.surrogates = o.surrogates;
  sc.alpha = o.alpha;
  sc.correction = correction_from_string(o.correction);
  sc.condition_on_others = !o.pairwise;
  sc.bootstrap_replicates = o.replicates;
  sc.level = o.level;
  sc.seed = cfg.surrogate_seed();
  sc.workers = ctx.workers;
  const ScanResult r = network_scan(data, sc);

  Json out = Json::array();
  for (const ScanEdge& edge : r.edges) {
    TeResult te = edge.te;
    te.preprocessing = concat(pre, te.preprocessing);
    ManifestDraft d = draft_for(te);
    d.details["source"] = r.names[edge.source];
    d.details["target"] = r.names[edge.target];
    d.details["adjusted_p"] = edge.adjusted_p;
    d.details["rejected"] = edge.rejected;
    d.details["correction"] = to_string(r.correction.method);
    d.details["conditioning"] = r.conditioned ? "pasts of all other streams" : "none (pairwise)";
    out.push_back(finalize(d, ctx));
  }
  Json rejected = Json::array();
  for (auto [s, t] : r.rejected_edges()) rejected.push_back({r.names[s], r.names[t]});
  summary = {{"streams", r.names},
             {"tests", r.edges.size()},
             {"correction", to_string(r.correction.method)},
             {"alpha", r.correction.alpha},
             {"conditioned", r.conditioned},
             {"rejected", rejected}};
  return out;
}

Json cmd_advise(const Context& ctx) {
  const Options& o = ctx.o;
  Query q;
  q.objective = objective_from_string(o.objective);
  const int flags = int(o.discrete) + int(o.continuous) + int(o.mixed);
  require(flags <= 1, ErrorKind::InvalidConfig, "choose one of --discrete, --continuous, --mixed");
  q.data_kind = o.discrete ? DataKind::Discrete
              : o.continuous ? DataKind::Continuous
              : o.mixed ? DataKind::Mixed
                        : data_kind_from_string(o.kind);
  q.dimension = o.dimension;
  q.n_samples = o.samples;
  q.time_ordered = o.time_ordered || q.objective == Objective::DirectedInfluence ||
                   q.objective == Objective::TemporalMemory;
  q.interventional_access = o.interventional;
  const Json query = {{"objective", to_string(q.objective)},
                      {"data_kind", to_string(q.data_kind)},
                      {"dimension", q.dimension},
                      {"n_samples", q.n_samples},
                      {"time_ordered", q.time_ordered},
                      {"interventional_access", q.interventional_access}};
  return {{"query", query}, {"recommendation", recommend(q).to_json()}};
}

void write_tpm(std::ostream& out, const Tpm& tpm) { out << tpm.to_json().dump(2) << '\n'; }

void cmd_simulate(const Context& ctx, std::ostream& out) {
  const Options& o = ctx.o;
  const std::uint64_t seed = RngSeed{ctx.seed}.derive(0x73696d);
  const std::string& s = o.system;
  if (s == "coupled-ar") {
    const sim::CoupledAr d = sim::coupled_ar(o.n, o.coupling, o.delay, seed);
    write_csv(out, SampleMatrix::from_columns({d.x, d.y}, true, {"x", "y"}));
  } else if (s == "ar1") {
    write_csv(out, SampleMatrix::from_column(sim::ar1(o.n, o.phi, seed), true, "x"));
  } else if (s == "gaussian") {
    write_csv(out, sim::gaussian_pair(o.n, o.rho, seed));
  } else if (s == "planted-network") {
    write_csv(out, sim::planted_network(o.n, seed, o.coupling));
  } else if (s == "chain") {
    write_csv(out, sim::chain(o.n, seed, o.coupling));
  } else if (s == "independent") {
    write_csv(out, sim::independent_streams(o.n, o.streams, seed));
  } else if (s == "identity") {
    write_tpm(out, sim::identity_tpm(o.nodes));
  } else if (s == "swap") {
    write_tpm(out, sim::swap_tpm());
  } else if (s == "degenerate") {
    write_tpm(out, sim::degenerate_tpm());
  } else if (s == "discordance") {
    write_tpm(out, sim::discordance_tpm(o.stay));
  } else if (s == "self-copy") {
    write_tpm(out, sim::self_copy_tpm());
  } else if (s == "discordance-episodes" || s == "self-copy-episodes") {
    const Tpm tpm = s == "discordance-episodes" ? sim::discordance_tpm(o.stay) : sim::self_copy_tpm();
    const auto episodes = sim::sample_episodes(tpm, {{0}, {1}, 1}, o.episodes, o.length, seed);
    out << "episode,v,e\n";
    for (std::size_t i = 0; i < episodes.size(); ++i)
      for (std::size_t t = 0; t < episodes[i].v.size(); ++t)
        out << i << ',' << episodes[i].v[t] << ',' << episodes[i].e[t] << '\n';
  } else {
    fail(ErrorKind::InvalidConfig, "unknown system '" + s + "'");
  }
}

// ---- output -----------------------------------------------------------------

std::string csv_field(const Json& j) {
  if (j.is_null()) return "";
  std::ostringstream ss;
  ss << j.dump();
  return ss.str();
}

void write_summary(std::ostream& out, const Json& results) {
  out << "measure,value,unit,ci_low,ci_high,p_value\n";
  for (const Json& m : results) {
    const Json& u = m.at("uncertainty");
    const Json& s = m.at("significance");
    out << m["result"]["measure"].get<std::string>() << ',' << csv_field(m["result"]["value"]) << ','
        << m["result"]["unit"].get<std::string>() << ',' << csv_field(u.value("low", Json())) << ','
        << csv_field(u.value("high", Json())) << ',' << csv_field(s.value("p_value", Json())) << '\n';
  }
}

std::uint64_t generated_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

void add_shared(CLI::App& app, Options& o) {
  app.add_option("--seed", o.seed, "Master seed (generated and printed when absent)");
  app.add_option("--workers", o.workers, "Worker threads (default: INFOMETER_WORKERS or 1)")
      ->check(CLI::PositiveNumber);
  app.add_option("--alpha", o.alpha, "Significance level")->check(CLI::Range(0.0, 1.0));
  app.add_option("--surrogates", o.surrogates, "Surrogate count S");
  app.add_option("--k", o.k, "kNN neighbors")->check(CLI::PositiveNumber);
  app.add_option("--replicates", o.replicates, "Bootstrap replicates B");
  app.add_option("--level", o.level, "Interval level")->check(CLI::Range(0.0, 1.0));
  app.add_flag("--bits", o.bits, "Report nats results in bits");
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv-summary"}));
  app.add_option("--output", o.output, "Write output to this file instead of stdout");
}

void add_data(CLI::App& sub, Options& o) {
  sub.add_option("--input", o.input, "CSV or JSON sample file");
  sub.add_option("--estimator", o.estimator, "Estimator id (auto by default)");
  sub.add_option("--bins", o.bins, "Discretize continuous columns into this many bins");
  sub.add_option("--bin-rule", o.bin_rule, "equal_width or equal_frequency");
}

void add_embedding(CLI::App& sub, Options& o) {
  sub.add_option("--embedding", o.embedding, "Uniform embedding l,k,tau");
  sub.add_option("--target-lags", o.target_lag_set, "Explicit target lags")->delimiter(',');
  sub.add_option("--source-lags", o.source_lag_set, "Explicit source lags")->delimiter(',');
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Context ctx;
  Options& o = ctx.o;
  CLI::App app{"Information-theoretic measurement toolkit", "infometer"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  add_shared(app, o);

  CLI::App* entropy = app.add_subcommand("entropy", "Entropy of one or more columns");
  add_data(*entropy, o);
  entropy->add_option("--column", o.columns, "Columns to use")->delimiter(',');

  CLI::App* kl = app.add_subcommand("kl", "KL divergence, cross-entropy and Jensen-Shannon");
  add_data(*kl, o);
  kl->add_option("--column", o.columns, "Two symbol columns: samples of p and q")->delimiter(',');
  kl->add_option("--p", o.p, "Distribution p (weights)")->delimiter(',');
  kl->add_option("--q", o.q, "Distribution q (weights)")->delimiter(',');
  kl->add_option("--smoothing", o.smoothing, "none, additive or clip");
  kl->add_option("--epsilon", o.epsilon, "Smoothing constant");

  CLI::App* mi = app.add_subcommand("mi", "Mutual information I(X;Y)");
  CLI::App* cmi = app.add_subcommand("cmi", "Conditional mutual information I(X;Y|Z)");
  for (CLI::App* sub : {mi, cmi}) {
    add_data(*sub, o);
    sub->add_option("--x", o.x, "X columns")->delimiter(',');
    sub->add_option("--y", o.y, "Y columns")->delimiter(',');
  }
  cmi->add_option("--z", o.z, "Z columns")->delimiter(',');

  CLI::App* te = app.add_subcommand("te", "Transfer entropy source -> target");
  add_data(*te, o);
  add_embedding(*te, o);
  te->add_option("--source", o.source, "Source column");
  te->add_option("--target", o.target, "Target column");
  te->add_option("--condition", o.condition, "Further series to condition on")->delimiter(',');
  te->add_option("--select-max-lag", o.select_max_lag, "Select a non-uniform embedding up to this lag");

  CLI::App* ais = app.add_subcommand("ais", "Active information storage");
  CLI::App* predinfo = app.add_subcommand("predinfo", "Predictive information");
  for (CLI::App* sub : {ais, predinfo}) {
    add_data(*sub, o);
    sub->add_option("--column", o.columns, "Series column");
  }
  add_embedding(*ais, o);
  predinfo->add_option("--window", o.window, "Block length T")->check(CLI::PositiveNumber);

  CLI::App* ei = app.add_subcommand("ei", "Effective information of a TPM");
  CLI::App* phi_cmd = app.add_subcommand("phi", "Bipartition Phi of a TPM");
  CLI::App* emergence = app.add_subcommand("emergence", "Causal emergence under a coarse-graining");
  CLI::App* autonomy = app.add_subcommand("autonomy", "Observational and causal autonomy");
  for (CLI::App* sub : {ei, phi_cmd, emergence, autonomy}) sub->add_option("--tpm", o.tpm, "TPM JSON file");
  emergence->add_option("--grain", o.grain, "Macro state of each micro state")->delimiter(',')->required();
  autonomy->add_option("--input", o.input, "Episode CSV with columns [episode,]v,e");
  autonomy->add_option("--v-nodes", o.v_nodes, "System nodes")->delimiter(',');
  autonomy->add_option("--e-nodes", o.e_nodes, "Environment nodes")->delimiter(',');
  autonomy->add_option("--history", o.history, "Environment history m")->check(CLI::PositiveNumber);

  CLI::App* advise = app.add_subcommand("advise", "Recommend a measure and estimator");
  advise->add_option("--objective", o.objective, "uncertainty, compare_distributions, dependence, "
                                                 "directed_influence, temporal_memory, agent_complexity")
      ->required();
  advise->add_option("--kind", o.kind, "discrete, continuous or mixed");
  advise->add_flag("--discrete", o.discrete);
  advise->add_flag("--continuous", o.continuous);
  advise->add_flag("--mixed", o.mixed);
  advise->add_option("--dim,--streams", o.dimension, "Dimension, or stream count for directed influence")
      ->check(CLI::PositiveNumber);
  advise->add_option("--samples", o.samples, "Sample count")->check(CLI::PositiveNumber);
  advise->add_flag("--time-ordered", o.time_ordered);
  advise->add_flag("--interventional", o.interventional, "A full TPM is available");

  CLI::App* scan = app.add_subcommand("scan", "All-pairs TE network scan with correction");
  add_data(*scan, o);
  add_embedding(*scan, o);
  scan->add_option("--column", o.columns, "Streams to include (default: all)")->delimiter(',');
  scan->add_option("--correction", o.correction, "bonferroni or bh_fdr");
  scan->add_flag("--pairwise", o.pairwise, "Do not condition on other streams");

  CLI::App* simulate = app.add_subcommand("simulate", "Generate ground-truth systems");
  simulate->add_option("system", o.system,
                       "coupled-ar, ar1, gaussian, planted-network, chain, independent, identity, swap, "
                       "degenerate, discordance, self-copy, discordance-episodes, self-copy-episodes")
      ->required();
  simulate->add_option("--n", o.n, "Series length")->check(CLI::PositiveNumber);
  simulate->add_option("--coupling", o.coupling);
  simulate->add_option("--delay", o.delay)->check(CLI::PositiveNumber);
  simulate->add_option("--phi", o.phi);
  simulate->add_option("--rho", o.rho);
  simulate->add_option("--streams", o.streams)->check(CLI::PositiveNumber);
  simulate->add_option("--nodes", o.nodes)->check(CLI::PositiveNumber);
  simulate->add_option("--stay", o.stay);
  simulate->add_option("--episodes", o.episodes)->check(CLI::PositiveNumber);
  simulate->add_option("--length", o.length)->check(CLI::PositiveNumber);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  ctx.seed_generated = !o.seed;
  ctx.seed = o.seed ? *o.seed : generated_seed();
  ctx.workers = o.workers ? Workers{*o.workers} : workers_from_env();

  std::ofstream file;
  if (!o.output.empty()) {
    file.open(o.output);
    if (!file) {
      err << "error: cannot write " << o.output << '\n';
      return kExitValidation;
    }
  }
  std::ostream& sink = o.output.empty() ? out : file;

  try {
    if (simulate->parsed()) {
      std::ostringstream buffer;
      cmd_simulate(ctx, buffer);
      sink << buffer.str();
      if (ctx.seed_generated) err << "seed: " << ctx.seed << '\n';
      return kExitOk;
    }
    Json doc;
    const CLI::App* sub = app.get_subcommands().front();
    doc["command"] = sub->get_name();
    doc["seed"] = ctx.seed;
    doc["seed_source"] = ctx.seed_generated ? "generated" : "flag";
    doc["version"] = kVersion;
    if (advise->parsed()) {
      doc.erase("seed");
      doc.erase("seed_source");
      doc.update(cmd_advise(ctx));
      sink << doc.dump(2) << '\n';
      return kExitOk;
    }
    Json results;
    Json summary;
    if (entropy->parsed()) results = cmd_entropy(ctx);
    else if (kl->parsed()) results = cmd_kl(ctx);
    else if (mi->parsed()) results = cmd_mi(ctx, false);
    else if (cmi->parsed()) results = cmd_mi(ctx, true);
    else if (te->parsed()) results = cmd_te(ctx);
    else if (ais->parsed()) results = cmd_ais(ctx);
    else if (predinfo->parsed()) results = cmd_predinfo(ctx);
    else if (ei->parsed()) results = cmd_ei(ctx);
    else if (phi_cmd->parsed()) results = cmd_phi(ctx);
    else if (emergence->parsed()) results = cmd_emergence(ctx);
    else if (autonomy->parsed()) results = cmd_autonomy(ctx);
    else if (scan->parsed()) results = cmd_scan(ctx, summary);
    doc["results"] = results;
    if (!summary.is_null()) doc["summary"] = summary;
    if (o.format == "csv-summary") {
      write_summary(sink, results);
      if (ctx.seed_generated) err << "seed: " << ctx.seed << '\n';
    } else {
      sink << doc.dump(2) << '\n';
    }
    return kExitOk;
  } catch (const MissingFieldError& e) {
    err << "error: incomplete report manifest, missing " << e.field() << '\n';
    return kExitMissingField;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const Json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
}

}  // namespace infometer::cli
