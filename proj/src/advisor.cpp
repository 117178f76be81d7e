#include "infometer/advisor.hpp"

namespace infometer {

namespace {

// Caveats per measure, verbatim from the decision table.
constexpr const char* kCaveats = R"json({
  "entropy": "Finite-sample bias grows with d; report estimator, k, and bootstrap CI",
  "kl_cross_entropy": "KL is asymmetric; undefined for disjoint support; distinguish forward vs reverse",
  "mutual_information": "Curse of dimensionality; neural bounds are not unbiased estimators; control leakage",
  "transfer_entropy": "Not interventional causality; confounders produce spurious TE; require surrogate tests",
  "predictive_information": "Requires stationarity; T choice affects value; not defined at a single lag",
  "phi": "NP-hard; variant-dependent; different Phi versions disagree; no consciousness claim",
  "effective_information": "Requires do-X_t access; coarse-graining choice strongly affects EI value",
  "autonomy": "Observational and causal variants disagree; boundary and time-lag sensitive; not a \"free will\" scalar"
})json";

// Ordered rules; the first whose conditions all hold wins. Absent conditions
// match anything. "caveat" names a catalog entry.
constexpr const char* kRules = R"json([
  {"objective": "uncertainty", "kinds": ["discrete"],
   "measure": "entropy", "estimator": "plugin", "caveat": "entropy",
   "checklist": ["compare with miller_madow when N is small relative to the alphabet"]},
  {"objective": "uncertainty", "kinds": ["mixed"],
   "measure": "entropy", "estimator": "plugin (after discretization)", "caveat": "entropy",
   "warnings": ["mixed data: continuous components must be discretized first; the value depends on the bins"],
   "checklist": ["record the bin rule and edges"]},
  {"objective": "uncertainty", "kinds": ["continuous"], "max_d": 1,
   "measure": "entropy", "estimator": "vasicek", "caveat": "entropy",
   "checklist": ["report the spacing m (default floor(sqrt(N)))"]},
  {"objective": "uncertainty", "kinds": ["continuous"], "min_d": 2, "max_d": 19,
   "measure": "entropy", "estimator": "knn_kl", "caveat": "entropy",
   "checklist": ["report k (default 4) and check sensitivity"]},
  {"objective": "uncertainty", "kinds": ["continuous"], "min_d": 20,
   "measure": "entropy", "estimator": "knn_kl", "caveat": "entropy",
   "warnings": ["d >= 20: kNN entropy is unreliable; reduce dimension before estimating"],
   "checklist": ["report k (default 4) and check sensitivity"]},

  {"objective": "compare_distributions", "kinds": ["discrete"],
   "measure": "kl_cross_entropy", "estimator": "plugin", "caveat": "kl_cross_entropy",
   "checklist": ["state the direction (forward p||q or reverse q||p)",
                 "state the smoothing; use jensen_shannon when supports are disjoint"]},
  {"objective": "compare_distributions",
   "measure": "kl_cross_entropy", "estimator": "plugin (after discretization)", "caveat": "kl_cross_entropy",
   "warnings": ["continuous density-ratio KL is not provided; the result depends on the discretization"],
   "checklist": ["state the direction (forward p||q or reverse q||p)",
                 "state the smoothing; use jensen_shannon when supports are disjoint",
                 "record the bin rule and edges"]},

  {"objective": "dependence", "kinds": ["discrete"],
   "measure": "mutual_information", "estimator": "plugin", "caveat": "mutual_information",
   "checklist": ["run a permutation significance test"]},
  {"objective": "dependence", "kinds": ["mixed"],
   "measure": "mutual_information", "estimator": "plugin (after discretization)", "caveat": "mutual_information",
   "warnings": ["mixed data: forest-based estimators are not provided; discretize-then-plugin is a second-best choice"],
   "checklist": ["run a permutation significance test", "record the bin rule and edges"]},
  {"objective": "dependence", "kinds": ["continuous"], "max_d": 19,
   "measure": "mutual_information", "estimator": "ksg", "caveat": "mutual_information",
   "checklist": ["report k and check sensitivity at k in {3, 5, 10}", "run a permutation significance test"]},
  {"objective": "dependence", "kinds": ["continuous"], "min_d": 20,
   "measure": "mutual_information", "estimator": "ksg", "caveat": "mutual_information",
   "warnings": ["d >= 20: KSG is unreliable at this dimension; reduce dimension first (e.g. project to <= 15 components)",
                "neural variational bounds are training surrogates and are not offered as estimators"],
   "checklist": ["report k and check sensitivity at k in {3, 5, 10}", "run a permutation significance test",
                 "record the dimension reduction applied"]},

  {"objective": "directed_influence", "min_d": 3, "kinds": ["continuous"],
   "measure": "transfer_entropy", "estimator": "network_scan (ksg)", "caveat": "transfer_entropy",
   "checklist": ["justify the embedding or select it (non-uniform selection)",
                 "run 200 time-shift surrogates per pair", "correct for m(m-1) tests (bonferroni or bh_fdr)",
                 "state the conditioning set"]},
  {"objective": "directed_influence", "min_d": 3,
   "measure": "transfer_entropy", "estimator": "network_scan (plugin)", "caveat": "transfer_entropy",
   "checklist": ["justify the embedding or select it (non-uniform selection)",
                 "run 200 time-shift surrogates per pair", "correct for m(m-1) tests (bonferroni or bh_fdr)",
                 "state the conditioning set", "record the bin rule and edges"]},
  {"objective": "directed_influence", "kinds": ["continuous"],
   "measure": "transfer_entropy", "estimator": "ksg", "caveat": "transfer_entropy",
   "checklist": ["justify the embedding or select it (non-uniform selection)",
                 "run a time-shift surrogate test", "report the effect size"]},
  {"objective": "directed_influence",
   "measure": "transfer_entropy", "estimator": "plugin", "caveat": "transfer_entropy",
   "checklist": ["justify the embedding or select it (non-uniform selection)",
                 "run a time-shift surrogate test", "report the effect size", "record the bin rule and edges"]},

  {"objective": "temporal_memory", "kinds": ["continuous"],
   "measure": "predictive_information", "estimator": "ksg", "caveat": "predictive_information",
   "checklist": ["state the window T and report I_pred over several T", "check stationarity"]},
  {"objective": "temporal_memory",
   "measure": "predictive_information", "estimator": "plugin", "caveat": "predictive_information",
   "checklist": ["state the window T and report I_pred over several T", "check stationarity"]},

  {"objective": "agent_complexity", "interventional": true, "min_d": 13,
   "measure": "phi", "estimator": "unavailable (node cap 12)", "caveat": "phi",
   "companions": ["autonomy_observational"],
   "unavailable": ["phi", "effective_information", "autonomy_causal"],
   "warnings": ["more than 12 nodes: exact TPM measures are not computed"]},
  {"objective": "agent_complexity", "interventional": true,
   "measure": "phi", "estimator": "ei-bipartition-v1", "caveat": "phi",
   "companions": ["effective_information", "autonomy_causal", "autonomy_observational"],
   "checklist": ["state the Phi variant id", "record the coarse-graining for EI",
                 "record the V/E boundary and history m for autonomy"]},
  {"objective": "agent_complexity",
   "measure": "autonomy_observational", "estimator": "plugin", "caveat": "autonomy",
   "unavailable": ["phi", "effective_information", "autonomy_causal"],
   "warnings": ["no transition matrix: EI, causal autonomy and Phi have no observational estimator"],
   "checklist": ["record the V/E boundary and history m"]}
])json";

const Json& rules() {
  static const Json r = Json::parse(kRules);
  return r;
}

bool rule_matches(const Json& rule, const Query& q) {
  if (rule.at("objective") != to_string(q.objective)) return false;
  if (rule.contains("kinds")) {
    bool any = false;
    for (const auto& k : rule.at("kinds")) any = any || k == to_string(q.data_kind);
    if (!any) return false;
  }
  if (rule.contains("min_d") && q.dimension < rule.at("min_d").get<std::size_t>()) return false;
  if (rule.contains("max_d") && q.dimension > rule.at("max_d").get<std::size_t>()) return false;
  if (rule.contains("interventional") && rule.at("interventional").get<bool>() != q.interventional_access)
    return false;
  return true;
}

std::vector<std::string> strings(const Json& rule, const char* key) {
  return rule.contains(key) ? rule.at(key).get<std::vector<std::string>>() : std::vector<std::string>{};
}

bool family_a(const std::string& measure) {
  return measure != "phi" && measure != "autonomy_observational";
}

}  // namespace

const char* to_string(Objective o) noexcept {
  switch (o) {
    case Objective::Uncertainty: return "uncertainty";
    case Objective::CompareDistributions: return "compare_distributions";
    case Objective::Dependence: return "dependence";
    case Objective::DirectedInfluence: return "directed_influence";
    case Objective::TemporalMemory: return "temporal_memory";
    case Objective::AgentComplexity: return "agent_complexity";
  }
  return "?";
}

const char* to_string(DataKind k) noexcept {
  switch (k) {
    case DataKind::Discrete: return "discrete";
    case DataKind::Continuous: return "continuous";
    case DataKind::Mixed: return "mixed";
  }
  return "?";
}

Objective objective_from_string(const std::string& s) {
  for (auto o : {Objective::Uncertainty, Objective::CompareDistributions, Objective::Dependence,
                 Objective::DirectedInfluence, Objective::TemporalMemory, Objective::AgentComplexity})
    if (s == to_string(o)) return o;
  fail(ErrorKind::InvalidConfig, "unknown objective '" + s + "'");
}

DataKind data_kind_from_string(const std::string& s) {
  for (auto k : {DataKind::Discrete, DataKind::Continuous, DataKind::Mixed})
    if (s == to_string(k)) return k;
  fail(ErrorKind::InvalidConfig, "unknown data kind '" + s + "'");
}

const Json& caveat_catalog() {
  static const Json c = Json::parse(kCaveats);
  return c;
}

const Json& decision_rules() { return rules(); }

Json Recommendation::to_json() const {
  Json companion_caveats = Json::object();
  for (const auto& m : companions) {
    const std::string key = m.rfind("autonomy", 0) == 0 ? "autonomy" : m;
    companion_caveats[m] = caveat_catalog().at(key);
  }
  return {{"measure", measure},       {"estimator", estimator},   {"caveat", caveat},
          {"checklist", checklist},   {"warnings", warnings},     {"unavailable", unavailable},
          {"companions", companions}, {"companion_caveats", companion_caveats}};
}

Recommendation recommend(const Query& q) {
  require(q.dimension >= 1 && q.n_samples >= 1, ErrorKind::InvalidConfig,
          "query needs dimension >= 1 and n_samples >= 1");
  for (const Json& rule : rules()) {
    if (!rule_matches(rule, q)) continue;
    Recommendation r;
    r.measure = rule.at("measure").get<std::string>();
    r.estimator = rule.at("estimator").get<std::string>();
    r.caveat = caveat_catalog().at(rule.at("caveat").get<std::string>()).get<std::string>();
    r.warnings = strings(rule, "warnings");
    r.unavailable = strings(rule, "unavailable");
    r.companions = strings(rule, "companions");
    r.checklist = {"declare the result a measurement estimate, not a training surrogate",
                   "report the estimator id, hyperparameters and software version"};
    if (r.measure == "phi" || r.measure == "autonomy_observational")
      r.checklist.push_back("report uncertainty (exact for TPM quantities, resampling otherwise)");
    else
      r.checklist.push_back("report a bootstrap or subsampling uncertainty interval");
    if (r.measure == "mutual_information" || r.measure == "transfer_entropy")
      r.checklist.push_back("include a surrogate or permutation significance test");
    r.checklist.push_back("state preprocessing: normalization, discretization, embedding");
    for (auto& item : strings(rule, "checklist")) r.checklist.push_back(std::move(item));

    const bool temporal = q.objective == Objective::DirectedInfluence || q.objective == Objective::TemporalMemory;
    if (temporal && !q.time_ordered)
      r.warnings.push_back("this measure needs time-ordered data; the query is not time-ordered");
    if (family_a(r.measure) && q.n_samples < 100)
      r.warnings.push_back("fewer than 100 samples: estimates carry large finite-sample bias");
    if (r.measure == "phi" && q.dimension > 8 && q.dimension <= 12)
      r.warnings.push_back("more than 8 nodes: exact bipartition search is expensive");
    return r;
  }
  fail(ErrorKind::InvalidConfig, "no advisor rule matches the query");
}

}  // namespace infometer
