#include "infometer/manifest.hpp"

namespace infometer {

Json to_json(const CiResult& ci) {
  return {{"point", ci.point},           {"low", ci.low},
          {"high", ci.high},             {"level", ci.level},
          {"replicates", ci.replicates}, {"scheme", to_string(ci.scheme)},
          {"interval", to_string(ci.method)}, {"block_length", ci.block_length},
          {"seed", ci.seed.master}};
}

Json to_json(const SignificanceResult& s) {
  return {{"observed", s.observed}, {"p_value", s.p_value},     {"method", to_string(s.method)},
          {"surrogates", s.surrogates}, {"seed", s.seed.master}, {"null_samples", s.null_samples}};
}

Json to_json(const PreprocessLog& log) {
  Json out = Json::array();
  for (const auto& step : log) out.push_back({{"step", step.name}, {"params", step.params}});
  return out;
}

namespace {

constexpr const char* kItems[] = {"role", "estimator", "uncertainty", "significance", "preprocessing"};

}  // namespace

ReportManifest build_manifest(const ManifestDraft& d) {
  if (!d.role) throw MissingFieldError("role");
  if (!d.estimator) throw MissingFieldError("estimator");
  if (!d.ci && !d.exact_uncertainty) throw MissingFieldError("uncertainty");
  if (!d.significance && (d.requires_significance || !d.significance_not_applicable))
    throw MissingFieldError("significance");
  if (!d.preprocessing) throw MissingFieldError("preprocessing");

  Json j;
  j["schema"] = kManifestSchema;
  j["result"] = {{"measure", d.measure}, {"value", d.value}, {"unit", d.unit}};
  j["role"] = *d.role;
  j["estimator"] = {{"id", *d.estimator}, {"hyperparameters", d.hyperparameters}, {"version", kVersion}};
  j["uncertainty"] = d.ci ? to_json(*d.ci) : *d.exact_uncertainty;
  j["significance"] = d.significance ? to_json(*d.significance)
                                     : Json{{"applicable", false}, {"reason", *d.significance_not_applicable}};
  j["preprocessing"] = to_json(*d.preprocessing);
  j["details"] = d.details;
  return ReportManifest(std::move(j));
}

ReportManifest ReportManifest::parse(const Json& j) {
  require(j.is_object(), ErrorKind::InvalidInput, "manifest must be a JSON object");
  for (const char* item : kItems)
    if (!j.contains(item) || j.at(item).is_null()) throw MissingFieldError(item);
  require(j.value("schema", "") == kManifestSchema, ErrorKind::InvalidInput, "unknown manifest schema");
  require(j.contains("result"), ErrorKind::InvalidInput, "manifest has no result");
  return ReportManifest(j);
}

ManifestDraft draft_for(const EntropyEstimate& e) {
  ManifestDraft d;
  d.measure = "entropy";
  d.value = e.value;
  d.estimator = to_string(e.estimator);
  d.hyperparameters = e.hyperparams;
  d.ci = e.ci;
  d.significance_not_applicable = "entropy is not a dependence measure; no null hypothesis to test";
  d.preprocessing = e.preprocessing;
  return d;
}

ManifestDraft draft_for(const MiEstimate& e, const std::string& measure) {
  ManifestDraft d;
  d.measure = measure;
  d.value = e.value;
  d.requires_significance = true;
  d.role = e.role;
  d.estimator = to_string(e.estimator);
  d.hyperparameters = e.hyperparams;
  if (e.estimator == MiEstimator::Ksg) d.hyperparameters["k"] = e.k;
  d.ci = e.ci;
  d.significance = e.significance;
  d.preprocessing = e.preprocessing;
  d.details["warnings"] = e.warnings;
  return d;
}

ManifestDraft draft_for(const TeResult& r) {
  ManifestDraft d;
  d.measure = r.measure;
  d.value = r.value;
  d.requires_significance = true;
  d.estimator = to_string(r.estimator);
  d.hyperparameters = r.hyperparams;
  d.ci = r.ci;
  d.significance = r.significance;
  d.preprocessing = r.preprocessing;
  d.details = {{"effect_size", r.effect_size},
               {"target_entropy", r.target_entropy},
               {"embedding", r.embedding.to_json()},
               {"rows", r.rows},
               {"warnings", r.warnings}};
  return d;
}

}  // namespace infometer
