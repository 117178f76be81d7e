#pragma once

#include <optional>
#include <string>

#include "infometer/core.hpp"
#include "infometer/entropy.hpp"
#include "infometer/mi.hpp"
#include "infometer/results.hpp"
#include "infometer/temporal.hpp"

namespace infometer {

inline constexpr const char* kManifestSchema = "infometer.manifest/1";
inline constexpr const char* kVersion = INFOMETER_VERSION;

Json to_json(const CiResult& ci);
Json to_json(const SignificanceResult& s);
Json to_json(const PreprocessLog& log);

/// Everything known about a result before it is finalized. Any of the five
/// report items may be missing here; build_manifest decides whether that is
/// allowed.
struct ManifestDraft {
  std::string measure;
  double value = 0.0;
  std::string unit = "nats";
  /// Significance is mandatory for TE and MI computed from data.
  bool requires_significance = false;

  std::optional<std::string> role = "measurement";
  std::optional<std::string> estimator;
  Json hyperparameters = Json::object();
  std::optional<CiResult> ci;
  /// Uncertainty statement for exact computations that have no sampling error.
  std::optional<Json> exact_uncertainty;
  std::optional<SignificanceResult> significance;
  /// Why no significance test applies (e.g. exact TPM quantities).
  std::optional<std::string> significance_not_applicable;
  std::optional<PreprocessLog> preprocessing;
  /// Measure-specific extras: variant id, grain, boundary, warnings.
  Json details = Json::object();
};

/// The five-item report attached to every result. Every item is present by
/// construction; parse() rejects objects missing any of them.
class ReportManifest {
 public:
  static ReportManifest parse(const Json& j);

  Json to_json() const { return json_; }
  std::string dump() const { return json_.dump(2); }
  const Json& result() const { return json_.at("result"); }

 private:
  friend ReportManifest build_manifest(const ManifestDraft& draft);
  explicit ReportManifest(Json j) : json_(std::move(j)) {}
  Json json_;
};

/// Throws MissingFieldError naming the first absent item: role, estimator,
/// uncertainty, significance, or preprocessing.
ReportManifest build_manifest(const ManifestDraft& draft);

ManifestDraft draft_for(const EntropyEstimate& e);
ManifestDraft draft_for(const MiEstimate& e, const std::string& measure = "mutual_information");
ManifestDraft draft_for(const TeResult& r);

}  // namespace infometer
