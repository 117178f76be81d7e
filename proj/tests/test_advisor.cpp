#include <doctest.h>

#include <algorithm>

#include "advisor_grid.hpp"
#include "infometer/advisor.hpp"
#include "infometer/manifest.hpp"

using namespace infometer;

namespace {

bool has(const std::vector<std::string>& v, const std::string& needle) {
  return std::any_of(v.begin(), v.end(), [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

}  // namespace

TEST_CASE("advisor output matches the frozen snapshot") {
  const Json expect = advisor_grid::load(INFOMETER_TEST_DATA "/snapshots/advisor.json");
  const Json got = advisor_grid::run();
  REQUIRE(got.size() == expect.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    CAPTURE(got[i]["query"].dump());
    CHECK(got[i] == expect[i]);
  }
}

TEST_CASE("one measure and caveat per objective") {
  struct Row {
    Objective objective;
    DataKind kind;
    std::size_t dim;
    bool interventional;
    const char* measure;
    const char* estimator;
    const char* caveat_start;
  };
  const Row table[] = {
      {Objective::Uncertainty, DataKind::Discrete, 1, false, "entropy", "plugin", "Finite-sample bias"},
      {Objective::Uncertainty, DataKind::Continuous, 1, false, "entropy", "vasicek", "Finite-sample bias"},
      {Objective::Uncertainty, DataKind::Continuous, 3, false, "entropy", "knn_kl", "Finite-sample bias"},
      {Objective::CompareDistributions, DataKind::Discrete, 1, false, "kl_cross_entropy", "plugin", "KL is asymmetric"},
      {Objective::Dependence, DataKind::Continuous, 2, false, "mutual_information", "ksg", "Curse of dimensionality"},
      {Objective::Dependence, DataKind::Discrete, 2, false, "mutual_information", "plugin", "Curse of dimensionality"},
      {Objective::DirectedInfluence, DataKind::Continuous, 2, false, "transfer_entropy", "ksg", "Not interventional"},
      {Objective::DirectedInfluence, DataKind::Continuous, 5, false, "transfer_entropy", "network_scan (ksg)",
       "Not interventional"},
      {Objective::TemporalMemory, DataKind::Continuous, 1, false, "predictive_information", "ksg",
       "Requires stationarity"},
      {Objective::AgentComplexity, DataKind::Discrete, 3, true, "phi", "ei-bipartition-v1", "NP-hard"},
      {Objective::AgentComplexity, DataKind::Discrete, 3, false, "autonomy_observational", "plugin",
       "Observational and causal variants disagree"},
  };
  for (const Row& r : table) {
    const Recommendation rec = recommend({r.objective, r.kind, r.dim, 1000, true, r.interventional});
    CAPTURE(to_string(r.objective));
    CHECK(rec.measure == r.measure);
    CHECK(rec.estimator == r.estimator);
    CHECK(rec.caveat.rfind(r.caveat_start, 0) == 0);
    CHECK(rec.checklist.size() >= 5);
  }
}

TEST_CASE("advisor warnings follow the data regime") {
  const Recommendation wide = recommend({Objective::Dependence, DataKind::Continuous, 30, 1000, false, false});
  CHECK(has(wide.warnings, "d >= 20"));
  const Recommendation few = recommend({Objective::Dependence, DataKind::Continuous, 1, 40, false, false});
  CHECK(has(few.warnings, "fewer than 100"));
  const Recommendation unordered = recommend({Objective::DirectedInfluence, DataKind::Continuous, 2, 1000, false, false});
  CHECK_FALSE(unordered.warnings.empty());
  const Recommendation big = recommend({Objective::AgentComplexity, DataKind::Discrete, 20, 1000, true, true});
  CHECK(has(big.unavailable, "phi"));
  const Recommendation mid = recommend({Objective::AgentComplexity, DataKind::Discrete, 10, 1000, true, true});
  CHECK(mid.measure == "phi");
  CHECK_FALSE(mid.warnings.empty());
  const Recommendation obs = recommend({Objective::AgentComplexity, DataKind::Discrete, 3, 1000, true, false});
  CHECK(has(obs.unavailable, "effective_information"));
}

TEST_CASE("advisor parses names and is total") {
  CHECK(objective_from_string("temporal_memory") == Objective::TemporalMemory);
  CHECK(data_kind_from_string("mixed") == DataKind::Mixed);
  CHECK_THROWS_AS(objective_from_string("vibes"), Error);
  CHECK(caveat_catalog().size() == 8);
  CHECK(decision_rules().is_array());
}

TEST_CASE("manifest requires every report item") {
  ManifestDraft d;
  d.measure = "mutual_information";
  d.value = 0.1;
  d.requires_significance = true;
  d.estimator = "ksg";
  d.ci = CiResult{};
  d.significance = SignificanceResult{};
  d.preprocessing = PreprocessLog{};

  auto missing = [](ManifestDraft draft) -> std::string {
    try {
      build_manifest(draft);
    } catch (const MissingFieldError& e) {
      return e.field();
    }
    return "";
  };
  CHECK(missing(d).empty());
  ManifestDraft x = d;
  x.role.reset();
  CHECK(missing(x) == "role");
  x = d;
  x.estimator.reset();
  CHECK(missing(x) == "estimator");
  x = d;
  x.ci.reset();
  CHECK(missing(x) == "uncertainty");
  x = d;
  x.significance.reset();
  x.significance_not_applicable = "not a dependence measure";
  CHECK(missing(x) == "significance");  // MI from data needs a test
  x.requires_significance = false;
  CHECK(missing(x).empty());
  x = d;
  x.preprocessing.reset();
  CHECK(missing(x) == "preprocessing");
}

TEST_CASE("manifest round trip") {
  MiEstimate e;
  e.value = 0.25;
  e.estimator = MiEstimator::Ksg;
  e.k = 4;
  e.ci = CiResult{0.25, 0.2, 0.3};
  e.significance = SignificanceResult{0.25, {0.0, 0.1}, 1.0 / 3.0};
  e.preprocessing = {{"standardize", {{"columns", 2}}}};
  const ReportManifest m = build_manifest(draft_for(e));
  const Json j = m.to_json();
  CHECK(j.at("schema") == kManifestSchema);
  for (const char* item : {"role", "estimator", "uncertainty", "significance", "preprocessing"})
    CHECK(j.contains(item));
  CHECK(j.at("estimator").at("hyperparameters").at("k") == 4);
  const ReportManifest back = ReportManifest::parse(Json::parse(m.dump()));
  CHECK(back.to_json() == j);

  Json broken = j;
  broken.erase("significance");
  try {
    ReportManifest::parse(broken);
    FAIL("expected MissingFieldError");
  } catch (const MissingFieldError& err) {
    CHECK(err.field() == "significance");
  }
  broken = j;
  broken["schema"] = "other/1";
  CHECK_THROWS_AS(ReportManifest::parse(broken), Error);
}
