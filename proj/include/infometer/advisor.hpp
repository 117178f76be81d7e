#pragma once

#include <string>
#include <vector>

#include "infometer/core.hpp"

namespace infometer {

enum class Objective {
  Uncertainty,
  CompareDistributions,
  Dependence,
  DirectedInfluence,
  TemporalMemory,
  AgentComplexity,
};
enum class DataKind { Discrete, Continuous, Mixed };

const char* to_string(Objective o) noexcept;
const char* to_string(DataKind k) noexcept;
Objective objective_from_string(const std::string& s);
DataKind data_kind_from_string(const std::string& s);

struct Query {
  Objective objective = Objective::Dependence;
  DataKind data_kind = DataKind::Continuous;
  /// Dimension of the variables, or the number of streams for directed influence.
  std::size_t dimension = 1;
  std::size_t n_samples = 1000;
  bool time_ordered = false;
  /// A full transition matrix (interventional access) is available.
  bool interventional_access = false;
};

struct Recommendation {
  std::string measure;
  std::string estimator;
  std::string caveat;
  std::vector<std::string> checklist;
  std::vector<std::string> warnings;
  /// Measures of the branch that cannot be computed for this query.
  std::vector<std::string> unavailable;
  /// Further measures recommended together with the primary one.
  std::vector<std::string> companions;

  Json to_json() const;
};

/// Measure -> caveat text, one entry per measure of the decision table.
const Json& caveat_catalog();

/// The rule table recommend() walks (first matching rule wins).
const Json& decision_rules();

/// Total and deterministic.
Recommendation recommend(const Query& query);

}  // namespace infometer
