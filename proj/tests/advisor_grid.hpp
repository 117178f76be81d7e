#pragma once

// The query grid behind the advisor snapshot: every objective crossed with
// data kind, dimension, sample size, ordering and interventional access.

#include <fstream>
#include <sstream>
#include <string>

#include "infometer/advisor.hpp"

namespace advisor_grid {

inline infometer::Json run() {
  using namespace infometer;
  Json out = Json::array();
  for (Objective o : {Objective::Uncertainty, Objective::CompareDistributions, Objective::Dependence,
                      Objective::DirectedInfluence, Objective::TemporalMemory, Objective::AgentComplexity})
    for (DataKind k : {DataKind::Discrete, DataKind::Continuous, DataKind::Mixed})
      for (std::size_t d : {1, 2, 13, 25})
        for (std::size_t n : {50, 5000})
          for (bool ordered : {false, true})
            for (bool interventional : {false, true}) {
              const Query q{o, k, d, n, ordered, interventional};
              out.push_back({{"query",
                              {{"objective", to_string(o)},
                               {"data_kind", to_string(k)},
                               {"dimension", d},
                               {"n_samples", n},
                               {"time_ordered", ordered},
                               {"interventional_access", interventional}}},
                             {"recommendation", recommend(q).to_json()}});
            }
  return out;
}

inline infometer::Json load(const std::string& path) {
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  return infometer::Json::parse(buf.str());
}

}  // namespace advisor_grid
