#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "infometer/core.hpp"
#include "infometer/parallel.hpp"

namespace infometer {

/// Row-stochastic matrix: row i is the output distribution given input i.
class Mechanism {
 public:
  Mechanism() = default;
  Mechanism(std::size_t inputs, std::size_t outputs, std::vector<double> data);

  std::size_t inputs() const noexcept { return inputs_; }
  std::size_t outputs() const noexcept { return outputs_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * outputs_ + j]; }
  std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * outputs_, outputs_}; }
  std::span<const double> data() const noexcept { return data_; }

 private:
  std::size_t inputs_ = 0;
  std::size_t outputs_ = 0;
  std::vector<double> data_;
};

/// Transition matrix over the 2^n joint states of n binary nodes. Node i is
/// bit i of the state index (little-endian).
class Tpm {
 public:
  static constexpr std::size_t kMaxNodes = 12;
  static constexpr std::size_t kExactComfortNodes = 8;

  /// Throws SystemTooLarge above kMaxNodes, InvalidInput on a bad shape or
  /// rows that are not distributions (tolerance 1e-12).
  Tpm(std::size_t nodes, std::vector<double> matrix);

  static Tpm from_rows(const std::vector<std::vector<double>>& rows);
  /// 2^n x n matrix of P(node i is on next | current state), nodes assumed
  /// conditionally independent given the current state.
  static Tpm from_state_by_node(const std::vector<std::vector<double>>& rows);
  /// {"n": int, "tpm": rows}; rows may be state-by-state or state-by-node.
  static Tpm from_json(const Json& j);

  std::size_t nodes() const noexcept { return nodes_; }
  std::size_t states() const noexcept { return mechanism_.inputs(); }
  const Mechanism& mechanism() const noexcept { return mechanism_; }
  double operator()(std::size_t from, std::size_t to) const noexcept { return mechanism_(from, to); }
  std::span<const double> row(std::size_t s) const noexcept { return mechanism_.row(s); }

  /// "state_by_state" or "state_by_node" (converted).
  const std::string& source_format() const noexcept { return source_format_; }
  std::vector<std::string> warnings() const;
  Json to_json() const;

 private:
  std::size_t nodes_ = 0;
  Mechanism mechanism_;
  std::string source_format_ = "state_by_state";
};

/// Mean over inputs of KL(row || mean row), in bits: the effect of a
/// uniform intervention on the inputs.
double effective_information(const Mechanism& mechanism);
double effective_information(const Tpm& tpm);

/// Nodes on one side of a cut; the other side is the complement.
struct Bipartition {
  std::vector<std::size_t> part_a;
  std::vector<std::size_t> part_b;

  /// Validates that both parts are nonempty, disjoint and cover n nodes.
  static Bipartition from_part_a(std::vector<std::size_t> part_a, std::size_t nodes);
  std::uint32_t mask_a() const;
  Json to_json() const;
  friend bool operator==(const Bipartition&, const Bipartition&) = default;
};

/// Each side's next state depends only on its own current state, with the
/// other side's current state averaged out uniformly; sides evolve
/// independently.
Tpm partitioned_tpm(const Tpm& tpm, const Bipartition& cut);

/// Mean over states of KL(whole row || cut row), in bits.
double cut_divergence(const Tpm& tpm, const Bipartition& cut);

inline constexpr const char* kPhiVariant = "ei-bipartition-v1";

struct PhiResult {
  double value = 0.0;  // bits
  Bipartition mip;
  std::size_t cuts_evaluated = 0;
  std::string variant = kPhiVariant;
  std::vector<std::string> warnings;
};

/// Minimum cut divergence over all bipartitions. part_a always holds node 0;
/// near-ties (within 1e-12) go to the lexicographically smallest part_a.
PhiResult phi(const Tpm& tpm, Workers workers = {});

/// micro state -> macro state; surjective onto [0, macro_states).
struct CoarseGraining {
  std::vector<std::size_t> mapping;

  std::size_t macro_states() const;
  /// Throws InvalidConfig unless the mapping covers `micro_states` states,
  /// is surjective and has at least 2 macro states.
  void validate(std::size_t micro_states) const;
  Json to_json() const;
};

struct EmergenceResult {
  double ei_micro = 0.0;  // bits
  double ei_macro = 0.0;  // bits
  bool emergent = false;  // ei_macro > ei_micro + 1e-9
  Mechanism macro;
  CoarseGraining grain;
};

/// Macro mechanism: average the member rows of each macro state, then sum
/// transition mass into macro columns.
Mechanism macro_mechanism(const Mechanism& micro, const CoarseGraining& grain);
EmergenceResult causal_emergence(const Tpm& micro, const CoarseGraining& grain);

/// One run of a system split into internal (V) and environment (E) parts,
/// each already encoded as one joint symbol per time step.
struct Episode {
  std::vector<int> v;
  std::vector<int> e;
};

struct ObservationalAutonomy {
  double value = 0.0;  // bits
  double h_given_env = 0.0;
  double h_given_self_and_env = 0.0;
  std::size_t history = 1;
  std::size_t samples = 0;
  std::size_t episodes = 0;
};

inline constexpr std::size_t kMinAutonomySamples = 20;

/// H(V_t | E_{t-1..t-m}) - H(V_t | V_{t-1}, E_{t-1..t-m}) from plugin
/// frequencies pooled over episodes. Throws InsufficientData with fewer than
/// kMinAutonomySamples usable time steps.
ObservationalAutonomy autonomy_observational(std::span<const Episode> episodes, std::size_t history);

struct SystemSplit {
  std::vector<std::size_t> v_nodes;
  std::vector<std::size_t> e_nodes;
  std::size_t history = 1;

  void validate(std::size_t nodes) const;
  Json to_json() const;
};

/// V-subsystem mechanism: next V state given current V, with E inputs
/// averaged uniformly.
Mechanism system_mechanism(const Tpm& tpm, const SystemSplit& split);
/// Next V state given the full current state (all 2^n inputs).
Mechanism system_total_mechanism(const Tpm& tpm, const SystemSplit& split);

struct CausalAutonomy {
  double value = 0.0;  // EI of the V -> V mechanism, bits
  double ei_total = 0.0;
  /// value / ei_total; absent when ei_total is 0.
  std::optional<double> ratio;
};

/// Only the one-step variant exists; split.history must be 1.
CausalAutonomy autonomy_causal(const Tpm& tpm, const SystemSplit& split);

/// Joint symbol of the given nodes of `state` (node order gives bit order).
int project_state(std::size_t state, std::span<const std::size_t> nodes);

}  // namespace infometer
