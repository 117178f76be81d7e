#include "infometer/causal.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace infometer {

namespace {

constexpr double kRowTolerance = 1e-12;

void check_rows(std::size_t inputs, std::size_t outputs, const std::vector<double>& data) {
  for (std::size_t i = 0; i < inputs; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < outputs; ++j) {
      const double v = data[i * outputs + j];
      require(std::isfinite(v) && v >= 0.0, ErrorKind::InvalidInput,
              "row " + std::to_string(i) + " has a negative or non-finite entry");
      sum += v;
    }
    require(std::abs(sum - 1.0) <= kRowTolerance * std::max<double>(1.0, static_cast<double>(outputs)),
            ErrorKind::InvalidInput, "row " + std::to_string(i) + " sums to " + std::to_string(sum));
  }
}

double kl_bits(std::span<const double> p, std::span<const double> q) {
  double acc = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j)
    if (p[j] > 0.0) acc += p[j] * std::log2(p[j] / q[j]);
  return std::max(acc, 0.0);
}

std::size_t node_count_for_rows(std::size_t rows) {
  std::size_t n = 0;
  while ((std::size_t{1} << n) < rows) ++n;
  require((std::size_t{1} << n) == rows, ErrorKind::InvalidInput,
          "TPM row count " + std::to_string(rows) + " is not a power of two");
  return n;
}

// For each full state s, P(next state restricted to `nodes` = t) averaged
// over the complement's current state. Result is 2^|nodes| x 2^|nodes|,
// indexed by the projected current and next states.
std::vector<double> part_mechanism(const Tpm& tpm, std::span<const std::size_t> nodes) {
  const std::size_t sub = std::size_t{1} << nodes.size();
  const std::size_t states = tpm.states();
  std::vector<double> out(sub * sub, 0.0);
  std::vector<std::size_t> proj(states);
  for (std::size_t s = 0; s < states; ++s) proj[s] = static_cast<std::size_t>(project_state(s, nodes));
  for (std::size_t s = 0; s < states; ++s) {
    double* dst = out.data() + proj[s] * sub;
    const auto row = tpm.row(s);
    for (std::size_t t = 0; t < states; ++t) dst[proj[t]] += row[t];
  }
  const double share = static_cast<double>(sub) / static_cast<double>(states);
  for (double& v : out) v *= share;
  return out;
}

std::vector<std::size_t> complement(std::span<const std::size_t> nodes, std::size_t n) {
  std::vector<bool> in(n, false);
  for (std::size_t i : nodes) in[i] = true;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i)
    if (!in[i]) out.push_back(i);
  return out;
}

}  // namespace

int project_state(std::size_t state, std::span<const std::size_t> nodes) {
  int out = 0;
  for (std::size_t b = 0; b < nodes.size(); ++b)
    if ((state >> nodes[b]) & 1U) out |= 1 << b;
  return out;
}

// ---- mechanism / tpm --------------------------------------------------------

Mechanism::Mechanism(std::size_t inputs, std::size_t outputs, std::vector<double> data)
    : inputs_(inputs), outputs_(outputs), data_(std::move(data)) {
  require(inputs_ >= 1 && outputs_ >= 1 && data_.size() == inputs_ * outputs_, ErrorKind::InvalidInput,
          "mechanism shape does not match its data");
  check_rows(inputs_, outputs_, data_);
}

Tpm::Tpm(std::size_t nodes, std::vector<double> matrix) : nodes_(nodes) {
  require(nodes >= 1, ErrorKind::InvalidInput, "a TPM needs at least one node");
  require(nodes <= kMaxNodes, ErrorKind::SystemTooLarge,
          std::to_string(nodes) + " nodes exceeds the cap of " + std::to_string(kMaxNodes));
  const std::size_t states = std::size_t{1} << nodes;
  require(matrix.size() == states * states, ErrorKind::InvalidInput,
          "TPM for " + std::to_string(nodes) + " nodes must be " + std::to_string(states) + " x " +
              std::to_string(states));
  mechanism_ = Mechanism(states, states, std::move(matrix));
}

Tpm Tpm::from_rows(const std::vector<std::vector<double>>& rows) {
  require(!rows.empty(), ErrorKind::InvalidInput, "empty TPM");
  require(rows.size() <= (std::size_t{1} << kMaxNodes), ErrorKind::SystemTooLarge, "TPM exceeds the node cap");
  const std::size_t n = node_count_for_rows(rows.size());
  std::vector<double> flat;
  flat.reserve(rows.size() * rows.size());
  for (const auto& r : rows) {
    require(r.size() == rows.size(), ErrorKind::InvalidInput, "TPM rows must be square");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return Tpm(n, std::move(flat));
}

Tpm Tpm::from_state_by_node(const std::vector<std::vector<double>>& rows) {
  require(!rows.empty(), ErrorKind::InvalidInput, "empty TPM");
  require(rows.size() <= (std::size_t{1} << kMaxNodes), ErrorKind::SystemTooLarge, "TPM exceeds the node cap");
  const std::size_t n = node_count_for_rows(rows.size());
  const std::size_t states = rows.size();
  std::vector<double> flat(states * states);
  for (std::size_t s = 0; s < states; ++s) {
    require(rows[s].size() == n, ErrorKind::InvalidInput, "state-by-node rows need one entry per node");
    for (double q : rows[s])
      require(q >= 0.0 && q <= 1.0, ErrorKind::InvalidInput, "node probabilities must lie in [0, 1]");
    for (std::size_t t = 0; t < states; ++t) {
      double p = 1.0;
      for (std::size_t i = 0; i < n; ++i) p *= ((t >> i) & 1U) ? rows[s][i] : 1.0 - rows[s][i];
      flat[s * states + t] = p;
    }
  }
  Tpm tpm(n, std::move(flat));
  tpm.source_format_ = "state_by_node";
  return tpm;
}

Tpm Tpm::from_json(const Json& j) {
  if (!j.contains("tpm")) throw MissingFieldError("tpm");
  if (j.contains("n")) {
    const std::size_t declared = j.at("n").get<std::size_t>();
    require(declared <= kMaxNodes, ErrorKind::SystemTooLarge,
            std::to_string(declared) + " nodes exceeds the cap of " + std::to_string(kMaxNodes));
  }
  const auto rows = j.at("tpm").get<std::vector<std::vector<double>>>();
  require(!rows.empty(), ErrorKind::InvalidInput, "empty TPM");
  const bool by_node = rows.size() > 1 && rows[0].size() != rows.size();
  Tpm tpm = by_node ? from_state_by_node(rows) : from_rows(rows);
  if (j.contains("n"))
    require(j.at("n").get<std::size_t>() == tpm.nodes(), ErrorKind::InvalidInput,
            "declared n does not match the TPM size");
  return tpm;
}

std::vector<std::string> Tpm::warnings() const {
  std::vector<std::string> w;
  if (nodes_ > kExactComfortNodes)
    w.push_back(std::to_string(nodes_) + " nodes: exact bipartition search and 4^n matrix work are expensive");
  if (source_format_ == "state_by_node")
    w.push_back("converted from state-by-node form assuming conditionally independent nodes");
  return w;
}

Json Tpm::to_json() const {
  std::vector<std::vector<double>> rows(states());
  for (std::size_t s = 0; s < states(); ++s) rows[s].assign(row(s).begin(), row(s).end());
  return {{"n", nodes_}, {"tpm", rows}};
}

double effective_information(const Mechanism& m) {
  std::vector<double> mean(m.outputs(), 0.0);
  for (std::size_t i = 0; i < m.inputs(); ++i)
    for (std::size_t j = 0; j < m.outputs(); ++j) mean[j] += m(i, j);
  for (double& v : mean) v /= static_cast<double>(m.inputs());
  double acc = 0.0;
  for (std::size_t i = 0; i < m.inputs(); ++i) acc += kl_bits(m.row(i), mean);
  return acc / static_cast<double>(m.inputs());
}

double effective_information(const Tpm& tpm) { return effective_information(tpm.mechanism()); }

// ---- partitions -----------------------------------------------------------------

Bipartition Bipartition::from_part_a(std::vector<std::size_t> part_a, std::size_t nodes) {
  std::sort(part_a.begin(), part_a.end());
  require(std::adjacent_find(part_a.begin(), part_a.end()) == part_a.end(), ErrorKind::InvalidConfig,
          "cut lists a node twice");
  for (std::size_t i : part_a) require(i < nodes, ErrorKind::InvalidConfig, "cut node out of range");
  Bipartition b{part_a, complement(part_a, nodes)};
  require(!b.part_a.empty() && !b.part_b.empty(), ErrorKind::InvalidConfig, "both sides of a cut must be nonempty");
  return b;
}

std::uint32_t Bipartition::mask_a() const {
  std::uint32_t m = 0;
  for (std::size_t i : part_a) m |= 1U << i;
  return m;
}

Json Bipartition::to_json() const { return {{"part_a", part_a}, {"part_b", part_b}}; }

Tpm partitioned_tpm(const Tpm& tpm, const Bipartition& cut) {
  const std::size_t states = tpm.states();
  const std::vector<double> a = part_mechanism(tpm, cut.part_a);
  const std::vector<double> b = part_mechanism(tpm, cut.part_b);
  const std::size_t sa = std::size_t{1} << cut.part_a.size();
  const std::size_t sb = std::size_t{1} << cut.part_b.size();
  std::vector<std::size_t> pa(states), pb(states);
  for (std::size_t s = 0; s < states; ++s) {
    pa[s] = static_cast<std::size_t>(project_state(s, cut.part_a));
    pb[s] = static_cast<std::size_t>(project_state(s, cut.part_b));
  }
  std::vector<double> out(states * states);
  for (std::size_t s = 0; s < states; ++s)
    for (std::size_t t = 0; t < states; ++t)
      out[s * states + t] = a[pa[s] * sa + pa[t]] * b[pb[s] * sb + pb[t]];
  // Renormalize away rounding so the result passes the row check.
  for (std::size_t s = 0; s < states; ++s) {
    double sum = 0.0;
    for (std::size_t t = 0; t < states; ++t) sum += out[s * states + t];
    for (std::size_t t = 0; t < states; ++t) out[s * states + t] /= sum;
  }
  return Tpm(tpm.nodes(), std::move(out));
}

double cut_divergence(const Tpm& tpm, const Bipartition& cut) {
  const Tpm cut_tpm = partitioned_tpm(tpm, cut);
  double acc = 0.0;
  for (std::size_t s = 0; s < tpm.states(); ++s) acc += kl_bits(tpm.row(s), cut_tpm.row(s));
  return acc / static_cast<double>(tpm.states());
}

PhiResult phi(const Tpm& tpm, Workers workers) {
  const std::size_t n = tpm.nodes();
  require(n >= 2, ErrorKind::InvalidConfig, "phi needs at least 2 nodes");
  require(n <= Tpm::kMaxNodes, ErrorKind::SystemTooLarge, "system exceeds the node cap");
  // part_a holds node 0, so masks are odd and not the full set.
  std::vector<Bipartition> cuts;
  const std::uint32_t full = (1U << n) - 1U;
  for (std::uint32_t mask = 1; mask < full; mask += 2) {
    std::vector<std::size_t> a;
    for (std::size_t i = 0; i < n; ++i)
      if ((mask >> i) & 1U) a.push_back(i);
    cuts.push_back(Bipartition::from_part_a(std::move(a), n));
  }
  std::sort(cuts.begin(), cuts.end(),
            [](const Bipartition& x, const Bipartition& y) { return x.part_a < y.part_a; });
  std::vector<double> values(cuts.size());
  parallel_for(cuts.size(), workers, [&](std::size_t i) { values[i] = cut_divergence(tpm, cuts[i]); });

  PhiResult r;
  std::size_t best = 0;
  for (std::size_t i = 1; i < cuts.size(); ++i)
    if (values[i] < values[best] - 1e-12 * std::max(1.0, values[best])) best = i;
  r.value = values[best];
  r.mip = cuts[best];
  r.cuts_evaluated = cuts.size();
  r.warnings = tpm.warnings();
  return r;
}

// ---- emergence -------------------------------------------------------------------

std::size_t CoarseGraining::macro_states() const {
  return mapping.empty() ? 0 : *std::max_element(mapping.begin(), mapping.end()) + 1;
}

void CoarseGraining::validate(std::size_t micro_states) const {
  require(mapping.size() == micro_states, ErrorKind::InvalidConfig,
          "grain maps " + std::to_string(mapping.size()) + " states but the system has " +
              std::to_string(micro_states));
  const std::size_t k = macro_states();
  require(k >= 2, ErrorKind::InvalidConfig, "a coarse-graining needs at least 2 macro states");
  std::vector<bool> hit(k, false);
  for (std::size_t m : mapping) hit[m] = true;
  require(std::all_of(hit.begin(), hit.end(), [](bool b) { return b; }), ErrorKind::InvalidConfig,
          "grain is not surjective onto its macro states");
}

Json CoarseGraining::to_json() const { return {{"mapping", mapping}, {"macro_states", macro_states()}}; }

Mechanism macro_mechanism(const Mechanism& micro, const CoarseGraining& grain) {
  grain.validate(micro.inputs());
  require(micro.inputs() == micro.outputs(), ErrorKind::InvalidInput, "micro mechanism must be square");
  const std::size_t k = grain.macro_states();
  std::vector<double> out(k * k, 0.0);
  std::vector<double> members(k, 0.0);
  for (std::size_t s = 0; s < micro.inputs(); ++s) {
    members[grain.mapping[s]] += 1.0;
    for (std::size_t t = 0; t < micro.outputs(); ++t) out[grain.mapping[s] * k + grain.mapping[t]] += micro(s, t);
  }
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) out[a * k + b] /= members[a];
  return Mechanism(k, k, std::move(out));
}

EmergenceResult causal_emergence(const Tpm& micro, const CoarseGraining& grain) {
  EmergenceResult r;
  r.grain = grain;
  r.macro = macro_mechanism(micro.mechanism(), grain);
  r.ei_micro = effective_information(micro);
  r.ei_macro = effective_information(r.macro);
  r.emergent = r.ei_macro > r.ei_micro + 1e-9;
  return r;
}

// ---- autonomy --------------------------------------------------------------------

namespace {

double conditional_entropy_bits(const std::map<std::vector<int>, std::size_t>& joint,
                                const std::map<std::vector<int>, std::size_t>& cond, double n) {
  double h_joint = 0.0, h_cond = 0.0;
  for (const auto& [k, c] : joint) h_joint -= (c / n) * std::log2(c / n);
  for (const auto& [k, c] : cond) h_cond -= (c / n) * std::log2(c / n);
  return h_joint - h_cond;
}

}  // namespace

ObservationalAutonomy autonomy_observational(std::span<const Episode> episodes, std::size_t history) {
  require(history >= 1, ErrorKind::InvalidConfig, "history length m must be >= 1");
  std::map<std::vector<int>, std::size_t> v_e, e, v_vp_e, vp_e;
  std::size_t samples = 0;
  for (const Episode& ep : episodes) {
    require(ep.v.size() == ep.e.size(), ErrorKind::InvalidInput, "V and E series differ in length");
    for (std::size_t t = history; t < ep.v.size(); ++t) {
      std::vector<int> env(history);
      for (std::size_t j = 0; j < history; ++j) env[j] = ep.e[t - 1 - j];
      std::vector<int> key = env;
      ++e[key];
      key.push_back(ep.v[t - 1]);
      ++vp_e[key];
      key.push_back(ep.v[t]);
      ++v_vp_e[key];
      env.push_back(ep.v[t]);
      ++v_e[env];
      ++samples;
    }
  }
  require(samples >= kMinAutonomySamples, ErrorKind::InsufficientData,
          "autonomy needs at least " + std::to_string(kMinAutonomySamples) + " usable time steps, got " +
              std::to_string(samples));
  const double n = static_cast<double>(samples);
  ObservationalAutonomy r;
  r.h_given_env = conditional_entropy_bits(v_e, e, n);
  r.h_given_self_and_env = conditional_entropy_bits(v_vp_e, vp_e, n);
  r.value = std::max(r.h_given_env - r.h_given_self_and_env, 0.0);
  r.history = history;
  r.samples = samples;
  r.episodes = episodes.size();
  return r;
}

void SystemSplit::validate(std::size_t nodes) const {
  require(!v_nodes.empty() && !e_nodes.empty(), ErrorKind::InvalidConfig, "V and E must both be nonempty");
  std::vector<int> seen(nodes, 0);
  for (std::size_t i : v_nodes) {
    require(i < nodes, ErrorKind::InvalidConfig, "V node out of range");
    ++seen[i];
  }
  for (std::size_t i : e_nodes) {
    require(i < nodes, ErrorKind::InvalidConfig, "E node out of range");
    ++seen[i];
  }
  require(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }), ErrorKind::InvalidConfig,
          "V and E must be disjoint and cover every node");
  require(history >= 1, ErrorKind::InvalidConfig, "history must be >= 1");
}

Json SystemSplit::to_json() const { return {{"v_nodes", v_nodes}, {"e_nodes", e_nodes}, {"history", history}}; }

Mechanism system_mechanism(const Tpm& tpm, const SystemSplit& split) {
  split.validate(tpm.nodes());
  const std::size_t sub = std::size_t{1} << split.v_nodes.size();
  return Mechanism(sub, sub, part_mechanism(tpm, split.v_nodes));
}

Mechanism system_total_mechanism(const Tpm& tpm, const SystemSplit& split) {
  split.validate(tpm.nodes());
  const std::size_t sub = std::size_t{1} << split.v_nodes.size();
  const std::size_t states = tpm.states();
  std::vector<double> out(states * sub, 0.0);
  for (std::size_t s = 0; s < states; ++s)
    for (std::size_t t = 0; t < states; ++t)
      out[s * sub + static_cast<std::size_t>(project_state(t, split.v_nodes))] += tpm(s, t);
  return Mechanism(states, sub, std::move(out));
}

CausalAutonomy autonomy_causal(const Tpm& tpm, const SystemSplit& split) {
  require(split.history == 1, ErrorKind::InvalidConfig, "causal autonomy is defined for one step only");
  CausalAutonomy r;
  r.value = effective_information(system_mechanism(tpm, split));
  r.ei_total = effective_information(system_total_mechanism(tpm, split));
  if (r.ei_total > 0.0) r.ratio = r.value / r.ei_total;
  return r;
}

}  // namespace infometer
