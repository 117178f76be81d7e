#include "infometer/simulate.hpp"

#include <cmath>
#include <string>

namespace infometer::sim {

CoupledAr coupled_ar(std::size_t n, double coupling, std::size_t delay, std::uint64_t seed) {
  require(delay >= 1, ErrorKind::InvalidConfig, "coupling delay must be >= 1");
  Rng rng(seed);
  const std::size_t total = n + kBurnIn;
  std::vector<double> x(total, 0.0), y(total, 0.0);
  for (std::size_t t = 0; t + 1 < total; ++t) {
    y[t + 1] = 0.5 * y[t] + rng.normal();
    const double drive = t + 1 >= delay ? y[t + 1 - delay] : 0.0;
    x[t + 1] = 0.5 * x[t] + coupling * drive + rng.normal();
  }
  return {{x.begin() + kBurnIn, x.end()}, {y.begin() + kBurnIn, y.end()}};
}

std::vector<double> ar1(std::size_t n, double phi, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x(n + kBurnIn, 0.0);
  for (std::size_t t = 0; t + 1 < x.size(); ++t) x[t + 1] = phi * x[t] + rng.normal();
  return {x.begin() + kBurnIn, x.end()};
}

SampleMatrix gaussian_pair(std::size_t n, double rho, std::uint64_t seed) {
  Rng rng(seed);
  const double s = std::sqrt(1.0 - rho * rho);
  std::vector<double> data(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = rng.normal();
    const double b = rng.normal();
    data[2 * i] = a;
    data[2 * i + 1] = rho * a + s * b;
  }
  return SampleMatrix(n, 2, std::move(data), {"x", "y"});
}

SampleMatrix ar_network(std::size_t n, std::size_t m,
                        const std::vector<std::pair<std::size_t, std::size_t>>& edges, double coupling,
                        std::uint64_t seed) {
  require(m >= 1 && m <= 26, ErrorKind::InvalidConfig, "stream count must be in [1, 26]");
  for (auto [s, t] : edges)
    require(s < m && t < m && s != t, ErrorKind::InvalidConfig, "edge endpoints must be distinct streams");
  Rng rng(seed);
  const std::size_t total = n + kBurnIn;
  std::vector<double> state(m, 0.0), next(m);
  std::vector<double> data;
  data.reserve(n * m);
  for (std::size_t t = 0; t < total; ++t) {
    for (std::size_t j = 0; j < m; ++j) next[j] = 0.5 * state[j] + rng.normal();
    for (auto [s, d] : edges) next[d] += coupling * state[s];
    state.swap(next);
    if (t >= kBurnIn) data.insert(data.end(), state.begin(), state.end());
  }
  std::vector<std::string> names;
  for (std::size_t j = 0; j < m; ++j) names.emplace_back(1, static_cast<char>('A' + j));
  return SampleMatrix(n, m, std::move(data), std::move(names), true);
}

SampleMatrix planted_network(std::size_t n, std::uint64_t seed, double coupling) {
  return ar_network(n, 5, {{0, 1}}, coupling, seed);
}

SampleMatrix chain(std::size_t n, std::uint64_t seed, double coupling) {
  return ar_network(n, 3, {{0, 1}, {1, 2}}, coupling, seed);
}

SampleMatrix independent_streams(std::size_t n, std::size_t m, std::uint64_t seed) {
  return ar_network(n, m, {}, 0.0, seed);
}

Tpm identity_tpm(std::size_t nodes) {
  const std::size_t s = std::size_t{1} << nodes;
  std::vector<double> m(s * s, 0.0);
  for (std::size_t i = 0; i < s; ++i) m[i * s + i] = 1.0;
  return Tpm(nodes, std::move(m));
}

Tpm swap_tpm() {
  // state = x + 2y; next = y + 2x
  std::vector<double> m(16, 0.0);
  for (std::size_t s = 0; s < 4; ++s) m[s * 4 + (((s & 1) << 1) | (s >> 1))] = 1.0;
  return Tpm(2, std::move(m));
}

Tpm degenerate_tpm() {
  const double t = 1.0 / 3.0;
  return Tpm::from_rows({{t, t, t, 0}, {t, t, t, 0}, {t, t, t, 0}, {0, 0, 0, 1}});
}

Tpm discordance_tpm(double stay) {
  require(stay >= 0.0 && stay <= 1.0, ErrorKind::InvalidConfig, "stay probability must be in [0, 1]");
  std::vector<double> m(16, 0.0);
  for (std::size_t s = 0; s < 4; ++s) {
    const std::size_t v = s & 1, e = s >> 1;
    const std::size_t v_next = v ^ e;
    m[s * 4 + (v_next | (e << 1))] += stay;
    m[s * 4 + (v_next | ((1 - e) << 1))] += 1.0 - stay;
  }
  return Tpm(2, std::move(m));
}

Tpm self_copy_tpm() {
  std::vector<double> m(16, 0.0);
  for (std::size_t s = 0; s < 4; ++s) {
    const std::size_t v = s & 1;
    m[s * 4 + v] = 0.5;
    m[s * 4 + (v | 2)] = 0.5;
  }
  return Tpm(2, std::move(m));
}

std::vector<Episode> sample_episodes(const Tpm& tpm, const SystemSplit& split, std::size_t episodes,
                                     std::size_t length, std::uint64_t seed) {
  split.validate(tpm.nodes());
  Rng rng(seed);
  std::vector<Episode> out(episodes);
  for (auto& ep : out) {
    std::size_t state = rng.below(tpm.states());
    for (std::size_t t = 0; t < length; ++t) {
      ep.v.push_back(project_state(state, split.v_nodes));
      ep.e.push_back(project_state(state, split.e_nodes));
      const auto row = tpm.row(state);
      double u = rng.uniform();
      std::size_t next = row.size() - 1;
      for (std::size_t j = 0; j < row.size(); ++j) {
        if (u < row[j]) {
          next = j;
          break;
        }
        u -= row[j];
      }
      while (row[next] == 0.0 && next > 0) --next;  // rounding fell past the last mass
      state = next;
    }
  }
  return out;
}

}  // namespace infometer::sim
