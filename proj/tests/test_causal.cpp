#include <doctest.h>

#include <cmath>

#include "infometer/causal.hpp"
#include "infometer/simulate.hpp"
#include "oracle.hpp"

using namespace infometer;

namespace {

oracle::Matrix rows_of(const Tpm& t) {
  oracle::Matrix m(t.states());
  for (std::size_t s = 0; s < t.states(); ++s) m[s].assign(t.row(s).begin(), t.row(s).end());
  return m;
}

Tpm random_tpm(Rng& rng, std::size_t nodes, bool sparse) {
  const std::size_t s = std::size_t{1} << nodes;
  std::vector<double> m(s * s);
  for (std::size_t i = 0; i < s; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < s; ++j) {
      double v = rng.uniform();
      if (sparse && rng.bernoulli(0.6)) v = 0.0;
      m[i * s + j] = v;
      sum += v;
    }
    if (sum == 0.0) {
      m[i * s + rng.below(s)] = 1.0;
      continue;
    }
    for (std::size_t j = 0; j < s; ++j) m[i * s + j] /= sum;
  }
  return Tpm(nodes, std::move(m));
}

}  // namespace

TEST_CASE("effective information closed forms") {
  CHECK(effective_information(sim::identity_tpm(3)) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(std::abs(effective_information(sim::identity_tpm(3)) - 3.0) < 1e-9);
  std::vector<double> constant(16, 0.0);
  for (std::size_t i = 0; i < 4; ++i) constant[i * 4 + 2] = 1.0;
  CHECK(effective_information(Tpm(2, constant)) == 0.0);
  CHECK(effective_information(sim::swap_tpm()) == doctest::Approx(2.0));
}

TEST_CASE("effective information of a random TPM matches enumeration") {
  Rng rng(16);
  oracle::Matrix m(8, std::vector<double>(8));
  for (auto& row : m) {
    double s = 0;
    for (double& v : row) s += (v = rng.uniform());
    for (double& v : row) v /= s;
  }
  const double frozen = 0.22540835238139828;
  CHECK(oracle::effective_information(m) == doctest::Approx(frozen).epsilon(1e-14));
  const Tpm t = Tpm::from_rows(m);
  CHECK(effective_information(t) == doctest::Approx(frozen).epsilon(1e-12));

  const double phi_frozen = 0.16476070624802303;
  CHECK(oracle::phi(m, 3) == doctest::Approx(phi_frozen).epsilon(1e-14));
  const PhiResult p = phi(t);
  CHECK(p.value == doctest::Approx(phi_frozen).epsilon(1e-12));
  CHECK(p.cuts_evaluated == 3);
  CHECK(p.variant == std::string("ei-bipartition-v1"));
  // the minimum separates node 2
  CHECK(p.mip.part_a == std::vector<std::size_t>{0, 1});
}

TEST_CASE("phi equals exhaustive bipartition search") {
  Rng rng(100);
  for (std::size_t nodes = 2; nodes <= 4; ++nodes)
    for (int trial = 0; trial < 8; ++trial) {
      const Tpm t = random_tpm(rng, nodes, trial % 2 == 1);
      const PhiResult p = phi(t);
      CHECK(p.value == doctest::Approx(oracle::phi(rows_of(t), nodes)).epsilon(1e-10));
      CHECK(cut_divergence(t, p.mip) == doctest::Approx(p.value).epsilon(1e-12));
      CHECK(p.mip.part_a.front() == 0);
    }
}

TEST_CASE("cut divergence matches the explicit factorization") {
  Rng rng(7);
  const Tpm t = random_tpm(rng, 3, false);
  for (unsigned mask = 1; mask < 7; ++mask) {
    std::vector<std::size_t> part;
    for (std::size_t i = 0; i < 3; ++i)
      if (mask & (1U << i)) part.push_back(i);
    const Bipartition cut = Bipartition::from_part_a(part, 3);
    CHECK(cut_divergence(t, cut) == doctest::Approx(oracle::cut_divergence(rows_of(t), 3, mask)).epsilon(1e-12));
    const Tpm cut_tpm = partitioned_tpm(t, cut);
    for (std::size_t s = 0; s < 8; ++s) {
      double sum = 0;
      for (double v : cut_tpm.row(s)) sum += v;
      CHECK(sum == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("phi of disconnected and coupled systems") {
  // two independent copy-self nodes
  CHECK(phi(sim::identity_tpm(2)).value == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(std::abs(phi(sim::identity_tpm(3)).value) < 1e-12);
  CHECK(phi(sim::swap_tpm()).value == doctest::Approx(2.0));
  // the multithreaded search returns the same cut
  Rng rng(5);
  const Tpm t = random_tpm(rng, 4, false);
  const PhiResult a = phi(t, Workers{1});
  const PhiResult b = phi(t, Workers{3});
  CHECK(a.value == b.value);
  CHECK(a.mip == b.mip);
}

TEST_CASE("bipartition validation") {
  CHECK_THROWS_AS(Bipartition::from_part_a({}, 3), Error);
  CHECK_THROWS_AS(Bipartition::from_part_a({0, 1, 2}, 3), Error);
  CHECK_THROWS_AS(Bipartition::from_part_a({0, 5}, 3), Error);
  const Bipartition b = Bipartition::from_part_a({2, 0}, 3);
  CHECK(b.part_b == std::vector<std::size_t>{1});
}

TEST_CASE("TPM parsing and validation") {
  CHECK_THROWS_AS(Tpm::from_rows({{0.5, 0.6}, {0.5, 0.5}}), Error);
  CHECK_THROWS_AS(Tpm::from_rows({{1.0, 0.0, 0.0}, {0, 1, 0}, {0, 0, 1}}), Error);
  try {
    Tpm::from_json({{"n", 13}, {"tpm", Json::array()}});
    FAIL("expected SystemTooLarge");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SystemTooLarge);
  }
  // state-by-node: node 0 turns on with probability 1 when node 1 is on
  const Tpm sbn = Tpm::from_state_by_node({{0.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}});
  CHECK(sbn.source_format() == "state_by_node");
  CHECK(sbn(2, 1) == 1.0);
  CHECK(sbn(0, 0) == 1.0);
  const Tpm round = Tpm::from_json(sim::swap_tpm().to_json());
  CHECK(round(1, 2) == 1.0);
  CHECK(Tpm(9, std::vector<double>(512 * 512, 1.0 / 512)).warnings().size() == 1);
}

TEST_CASE("causal emergence in the degenerate construction") {
  const Tpm micro = sim::degenerate_tpm();
  const EmergenceResult r = causal_emergence(micro, {{0, 0, 0, 1}});
  // micro EI = H(mean row) - mean H(row): mean row (1/4, 1/4, 1/4, 1/4)
  const double expect_micro = 2.0 - 0.75 * std::log2(3.0);
  CHECK(r.ei_micro == doctest::Approx(expect_micro).epsilon(1e-12));
  CHECK(r.ei_macro == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.emergent);
  const EmergenceResult id = causal_emergence(sim::identity_tpm(2), {{0, 0, 1, 1}});
  CHECK(id.ei_micro == doctest::Approx(2.0));
  CHECK(id.ei_macro == doctest::Approx(1.0));
  CHECK_FALSE(id.emergent);
  CHECK_THROWS_AS(causal_emergence(micro, {{0, 0, 0, 0}}), Error);
  CHECK_THROWS_AS(causal_emergence(micro, {{0, 0, 2, 2}}), Error);
}

TEST_CASE("macro mechanism averages member rows") {
  const Mechanism micro(4, 4, {0.5, 0.5, 0, 0, 0, 0, 0.5, 0.5, 0, 0, 1, 0, 0, 0, 0, 1});
  const Mechanism macro = macro_mechanism(micro, {{0, 0, 1, 1}});
  CHECK(macro(0, 0) == doctest::Approx(0.5));
  CHECK(macro(0, 1) == doctest::Approx(0.5));
  CHECK(macro(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("autonomy of the discordance and self-copy systems") {
  const SystemSplit split{{0}, {1}, 1};
  const CausalAutonomy disc = autonomy_causal(sim::discordance_tpm(), split);
  CHECK(disc.value == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(disc.ei_total > 0.5);
  REQUIRE(disc.ratio.has_value());
  CHECK(*disc.ratio == doctest::Approx(0.0).epsilon(1e-12));
  const CausalAutonomy copy = autonomy_causal(sim::self_copy_tpm(), split);
  CHECK(copy.value == doctest::Approx(1.0).epsilon(1e-12));

  const auto episodes = sim::sample_episodes(sim::discordance_tpm(), split, 50, 200, 3);
  const ObservationalAutonomy obs = autonomy_observational(episodes, 1);
  CHECK(obs.value > 0.3);
  CHECK(obs.samples == 50 * 199);
  const auto copies = sim::sample_episodes(sim::self_copy_tpm(), split, 200, 20, 4);
  CHECK(autonomy_observational(copies, 1).value == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("observational autonomy matches plugin conditional entropies") {
  Rng rng(11);
  Episode ep;
  for (int t = 0; t < 500; ++t) {
    ep.e.push_back(static_cast<int>(rng.below(2)));
    ep.v.push_back(t == 0 ? 0 : (rng.bernoulli(0.7) ? ep.v.back() : ep.e[t - 1]));
  }
  std::vector<std::vector<int>> v, vp, e;
  for (std::size_t t = 1; t < 500; ++t) {
    v.push_back({ep.v[t]});
    vp.push_back({ep.v[t - 1]});
    e.push_back({ep.e[t - 1]});
  }
  // H(V|E) - H(V|V',E) = I(V; V' | E), converted to bits
  const double expect = oracle::plugin_cmi(v, vp, e) / std::log(2.0);
  const std::vector<Episode> eps{ep};
  CHECK(autonomy_observational(eps, 1).value == doctest::Approx(expect).epsilon(1e-12));
  const std::vector<Episode> tiny{{{0, 1, 0}, {1, 1, 0}}};
  CHECK_THROWS_AS(autonomy_observational(tiny, 1), Error);
}

TEST_CASE("system split validation") {
  CHECK_THROWS_AS(autonomy_causal(sim::swap_tpm(), {{0}, {0}, 1}), Error);
  CHECK_THROWS_AS(autonomy_causal(sim::swap_tpm(), {{0}, {}, 1}), Error);
  CHECK_THROWS_AS(autonomy_causal(sim::swap_tpm(), {{0}, {1}, 2}), Error);
  CHECK(project_state(0b101, std::vector<std::size_t>{2, 0}) == 3);
  CHECK(project_state(0b100, std::vector<std::size_t>{0, 2}) == 2);
}
