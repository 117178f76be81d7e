#include <doctest.h>

#include <cmath>

#include "infometer/mi.hpp"
#include "infometer/simulate.hpp"
#include "oracle.hpp"

using namespace infometer;

namespace {

SampleMatrix col(const oracle::Points& p) {
  std::vector<double> v;
  for (const auto& r : p) v.insert(v.end(), r.begin(), r.end());
  return SampleMatrix(p.size(), p[0].size(), v);
}

const KsgOptions kRaw{.k = 4, .standardize = false, .jitter = false};

}  // namespace

TEST_CASE("plugin MI of tables") {
  // independent table: MI = 0
  CHECK(mi_plugin(JointTable::from_matrix({{0.06, 0.14}, {0.24, 0.56}})).value ==
        doctest::Approx(0.0).epsilon(1e-12));
  // perfectly dependent binary table: MI = ln 2
  CHECK(mi_plugin(JointTable::from_matrix({{0.5, 0.0}, {0.0, 0.5}})).value == doctest::Approx(std::log(2.0)));
}

TEST_CASE("plugin (conditional) MI on integer samples matches enumeration") {
  Rng rng(15);
  std::vector<std::vector<int>> px, py, pz;
  std::vector<double> fx, fy, fz;
  for (int i = 0; i < 400; ++i) {
    const int z = static_cast<int>(rng.below(3));
    const int a = (z + static_cast<int>(rng.below(2))) % 3;
    const int b = rng.bernoulli(0.8) ? a : static_cast<int>(rng.below(3));
    px.push_back({a});
    py.push_back({b});
    pz.push_back({z});
    fx.push_back(a);
    fy.push_back(b);
    fz.push_back(z);
  }
  const double cmi_frozen = 0.39590854280217425;
  const double mi_frozen = 0.61755054024172695;
  CHECK(oracle::plugin_cmi(px, py, pz) == doctest::Approx(cmi_frozen).epsilon(1e-14));
  CHECK(oracle::plugin_cmi(px, py, std::vector<std::vector<int>>(400)) ==
        doctest::Approx(mi_frozen).epsilon(1e-14));
  const auto x = SampleMatrix::from_column(fx), y = SampleMatrix::from_column(fy), z = SampleMatrix::from_column(fz);
  CHECK(plugin_cmi_rows(x, y, &z) == doctest::Approx(cmi_frozen).epsilon(1e-12));
  CHECK(plugin_cmi_rows(x, y) == doctest::Approx(mi_frozen).epsilon(1e-12));
  CHECK_THROWS_AS(plugin_cmi_rows(SampleMatrix::from_column(std::vector<double>{0.5, 1.0}),
                                  SampleMatrix::from_column(std::vector<double>{0.0, 1.0})),
                  Error);
}

TEST_CASE("KSG MI matches the brute-force estimate") {
  const SampleMatrix g = sim::gaussian_pair(200, 0.6, 11);
  oracle::Points x, y;
  for (std::size_t i = 0; i < 200; ++i) {
    x.push_back({g(i, 0)});
    y.push_back({g(i, 1)});
  }
  const double frozen = 0.11895530350099293;
  CHECK(oracle::ksg_mi(x, y, 4) == doctest::Approx(frozen).epsilon(1e-13));
  const MiEstimate e = mi_ksg(col(x), col(y), kRaw);
  CHECK(e.value == doctest::Approx(frozen).epsilon(1e-12));
  CHECK(e.role == "measurement");
  CHECK(e.k == 4);
}

TEST_CASE("conditional KSG matches the brute-force estimate") {
  Rng rng(12);
  oracle::Points x, y, z;
  for (int i = 0; i < 150; ++i) {
    const double c = rng.normal();
    const double a = c + rng.normal();
    const double b = 0.5 * a + c + rng.normal();
    x.push_back({a});
    y.push_back({b});
    z.push_back({c});
  }
  const double frozen = 0.28952150671870536;
  CHECK(oracle::ksg_cmi(x, y, z, 4) == doctest::Approx(frozen).epsilon(1e-13));
  CHECK(cmi_ksg(col(x), col(y), col(z), kRaw).value == doctest::Approx(frozen).epsilon(1e-12));
}

TEST_CASE("KSG against brute force on random multivariate blocks") {
  Rng rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 40 + rng.below(80);
    const std::size_t dx = 1 + rng.below(2), dy = 1 + rng.below(2), dz = 1 + rng.below(2);
    const std::size_t k = 1 + rng.below(6);
    oracle::Points x(n), y(n), z(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < dz; ++j) z[i].push_back(rng.normal());
      for (std::size_t j = 0; j < dx; ++j) x[i].push_back(z[i][0] + rng.normal());
      for (std::size_t j = 0; j < dy; ++j) y[i].push_back(x[i][0] + rng.normal());
    }
    const KsgOptions o{.k = k, .standardize = false, .jitter = false};
    CHECK(mi_ksg(col(x), col(y), o).value == doctest::Approx(oracle::ksg_mi(x, y, k)).epsilon(1e-12));
    CHECK(cmi_ksg(col(x), col(y), col(z), o).value ==
          doctest::Approx(oracle::ksg_cmi(x, y, z, k)).epsilon(1e-12));
  }
}

TEST_CASE("KSG is symmetric and invariant to per-column affine maps") {
  const SampleMatrix g = sim::gaussian_pair(500, 0.5, 3);
  const std::vector<std::size_t> c0{0}, c1{1};
  const SampleMatrix x = g.select_columns(c0), y = g.select_columns(c1);
  const KsgOptions o{.k = 5, .jitter = false};
  const double xy = mi_ksg(x, y, o).value;
  CHECK(mi_ksg(y, x, o).value == doctest::Approx(xy).epsilon(1e-12));
  std::vector<double> scaled;
  for (double v : x.data()) scaled.push_back(10.0 * v - 4.0);
  CHECK(mi_ksg(SampleMatrix::from_column(scaled), y, o).value == doctest::Approx(xy).epsilon(1e-9));
}

TEST_CASE("Gaussian oracle and KSG agree at moderate N") {
  CHECK(mi_gaussian_oracle(0.6) == doctest::Approx(0.22314355131420976));
  CHECK(mi_gaussian_oracle(0.0) == 0.0);
  const SampleMatrix g = sim::gaussian_pair(3000, 0.6, 8);
  const std::vector<std::size_t> c0{0}, c1{1};
  const double v = mi_ksg(g.select_columns(c0), g.select_columns(c1)).value;
  CHECK(v == doctest::Approx(mi_gaussian_oracle(0.6)).epsilon(0.05 / 0.2231));
}

TEST_CASE("KSG input validation and warnings") {
  const SampleMatrix a(5, 1, {1, 2, 3, 4, 5});
  CHECK_THROWS_AS(mi_ksg(a, a, {.k = 5}), Error);
  CHECK_THROWS_AS(mi_ksg(a, SampleMatrix(4, 1, {1, 2, 3, 4})), Error);
  Rng rng(1);
  std::vector<double> wide(60 * 11), other(60 * 11);
  for (double& v : wide) v = rng.normal();
  for (double& v : other) v = rng.normal();
  const MiEstimate e = mi_ksg(SampleMatrix(60, 11, wide), SampleMatrix(60, 11, other));
  CHECK_FALSE(e.warnings.empty());
}

TEST_CASE("engine scores reordered blocks like a fresh estimate") {
  const SampleMatrix g = sim::gaussian_pair(300, 0.4, 5);
  const std::vector<std::size_t> c0{0}, c1{1};
  const SampleMatrix x = g.select_columns(c0), y = g.select_columns(c1);
  const KsgEngine engine(x, std::nullopt, 4);
  std::vector<std::size_t> order(300);
  for (std::size_t i = 0; i < 300; ++i) order[i] = (i * 7 + 3) % 300;
  CHECK(engine.estimate_reordered(y, order) ==
        doctest::Approx(mi_ksg(x, y.select_rows(order), kRaw).value).epsilon(1e-12));
}
