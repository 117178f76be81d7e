#include <doctest.h>

#include <cmath>

#include "infometer/divergence.hpp"
#include "infometer/entropy.hpp"

using namespace infometer;

namespace {

ProbTable random_table(Rng& rng, std::size_t k) {
  std::vector<double> w(k);
  double s = 0;
  for (double& v : w) s += (v = rng.uniform() + 1e-3);
  for (double& v : w) v /= s;
  return ProbTable(w);
}

}  // namespace

TEST_CASE("KL divergence of two coins") {
  const ProbTable p({0.5, 0.5}), q({0.25, 0.75});
  const double expect = 0.5 * std::log(2.0) + 0.5 * std::log(0.5 / 0.75);
  CHECK(kl_discrete(p, q).value == doctest::Approx(expect).epsilon(1e-15));
  const double reverse = 0.25 * std::log(0.5) + 0.75 * std::log(1.5);
  CHECK(kl_discrete(p, q, NoSmoothing{}, Direction::Reverse).value == doctest::Approx(reverse).epsilon(1e-15));
  CHECK(kl_discrete(p, p).value == 0.0);
}

TEST_CASE("disjoint support needs smoothing") {
  const ProbTable p({0.5, 0.5}), q({1.0, 0.0});
  try {
    kl_discrete(p, q);
    FAIL("expected DisjointSupport");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DisjointSupport);
  }
  const double eps = 1e-6;
  const double q1 = eps / (1.0 + 2.0 * eps), q0 = (1.0 + eps) / (1.0 + 2.0 * eps);
  const double expect = 0.5 * std::log(0.5 / q0) + 0.5 * std::log(0.5 / q1);
  CHECK(kl_discrete(p, q, AdditiveSmoothing{eps}).value == doctest::Approx(expect).epsilon(1e-12));
  const std::vector<double> clipped = apply_smoothing(q.probs(), ClipFloor{0.01});
  CHECK(clipped[1] == doctest::Approx(0.01 / 1.01));
  CHECK(std::isfinite(kl_discrete(p, q, ClipFloor{0.01}).value));
  // p = 0 where q > 0 is fine without smoothing
  CHECK(kl_discrete(q, p).value == doctest::Approx(std::log(2.0)));
}

TEST_CASE("divergence identities on random tables") {
  Rng rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 2 + rng.below(7);
    const ProbTable p = random_table(rng, k), q = random_table(rng, k);
    const double kl = kl_discrete(p, q).value;
    CHECK(kl >= 0.0);
    CHECK(cross_entropy(p, q) == doctest::Approx(entropy_plugin(p).value + kl).epsilon(1e-12));
    const double js = jensen_shannon(p, q);
    CHECK(js == doctest::Approx(jensen_shannon(q, p)).epsilon(1e-14));
    CHECK(js >= 0.0);
    CHECK(js <= std::log(2.0) + 1e-15);
    CHECK(kl_discrete(p, q, NoSmoothing{}, Direction::Reverse).value ==
          doctest::Approx(kl_discrete(q, p).value).epsilon(1e-14));
  }
}

TEST_CASE("Jensen-Shannon of disjoint tables is ln 2") {
  CHECK(jensen_shannon(ProbTable({1.0, 0.0}), ProbTable({0.0, 1.0})) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("mismatched alphabets are rejected") {
  CHECK_THROWS_AS(kl_discrete(ProbTable({0.5, 0.5}), ProbTable({0.2, 0.3, 0.5})), Error);
}
