#include "infometer/divergence.hpp"

#include <algorithm>
#include <cmath>

#include "infometer/entropy.hpp"

namespace infometer {

const char* to_string(Direction d) noexcept { return d == Direction::Forward ? "forward" : "reverse"; }

Json describe(const Smoothing& s) {
  return std::visit(
      [](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, NoSmoothing>) return {{"kind", "none"}};
        else if constexpr (std::is_same_v<T, AdditiveSmoothing>)
          return {{"kind", "additive"}, {"epsilon", v.epsilon}};
        else return {{"kind", "clip_floor"}, {"floor", v.floor}};
      },
      s);
}

std::vector<double> apply_smoothing(std::span<const double> q, const Smoothing& smoothing) {
  std::vector<double> out(q.begin(), q.end());
  if (const auto* add = std::get_if<AdditiveSmoothing>(&smoothing)) {
    require(add->epsilon > 0.0, ErrorKind::InvalidConfig, "smoothing epsilon must be positive");
    const double norm = 1.0 + static_cast<double>(out.size()) * add->epsilon;
    for (double& v : out) v = (v + add->epsilon) / norm;
  } else if (const auto* clip = std::get_if<ClipFloor>(&smoothing)) {
    require(clip->floor > 0.0, ErrorKind::InvalidConfig, "clip floor must be positive");
    double total = 0.0;
    for (double& v : out) total += (v = std::max(v, clip->floor));
    for (double& v : out) v /= total;
  }
  return out;
}

namespace {

void check_alphabets(const ProbTable& p, const ProbTable& q) {
  require(p.size() == q.size(), ErrorKind::InvalidInput,
          "distributions have different alphabet sizes (" + std::to_string(p.size()) + " vs " +
              std::to_string(q.size()) + ")");
}

// sum a log(a / b) with a the "true" side and b the smoothed reference.
double kl_raw(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] <= 0.0) continue;
    if (b[i] <= 0.0) {
      fail(ErrorKind::DisjointSupport,
           "reference has zero mass at symbol " + std::to_string(i) +
               " where the other distribution is positive, so KL is infinite. Use smoothing "
               "or the Jensen-Shannon divergence");
    }
    d += a[i] * std::log(a[i] / b[i]);
  }
  return std::max(d, 0.0);
}

}  // namespace

DivergenceResult kl_discrete(const ProbTable& p, const ProbTable& q, const Smoothing& smoothing,
                             Direction direction) {
  check_alphabets(p, q);
  const ProbTable& truth = direction == Direction::Forward ? p : q;
  const ProbTable& ref = direction == Direction::Forward ? q : p;
  const std::vector<double> smoothed = apply_smoothing(ref.probs(), smoothing);
  return {kl_raw(truth.probs(), smoothed), direction, smoothing};
}

double cross_entropy(const ProbTable& p, const ProbTable& q, const Smoothing& smoothing) {
  check_alphabets(p, q);
  const std::vector<double> smoothed = apply_smoothing(q.probs(), smoothing);
  double h = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (smoothed[i] <= 0.0) {
      fail(ErrorKind::DisjointSupport,
           "q has zero mass where p is positive, so cross-entropy is infinite. Use smoothing "
           "or the Jensen-Shannon divergence");
    }
    h -= p[i] * std::log(smoothed[i]);
  }
  return h;
}

double jensen_shannon(const ProbTable& p, const ProbTable& q) {
  check_alphabets(p, q);
  std::vector<double> m(p.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = 0.5 * (p[i] + q[i]);
  // Symmetric by construction: both halves use the same mixture.
  const double js = 0.5 * kl_raw(p.probs(), m) + 0.5 * kl_raw(q.probs(), m);
  return std::clamp(js, 0.0, 0.69314718055994530942);
}

}  // namespace infometer
