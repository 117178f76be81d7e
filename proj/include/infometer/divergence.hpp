#pragma once

#include <variant>

#include "infometer/core.hpp"

namespace infometer {

struct NoSmoothing {};
/// q <- (q + epsilon) / (1 + K epsilon)
struct AdditiveSmoothing {
  double epsilon = 1e-10;
};
/// q <- max(q, floor), then renormalized
struct ClipFloor {
  double floor = 1e-10;
};
using Smoothing = std::variant<NoSmoothing, AdditiveSmoothing, ClipFloor>;

Json describe(const Smoothing& s);

enum class Direction { Forward, Reverse };  // p||q or q||p
const char* to_string(Direction d) noexcept;

struct DivergenceResult {
  double value = 0.0;  // nats
  Direction direction = Direction::Forward;
  Smoothing smoothing = NoSmoothing{};
};

/// KL divergence. Smoothing is applied to the reference distribution (q for
/// Forward, p for Reverse). Without smoothing, reference mass of zero where the
/// other side is positive throws DisjointSupport.
DivergenceResult kl_discrete(const ProbTable& p, const ProbTable& q, const Smoothing& smoothing = NoSmoothing{},
                             Direction direction = Direction::Forward);

/// -sum p log q, with the same smoothing and support rules as kl_discrete.
double cross_entropy(const ProbTable& p, const ProbTable& q, const Smoothing& smoothing = NoSmoothing{});

/// Symmetric, finite, bounded by ln 2.
double jensen_shannon(const ProbTable& p, const ProbTable& q);

/// The reference distribution after smoothing.
std::vector<double> apply_smoothing(std::span<const double> q, const Smoothing& smoothing);

}  // namespace infometer
