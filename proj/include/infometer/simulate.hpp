#pragma once

#include <cstddef>
#include <vector>

#include "infometer/causal.hpp"
#include "infometer/core.hpp"

namespace infometer {

/// Ground-truth generators used by the acceptance suite and `simulate`.
/// Every generator is a pure function of its seed.
namespace sim {

inline constexpr std::size_t kBurnIn = 200;

/// y(t+1) = 0.5 y(t) + eta; x(t+1) = 0.5 x(t) + c y(t+1-delay) + eps, unit noises.
struct CoupledAr {
  std::vector<double> x;  // driven
  std::vector<double> y;  // driver
};
CoupledAr coupled_ar(std::size_t n, double coupling, std::size_t delay, std::uint64_t seed);

/// x(t+1) = phi x(t) + eps, unit noise.
std::vector<double> ar1(std::size_t n, double phi, std::uint64_t seed);

/// Standard bivariate normal pairs with correlation rho.
SampleMatrix gaussian_pair(std::size_t n, double rho, std::uint64_t seed);

/// `m` AR(0.5) streams; each edge (s, t) adds coupling * stream_s(t) to
/// stream_t(t+1). Columns are named A, B, C, ...
SampleMatrix ar_network(std::size_t n, std::size_t m,
                        const std::vector<std::pair<std::size_t, std::size_t>>& edges, double coupling,
                        std::uint64_t seed);

/// Five streams with the single planted edge A -> B.
SampleMatrix planted_network(std::size_t n, std::uint64_t seed, double coupling = 0.5);
/// Three streams A -> B -> C.
SampleMatrix chain(std::size_t n, std::uint64_t seed, double coupling = 0.5);
/// Uncoupled AR(0.5) streams.
SampleMatrix independent_streams(std::size_t n, std::size_t m, std::uint64_t seed);

/// n-node identity dynamics: every state maps to itself.
Tpm identity_tpm(std::size_t nodes);
/// Two nodes, each copying the other: X' = Y, Y' = X.
Tpm swap_tpm();
/// Four states: 0, 1, 2 move uniformly among {0, 1, 2}; 3 stays at 3.
/// Grouping {0, 1, 2} | {3} gives a deterministic 1-bit macro mechanism.
Tpm degenerate_tpm();
/// Node 0 (V) flips with node 1 (E): V' = V xor E. E keeps its value with
/// probability `stay`. V's own dynamics carry no causal information, yet
/// V's past predicts V beyond E's past.
Tpm discordance_tpm(double stay = 0.9);
/// Node 0 (V) copies itself; node 1 (E) is uniform noise.
Tpm self_copy_tpm();

/// Episodes sampled from `tpm`, each starting in a uniform random state,
/// projected onto the V and E nodes of `split`.
std::vector<Episode> sample_episodes(const Tpm& tpm, const SystemSplit& split, std::size_t episodes,
                                     std::size_t length, std::uint64_t seed);

}  // namespace sim
}  // namespace infometer
