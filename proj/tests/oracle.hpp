#pragma once

// Brute-force reference implementations. Each one follows the defining
// formula directly (full enumeration, O(N^2) scans) and shares no code with
// the library beyond plain data types.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <vector>

#include <boost/math/special_functions/digamma.hpp>

namespace oracle {

using Points = std::vector<std::vector<double>>;  // one inner vector per row

inline double cheb(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::fabs(a[j] - b[j]));
  return m;
}

inline double kth_distance(const Points& p, std::size_t i, std::size_t k) {
  std::vector<double> d;
  for (std::size_t j = 0; j < p.size(); ++j)
    if (j != i) d.push_back(cheb(p[i], p[j]));
  std::sort(d.begin(), d.end());
  return d[k - 1];
}

inline std::size_t count_within(const Points& p, std::size_t i, double r, bool strict) {
  std::size_t c = 0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (j == i) continue;
    const double d = cheb(p[i], p[j]);
    c += strict ? d < r : d <= r;
  }
  return c;
}

inline Points concat(const Points& a, const Points& b) {
  Points out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i].insert(out[i].end(), b[i].begin(), b[i].end());
  return out;
}

inline double psi(double x) { return boost::math::digamma(x); }

/// KSG algorithm 1 on raw coordinates.
inline double ksg_mi(const Points& x, const Points& y, std::size_t k) {
  const Points xy = concat(x, y);
  const double n = static_cast<double>(x.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double eps = kth_distance(xy, i, k);
    acc += psi(static_cast<double>(count_within(x, i, eps, true)) + 1.0) +
           psi(static_cast<double>(count_within(y, i, eps, true)) + 1.0);
  }
  return psi(static_cast<double>(k)) + psi(n) - acc / n;
}

/// Conditional KSG on raw coordinates.
inline double ksg_cmi(const Points& x, const Points& y, const Points& z, std::size_t k) {
  const Points xz = concat(x, z);
  const Points yz = concat(y, z);
  const Points xyz = concat(x, yz);
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double eps = kth_distance(xyz, i, k);
    acc += psi(static_cast<double>(count_within(xz, i, eps, true)) + 1.0) +
           psi(static_cast<double>(count_within(yz, i, eps, true)) + 1.0) -
           psi(static_cast<double>(count_within(z, i, eps, true)) + 1.0);
  }
  return psi(static_cast<double>(k)) - acc / static_cast<double>(x.size());
}

/// Kozachenko-Leonenko, max-norm, raw coordinates.
inline double kl_entropy(const Points& p, std::size_t k) {
  const double n = static_cast<double>(p.size());
  const double d = static_cast<double>(p[0].size());
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) acc += std::log(2.0 * kth_distance(p, i, k));
  return psi(n) - psi(static_cast<double>(k)) + d * acc / n;
}

/// Vasicek m-spacing estimate with the end values repeated.
inline double vasicek(std::vector<double> x, std::size_t m) {
  std::sort(x.begin(), x.end());
  const long n = static_cast<long>(x.size());
  double acc = 0.0;
  for (long i = 0; i < n; ++i) {
    const double hi = x[static_cast<std::size_t>(std::min(i + static_cast<long>(m), n - 1))];
    const double lo = x[static_cast<std::size_t>(std::max(i - static_cast<long>(m), 0L))];
    acc += std::log(static_cast<double>(n) / (2.0 * static_cast<double>(m)) * (hi - lo));
  }
  return acc / static_cast<double>(n);
}

/// Entropy (nats) of the empirical distribution of arbitrary keys.
template <class Key>
double plugin_entropy(const std::vector<Key>& keys) {
  std::map<Key, double> counts;
  for (const auto& k : keys) counts[k] += 1.0;
  double h = 0.0;
  for (const auto& [key, c] : counts) {
    const double p = c / static_cast<double>(keys.size());
    h -= p * std::log(p);
  }
  return h;
}

/// Plugin I(X;Y|Z) = H(XZ) + H(YZ) - H(XYZ) - H(Z) over integer tuples.
inline double plugin_cmi(const std::vector<std::vector<int>>& x, const std::vector<std::vector<int>>& y,
                         const std::vector<std::vector<int>>& z) {
  auto join = [](std::vector<int> a, const std::vector<int>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  };
  std::vector<std::vector<int>> xz, yz, xyz;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xz.push_back(join(x[i], z[i]));
    yz.push_back(join(y[i], z[i]));
    xyz.push_back(join(join(x[i], y[i]), z[i]));
  }
  return plugin_entropy(xz) + plugin_entropy(yz) - plugin_entropy(xyz) - plugin_entropy(z);
}

// ---- transition matrices ---------------------------------------------------

using Matrix = std::vector<std::vector<double>>;  // rows are distributions

inline double kl_bits(const std::vector<double>& p, const std::vector<double>& q) {
  double acc = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j)
    if (p[j] > 0.0) acc += p[j] * std::log2(p[j] / q[j]);
  return acc;
}

/// Mean KL(row || mean row), bits.
inline double effective_information(const Matrix& m) {
  std::vector<double> avg(m[0].size(), 0.0);
  for (const auto& row : m)
    for (std::size_t j = 0; j < row.size(); ++j) avg[j] += row[j] / static_cast<double>(m.size());
  double acc = 0.0;
  for (const auto& row : m) acc += kl_bits(row, avg);
  return acc / static_cast<double>(m.size());
}

/// Probability that the nodes in `mask` reach the bits of `target` from
/// state s, with the nodes outside `mask` set uniformly at random.
inline double part_transition(const Matrix& tpm, std::size_t nodes, unsigned mask, std::size_t s,
                              std::size_t target) {
  const std::size_t states = std::size_t{1} << nodes;
  double acc = 0.0;
  std::size_t members = 0;
  for (std::size_t s2 = 0; s2 < states; ++s2) {
    if ((s2 & mask) != (s & mask)) continue;
    ++members;
    for (std::size_t t = 0; t < states; ++t)
      if ((t & mask) == (target & mask)) acc += tpm[s2][t];
  }
  return acc / static_cast<double>(members);
}

/// Mean KL(whole || cut), bits, for the cut separating `mask` from the rest.
inline double cut_divergence(const Matrix& tpm, std::size_t nodes, unsigned mask) {
  const std::size_t states = std::size_t{1} << nodes;
  const unsigned rest = static_cast<unsigned>(states - 1) & ~mask;
  double acc = 0.0;
  for (std::size_t s = 0; s < states; ++s) {
    std::vector<double> cut(states);
    for (std::size_t t = 0; t < states; ++t)
      cut[t] = part_transition(tpm, nodes, mask, s, t) * part_transition(tpm, nodes, rest, s, t);
    acc += kl_bits(tpm[s], cut);
  }
  return acc / static_cast<double>(states);
}

/// Minimum cut divergence over every bipartition.
inline double phi(const Matrix& tpm, std::size_t nodes) {
  const unsigned all = (1U << nodes) - 1;
  double best = INFINITY;
  for (unsigned mask = 1; mask < all; ++mask) best = std::min(best, cut_divergence(tpm, nodes, mask));
  return best;
}

}  // namespace oracle
