#pragma once

#include <cstddef>
#include <vector>

namespace infometer {

/// Digamma function, accurate to ~1e-15 relative.
double digamma(double x);

/// psi(1) ... psi(n) cached for the integer arguments kNN estimators use.
class DigammaTable {
 public:
  explicit DigammaTable(std::size_t max_arg);
  double operator()(std::size_t n) const { return values_[n]; }

 private:
  std::vector<double> values_;
};

constexpr double kLn2 = 0.69314718055994530942;
inline double nats_to_bits(double nats) { return nats / kLn2; }

}  // namespace infometer
