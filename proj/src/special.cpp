#include "infometer/special.hpp"

#include <boost/math/special_functions/digamma.hpp>

namespace infometer {

double digamma(double x) { return boost::math::digamma(x); }

DigammaTable::DigammaTable(std::size_t max_arg) : values_(max_arg + 1, 0.0) {
  for (std::size_t n = 1; n <= max_arg; ++n) values_[n] = digamma(static_cast<double>(n));
}

}  // namespace infometer
