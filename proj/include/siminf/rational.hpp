#pragma once

#include <boost/rational.hpp>
#include <string>

namespace siminf {

/// Exact rational number. All metric values (coherency, relevancy,
/// informativity) are ratios in [0,1] and are never rounded internally.
using Rational = boost::rational<long long>;

inline double to_double(const Rational& r) {
  return boost::rational_cast<double>(r);
}

/// "2/3", or just "1" when the denominator is 1.
inline std::string to_fraction_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

}  // namespace siminf
