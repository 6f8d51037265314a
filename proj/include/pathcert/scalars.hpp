#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include "pathcert/polynomial.hpp"

namespace pathcert {

// Arbitrary-precision rational scalar used by the exact re-verification mode
// of the certificate checker. Conversion from double is exact (every finite
// double is a dyadic rational).
using Rational = boost::multiprecision::cpp_rational;

inline Rational to_rational(double x) { return Rational(x); }

inline double to_double(const Rational& r) { return r.template convert_to<double>(); }

template <>
inline Rational scalar_from_double<Rational>(double x) {
  return to_rational(x);
}

}  // namespace pathcert
