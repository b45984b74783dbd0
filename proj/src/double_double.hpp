#pragma once

#include <cmath>

namespace coboson::detail {

// Unevaluated sum hi + lo with |lo| <= ulp(hi)/2. Error-free transforms after
// Knuth (TwoSum) and Dekker (TwoProd via fma).
struct DoubleDouble {
  double hi = 0.0;
  double lo = 0.0;
};

inline DoubleDouble two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  const double err = (a - (s - bb)) + (b - bb);
  return {s, err};
}

inline DoubleDouble quick_two_sum(double a, double b) {
  const double s = a + b;
  return {s, b - (s - a)};
}

inline DoubleDouble operator+(DoubleDouble x, DoubleDouble y) {
  DoubleDouble s = two_sum(x.hi, y.hi);
  DoubleDouble t = two_sum(x.lo, y.lo);
  s.lo += t.hi;
  s = quick_two_sum(s.hi, s.lo);
  s.lo += t.lo;
  return quick_two_sum(s.hi, s.lo);
}

inline DoubleDouble operator*(DoubleDouble x, double y) {
  const double p = x.hi * y;
  const double e = std::fma(x.hi, y, -p);
  return quick_two_sum(p, e + x.lo * y);
}

}  // namespace coboson::detail
