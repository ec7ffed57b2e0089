#pragma once

#include <cmath>
#include <cstddef>

#include "regdp/errors.hpp"

namespace regdp {

// Compensated (Kahan) accumulator. Keeps the running error of the float
// sum in a correction term so long streams lose almost no precision.
class KahanAccumulator {
public:
  void add(double value) {
    const double y = value - compensation_;
    const double t = sum_ + y;
    compensation_ = (t - sum_) - y;
    sum_ = t;
  }

  KahanAccumulator& operator+=(double value) {
    add(value);
    return *this;
  }

  double value() const { return sum_; }

private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

// Closed interval [lo, hi] certifying where a truncated series value lies.
struct Enclosure {
  double lo = 0.0;
  double hi = 0.0;

  double mid() const { return 0.5 * (lo + hi); }
  double half_width() const { return 0.5 * (hi - lo); }

  Enclosure shifted(double c) const { return {lo + c, hi + c}; }

  // Scale by a nonnegative factor (order of endpoints is preserved).
  Enclosure scaled(double c) const { return {lo * c, hi * c}; }

  Enclosure sqrt() const { return {std::sqrt(lo), std::sqrt(hi)}; }
};

inline Enclosure make_enclosure(double lo, double hi) {
  if (!(lo <= hi)) throw InvalidValue("enclosure endpoints out of order");
  return {lo, hi};
}

// Dot product with double-double accumulation (TwoProd via fma + TwoSum).
// Used where a plain dot's n*eps rounding would drown the quantity compared.
inline double compensated_dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0, c = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = a[i] * b[i];
    const double perr = std::fma(a[i], b[i], -p);
    // TwoSum(s, p)
    double t = s + p;
    const double bv = t - s;
    const double serr = (s - (t - bv)) + (p - bv);
    s = t;
    c += serr + perr;
  }
  return s + c;
}

}  // namespace regdp
