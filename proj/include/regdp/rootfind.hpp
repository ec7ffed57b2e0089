#pragma once

#include <cmath>
#include <utility>

#include "regdp/errors.hpp"

namespace regdp {
namespace detail {

struct MonotoneRoot {
  double x = 0.0;
  double fx = 0.0;
  int iterations = 0;
  double lo = 0.0;  // final bracket, f(lo) < target <= f(hi)
  double hi = 0.0;
};

// Root of f(x) = target for continuous strictly increasing f on (0, inf).
// Bracket grows geometrically from seed by factors of 10, then geometric
// bisection. Accepts only from above: the returned point satisfies
// target <= f(x) <= target * (1 + rel_tol), so callers relying on the
// achieved value being at least the target get that for free.
// Fully deterministic; every f evaluation counts toward max_iter.
template <typename F>
MonotoneRoot solve_increasing(F&& f, double target, double seed, double rel_tol, int max_iter) {
  if (!(target > 0.0) || !std::isfinite(target)) throw InvalidValue("root target must be positive");
  if (!(seed > 0.0) || !std::isfinite(seed)) throw InvalidValue("bracket seed must be positive");

  const auto qualifies = [&](double fx) { return fx >= target && fx <= target * (1.0 + rel_tol); };

  int iter = 0;
  const auto eval = [&](double x) {
    if (iter >= max_iter) throw MaxIterExceeded("root search exceeded the iteration budget");
    ++iter;
    return f(x);
  };

  double lo = seed, hi = seed;
  double f_seed = eval(seed);
  if (qualifies(f_seed)) return {seed, f_seed, iter, seed, seed};

  if (f_seed < target) {
    for (;;) {
      lo = hi;
      hi *= 10.0;
      if (hi > 1e300) throw NoRoot("discrepancy never reaches the target from below");
      const double fh = eval(hi);
      if (qualifies(fh)) return {hi, fh, iter, lo, hi};
      if (fh >= target) break;
    }
  } else {
    for (;;) {
      hi = lo;
      lo /= 10.0;
      if (lo < 1e-300) throw NoRoot("discrepancy stays above the target down to zero");
      const double fl = eval(lo);
      if (qualifies(fl)) return {lo, fl, iter, lo, hi};
      if (fl < target) break;
    }
  }

  for (;;) {
    const double mid = std::sqrt(lo) * std::sqrt(hi);
    if (!(mid > lo && mid < hi)) {
      // Bracket collapsed to adjacent doubles without entering the
      // acceptance window; cannot happen for the gentle monotone maps
      // this library produces, but fail loudly rather than loop.
      throw ConvergenceFailure("root bracket collapsed before meeting the tolerance");
    }
    const double fm = eval(mid);
    if (qualifies(fm)) return {mid, fm, iter, lo, hi};
    (fm < target ? lo : hi) = mid;
  }
}

}  // namespace detail
}  // namespace regdp
