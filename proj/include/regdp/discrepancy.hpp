#pragma once

#include <optional>

#include "regdp/linop.hpp"
#include "regdp/tikhonov.hpp"

namespace regdp {
namespace discrepancy {

// Controls for the discrepancy equation h(a) = C * delta.
struct DPConfig {
  double C = 1.0;           // target multiplier, must be >= 1
  double rel_tol = 1e-9;    // relative width of the acceptance window, in (0, 1e-2]
  int max_iter = 200;       // total evaluation budget, >= 10
  std::optional<double> bracket_seed;  // starting point of the bracket search; defaults to delta

  void validate() const;
};

struct DPResult {
  double a = 0.0;        // accepted regularization parameter
  double h_at_a = 0.0;   // discrepancy value there, in [C*delta, C*delta*(1+rel_tol)]
  int iterations = 0;    // number of h evaluations spent
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
};

// h(a) = a * || (Q + a)^{-1} f ||  restricted to the closure of the range,
// where Q = A A^*. Singular directions with sigma <= 1e-10 * sigma_max are
// treated as exact null directions and excluded. Strictly increasing in a,
// tends to 0 as a -> 0+ and to ||P f|| as a -> infinity.
double discrepancy_value(const linop::SingularSystem& S, const Vector& f_delta, double a);

// Solve h(a) = C * delta. Requires ||P f_delta|| > C * delta, otherwise the
// equation has no positive root and NoRoot is thrown. Deterministic.
DPResult solve_dp(const linop::SingularSystem& S, const Vector& f_delta, double delta,
                  const DPConfig& config = {});

// Convenience: run solve_dp, then return the regularized solution at the
// accepted parameter.
tikhonov::RegularizedSolution regularize_dp(const linop::SingularSystem& S, const Vector& f_delta,
                                            double delta, const DPConfig& config = {});

}  // namespace discrepancy
}  // namespace regdp
