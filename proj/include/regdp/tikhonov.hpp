#pragma once

#include "regdp/linop.hpp"

namespace regdp {
namespace tikhonov {

/// Minimizer of ||A u - f_delta||^2 + a ||u||^2 together with the
/// quantities the choice rules need. functional_value always equals
/// residual_norm^2 + a * solution_norm^2.
struct RegularizedSolution {
  double a = 0.0;
  Vector u;
  double residual_norm = 0.0;
  double solution_norm = 0.0;
  double functional_value = 0.0;
};

/// Spectral solve of the Euler equation (A^T A + a) u = A^T f_delta:
/// u = sum_j sigma_j <u_j, f_delta> / (sigma_j^2 + a) v_j. Requires a > 0.
RegularizedSolution solve(const linop::SingularSystem& S, const Vector& f_delta, double a);

/// ||A u - f_delta||^2 + a ||u||^2 for an arbitrary candidate u,
/// evaluated through the singular system's action.
double functional_value(const linop::SingularSystem& S, const Vector& f_delta, double a,
                        const Vector& u);

/// Spectral filter sigma / (sigma^2 + a). Maximized at sigma = sqrt(a).
double filter_factor(double sigma, double a);

/// Operator norm of (A^T A + a)^{-1} A^T over all spectra: 1 / (2 sqrt(a)).
double filter_operator_norm(double a);

/// sup_{0 <= s <= s_max} a s^b / (s + a) for 0 < b < 1. Equals
/// b^b (1-b)^(1-b) a^b when the interior maximizer s* = a b/(1-b) is in range.
double saturation_norm(double a, double b, double s_max);

}  // namespace tikhonov
}  // namespace regdp
