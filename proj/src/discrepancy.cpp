#include "regdp/discrepancy.hpp"

#include <cmath>

#include "regdp/errors.hpp"
#include "regdp/rootfind.hpp"
#include "regdp/summation.hpp"

namespace regdp {
namespace discrepancy {

namespace {

// h(a) from precomputed left coefficients beta = U^T f, counting only
// directions above the null cutoff.
double value_from_coefficients(const Vector& sigma, const Vector& beta, double cutoff, double a) {
  KahanAccumulator acc;
  for (Eigen::Index j = 0; j < sigma.size(); ++j) {
    if (sigma[j] <= cutoff) continue;
    const double q = sigma[j] * sigma[j];
    const double t = a * beta[j] / (q + a);
    acc.add(t * t);
  }
  return std::sqrt(acc.value());
}

}  // namespace

void DPConfig::validate() const {
  if (!(C >= 1.0) || !std::isfinite(C)) throw ConfigError("discrepancy multiplier C must be >= 1");
  if (!(rel_tol > 0.0) || !(rel_tol <= 1e-2))
    throw ConfigError("rel_tol must lie in (0, 1e-2]");
  if (max_iter < 10) throw ConfigError("max_iter must be at least 10");
  if (bracket_seed && (!(*bracket_seed > 0.0) || !std::isfinite(*bracket_seed)))
    throw ConfigError("bracket_seed must be positive");
}

double discrepancy_value(const linop::SingularSystem& S, const Vector& f_delta, double a) {
  if (f_delta.size() != S.rows())
    throw DimensionMismatch("data vector length does not match operator rows");
  if (!(a > 0.0) || !std::isfinite(a))
    throw NonpositiveParameter("regularization parameter must be positive");
  const Vector beta = S.left.transpose() * f_delta;
  return value_from_coefficients(S.sigma, beta, linop::default_null_tol(S), a);
}

DPResult solve_dp(const linop::SingularSystem& S, const Vector& f_delta, double delta,
                  const DPConfig& config) {
  config.validate();
  if (f_delta.size() != S.rows())
    throw DimensionMismatch("data vector length does not match operator rows");
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw NonpositiveParameter("noise level must be positive");

  const Vector beta = S.left.transpose() * f_delta;
  const double cutoff = linop::default_null_tol(S);

  // || P f ||, the supremum of h: the equation is solvable iff it exceeds
  // the target.
  KahanAccumulator proj;
  for (Eigen::Index j = 0; j < S.sigma.size(); ++j) {
    if (S.sigma[j] <= cutoff) continue;
    proj.add(beta[j] * beta[j]);
  }
  const double target = config.C * delta;
  if (!(std::sqrt(proj.value()) > target))
    throw NoRoot("projected data norm does not exceed C * delta");

  const double seed = config.bracket_seed.value_or(delta);
  const auto h = [&](double a) { return value_from_coefficients(S.sigma, beta, cutoff, a); };
  const detail::MonotoneRoot root =
      detail::solve_increasing(h, target, seed, config.rel_tol, config.max_iter);

  DPResult out;
  out.a = root.x;
  out.h_at_a = root.fx;
  out.iterations = root.iterations;
  out.bracket_lo = root.lo;
  out.bracket_hi = root.hi;
  return out;
}

tikhonov::RegularizedSolution regularize_dp(const linop::SingularSystem& S, const Vector& f_delta,
                                            double delta, const DPConfig& config) {
  const DPResult root = solve_dp(S, f_delta, delta, config);
  return tikhonov::solve(S, f_delta, root.a);
}

}  // namespace discrepancy
}  // namespace regdp
