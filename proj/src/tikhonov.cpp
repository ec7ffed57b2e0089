#include "regdp/tikhonov.hpp"

#include <cmath>

namespace regdp {
namespace tikhonov {

namespace {

void require_positive(double a, const char* name) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw NonpositiveParameter(std::string(name) + " must be positive and finite");
  }
}

void check_data(const linop::SingularSystem& S, const Vector& f_delta) {
  if (f_delta.size() != S.rows()) throw DimensionMismatch("data length does not match operator");
  if (!f_delta.allFinite()) throw InvalidValue("data has non-finite entries");
}

}  // namespace

RegularizedSolution solve(const linop::SingularSystem& S, const Vector& f_delta, double a) {
  require_positive(a, "regularization parameter");
  check_data(S, f_delta);

  const Vector beta = S.left.transpose() * f_delta;
  Vector coeff(S.sigma.size());
  double resid_sq = 0.0;
  for (Eigen::Index j = 0; j < S.sigma.size(); ++j) {
    const double s = S.sigma[j];
    coeff[j] = s * beta[j] / (s * s + a);
    const double miss = a * beta[j] / (s * s + a);  // sigma*coeff - beta, sign dropped
    resid_sq += miss * miss;
  }
  // Data components outside the span of the left vectors are unreachable by
  // any u; they enter the residual as-is. Clamp the cancellation at zero.
  resid_sq += std::max(0.0, f_delta.squaredNorm() - beta.squaredNorm());

  RegularizedSolution out;
  out.a = a;
  out.u = S.right * coeff;
  out.solution_norm = coeff.norm();
  out.residual_norm = std::sqrt(resid_sq);
  out.functional_value = resid_sq + a * out.solution_norm * out.solution_norm;
  return out;
}

double functional_value(const linop::SingularSystem& S, const Vector& f_delta, double a,
                        const Vector& u) {
  require_positive(a, "regularization parameter");
  check_data(S, f_delta);
  if (u.size() != S.cols()) throw DimensionMismatch("candidate length does not match operator");
  if (!u.allFinite()) throw InvalidValue("candidate has non-finite entries");

  const Vector beta = S.left.transpose() * f_delta;
  const Vector d = S.right.transpose() * u;
  double resid_sq = 0.0;
  for (Eigen::Index j = 0; j < S.sigma.size(); ++j) {
    const double miss = S.sigma[j] * d[j] - beta[j];
    resid_sq += miss * miss;
  }
  resid_sq += std::max(0.0, f_delta.squaredNorm() - beta.squaredNorm());
  return resid_sq + a * u.squaredNorm();
}

double filter_factor(double sigma, double a) {
  require_positive(a, "regularization parameter");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw InvalidValue("sigma must be finite and nonnegative");
  }
  return sigma / (sigma * sigma + a);
}

double filter_operator_norm(double a) {
  require_positive(a, "regularization parameter");
  return 1.0 / (2.0 * std::sqrt(a));
}

double saturation_norm(double a, double b, double s_max) {
  require_positive(a, "regularization parameter");
  require_positive(s_max, "spectrum bound");
  if (!(b > 0.0 && b < 1.0)) throw ParameterOutOfRange("exponent b must lie in (0, 1)");

  const double s_star = a * b / (1.0 - b);
  if (s_star <= s_max) {
    const double c = std::pow(b, b) * std::pow(1.0 - b, 1.0 - b);
    return c * std::pow(a, b);
  }
  // The map s -> a s^b/(s+a) increases up to s_star, so a short spectrum
  // saturates at the endpoint instead.
  return a * std::pow(s_max, b) / (s_max + a);
}

}  // namespace tikhonov
}  // namespace regdp
