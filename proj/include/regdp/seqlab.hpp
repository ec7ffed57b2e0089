#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "regdp/summation.hpp"

namespace regdp {
namespace seqlab {

// How sums beyond the explicit range are treated. integral_sandwich brackets
// the tail between two integrals of the continuous analog and works with the
// default exponents only; drop truncates at the model's cap and ignores the
// tail entirely.
enum class TailMode { integral_sandwich, drop };

// Diagonal self-adjoint sequence-space operator with power-law spectrum.
// The operator has eigenvalues lambda_j = j^{-q/2}, its square has
// eigenvalues mu_j = j^{-q}, and the data vector carries energies
// |f_j|^2 = j^{-r}. With the defaults (q = 1, r = 2) the data lies outside
// the operator's range while remaining square-summable.
struct PowerLawModel {
  double q = 1.0;
  double r = 2.0;
  std::int64_t truncation = 10'000'000;  // cap for explicit summation
  TailMode tail_mode = TailMode::integral_sandwich;

  void validate() const;
  bool has_default_exponents() const { return q == 1.0 && r == 2.0; }

  double eigenvalue(std::int64_t j) const;         // mu_j = j^{-q}
  double singular_value(std::int64_t j) const;     // lambda_j = j^{-q/2}
  double data_coefficient(std::int64_t j) const;   // f_j = j^{-r/2}
};

// Infinite coefficient vector with a closed-form rule on a prefix, a few
// pointwise overrides inside that prefix, and zeros beyond it.
struct SparsePrefixVector {
  std::function<double(std::int64_t)> rule;  // valid for 1 <= j <= J
  std::int64_t J = 0;
  std::map<std::int64_t, double> overrides;  // keys must lie in [1, J]

  double coeff(std::int64_t j) const;
  double norm() const;  // streaming compensated sum of squares
};

// Everything needed to audit one instance of the non-uniform-convergence
// construction. Residual-type fields (resid_32, resid_37) are upper
// endpoints of their tail enclosures and gap-type fields (norm_Tp, gap_38)
// are lower endpoints, so each recorded inequality is conservative; purely
// descriptive fields (dist, norm_v, norm_z) are enclosure midpoints.
struct BadPairCertificate {
  double delta = 0.0;
  double C = 1.0;
  double b = 0.5;
  double a = 0.0;              // discrepancy-equation root for this delta
  std::int64_t j_star = 0;     // index whose eigenvalue is nearest a
  std::int64_t J = 0;          // construction cutoff
  double norm_p = 0.0;         // perturbation norm, delta/2 by construction
  double norm_Tp = 0.0;        // filtered perturbation norm
  double tp_lower_bound = 0.0; // delta / (8 sqrt(a))
  double resid_32 = 0.0;       // data minus smoothed image minus perturbation
  double resid_37 = 0.0;       // data misfit of the competitor v
  double gap_38 = 0.0;         // filtered gap between data and image of v
  double gap_lower_bound = 0.0;  // delta / (16 sqrt(a))
  double dist = 0.0;           // distance from the regularized solution to v
  double norm_v = 0.0;
  double norm_z = 0.0;
};

// phi(a) = sum_j j^{-r} / (j^{-q} + a)^2, the series behind the model's
// discrepancy value. With default exponents the terms reduce to
// (1 + a j)^{-2}. The enclosure form certifies a * phi(a) in (1 - a, 1).
double phi(const PowerLawModel& model, double a);
Enclosure phi_enclosure(const PowerLawModel& model, double a);

// Continuous analog of phi for the default exponents, integrated in closed
// form: psi(a) = 1/a - 1/(1+a), evaluated as 1/(a(1+a)) which is exact for
// dyadic a like 0.5.
double psi(double a);

// || f ||, the l2 norm of the data sequence, with certified tail bracket.
Enclosure data_norm_enclosure(const PowerLawModel& model);

// h(a) = a * sqrt(phi(a)): the model's discrepancy value. Strictly
// increasing in a; tends to || f || as a grows.
double dp_value_model(const PowerLawModel& model, double a);

// Root of h(a) = C * delta, found by the same monotone bracket-and-bisect
// search used for dense operators, accepted when h lands in
// [C delta, C delta (1 + 1e-9)].
double dp_root_model(const PowerLawModel& model, double delta, double C = 1.0);

// Index j minimizing |mu_j - a|; ties go to the smaller index.
std::int64_t nearest_eigenvalue_index(const PowerLawModel& model, double a);

// Partial sum of f_j^2 / mu_j: bounded iff the data is reachable by the
// operator. With defaults this is the harmonic series, so the value grows
// without bound and witnesses unreachable data.
double range_divergence_proxy(const PowerLawModel& model, std::int64_t upto);

// Construct and audit the competitor pair for one delta: solves the
// discrepancy equation, places a perturbation of norm delta/2 at the
// eigenvalue nearest the root, builds the smooth competitor v, and records
// every certificate quantity by streaming summation.
BadPairCertificate build_bad_pair(const PowerLawModel& model, double delta, double C, double b);

// build_bad_pair over a strictly decreasing delta sweep, evaluated in
// parallel; output order follows input order.
std::vector<BadPairCertificate> nonuniformity_sweep(const PowerLawModel& model,
                                                    const std::vector<double>& deltas, double C,
                                                    double b);

}  // namespace seqlab
}  // namespace regdp
