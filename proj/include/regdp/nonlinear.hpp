#pragma once

#include <cstdint>
#include <functional>

#include "regdp/linop.hpp"

namespace regdp {
namespace nonlinear {

// Uniform grid on [0, 1] with n nodes.
struct Grid1D {
  int n = 64;

  void validate() const;
  double spacing() const { return 1.0 / (n - 1); }
  double node(int i) const { return static_cast<double>(i) * spacing(); }
};

// Grid function measured in the trapezoid L2 norm and the discrete
// first-order Sobolev norm built from forward differences.
struct SobolevVector {
  Grid1D grid;
  Vector values;
};

SobolevVector zeros(const Grid1D& grid);
SobolevVector sample(const Grid1D& grid, const std::function<double(double)>& f);

double l2_norm(const SobolevVector& u);
double h1_norm(const SobolevVector& u);

enum class ForwardKind { volterra_cubic, custom };

// Forward map of the model problem. volterra_cubic sends u to the cumulative
// trapezoid integral of u + u^3, a continuous injective map whose inverse
// loses a derivative; custom lets tests plug in any grid-to-grid map.
struct ForwardMapSpec {
  ForwardKind kind = ForwardKind::volterra_cubic;
  std::function<Vector(const Grid1D&, const Vector&)> custom;
};

SobolevVector apply_forward(const ForwardMapSpec& map, const SobolevVector& u);

// F(u) = ||A(u) - f_delta|| + delta * ||u||_1 with NORMS, not squares: the
// penalty weight is the noise level itself.
double penalized_value(const ForwardMapSpec& map, const SobolevVector& u,
                       const SobolevVector& f_delta, double delta);

// Smooth companion G(u) = ||A(u) - f_delta||^2 + delta^2 ||u||_1^2 used to
// drive the search; F <= sqrt(2 G), so pushing G below target^2 / 2
// certifies the nonsmooth objective. Analytic gradient for volterra_cubic.
double surrogate_value(const ForwardMapSpec& map, const SobolevVector& u,
                       const SobolevVector& f_delta, double delta);
Vector surrogate_gradient(const ForwardMapSpec& map, const SobolevVector& u,
                          const SobolevVector& f_delta, double delta);

struct QuasiMinResult {
  SobolevVector u;
  double F_value = 0.0;
  double target = 0.0;
  std::int64_t evaluations = 0;
  bool met_target = false;  // when false the fields carry the best iterate found
};

// Descend the smooth surrogate from u = 0 (spectral-step gradient descent
// with backtracking) until the true penalized value drops to the target or
// the evaluation budget runs out. Every surrogate or gradient evaluation
// counts one unit of budget. Deterministic for fixed inputs.
QuasiMinResult quasi_minimize(const ForwardMapSpec& map, const SobolevVector& f_delta,
                              double delta, double target, std::int64_t budget = 100'000);

}  // namespace nonlinear
}  // namespace regdp
