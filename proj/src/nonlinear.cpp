#include "regdp/nonlinear.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace regdp {
namespace nonlinear {

namespace {

void check_vector(const SobolevVector& u, const char* name) {
  u.grid.validate();
  if (u.values.size() != u.grid.n) {
    throw DimensionMismatch(std::string(name) + " length does not match its grid");
  }
  if (!u.values.allFinite()) {
    throw InvalidValue(std::string(name) + " has non-finite entries");
  }
}

void check_pair(const SobolevVector& u, const SobolevVector& f_delta) {
  check_vector(u, "candidate");
  check_vector(f_delta, "data");
  if (u.grid.n != f_delta.grid.n) {
    throw DimensionMismatch("candidate and data live on different grids");
  }
}

void require_positive(double x, const char* name) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw NonpositiveParameter(std::string(name) + " must be positive and finite");
  }
}

double trapezoid_weight(const Grid1D& grid, int i) {
  const double h = grid.spacing();
  return (i == 0 || i == grid.n - 1) ? 0.5 * h : h;
}

// Cumulative trapezoid integral of u + u^3 from the left endpoint. The first
// output is zero by construction, so the map is never surjective onto
// arbitrary data and injectivity comes from monotone integrands.
Vector volterra_cubic(const Grid1D& grid, const Vector& u) {
  const double h = grid.spacing();
  Vector w(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) w[i] = u[i] + u[i] * u[i] * u[i];
  Vector out(u.size());
  out[0] = 0.0;
  for (Eigen::Index i = 1; i < u.size(); ++i) {
    out[i] = out[i - 1] + 0.5 * h * (w[i - 1] + w[i]);
  }
  return out;
}

// Adjoint of the cumulative trapezoid matrix C applied to s. Row k of C
// weights w_0..w_k by h*(1/2, 1, ..., 1, 1/2), so column i collects h/2 of
// s_i plus everything strictly below: suffix sums give it in one pass.
Vector cumulative_adjoint(const Grid1D& grid, const Vector& s) {
  const double h = grid.spacing();
  const Eigen::Index n = s.size();
  Vector suffix(n + 1);
  suffix[n] = 0.0;
  for (Eigen::Index k = n - 1; k >= 0; --k) suffix[k] = suffix[k + 1] + s[k];
  Vector out(n);
  out[0] = 0.5 * h * suffix[1];
  for (Eigen::Index i = 1; i < n; ++i) out[i] = h * (0.5 * s[i] + suffix[i + 1]);
  return out;
}

struct SurrogateParts {
  double residual_sq = 0.0;  // trapezoid norm of A(u) - f_delta, squared
  double penalty_sq = 0.0;   // squared Sobolev norm of u
  double value(double delta) const { return residual_sq + delta * delta * penalty_sq; }
  double true_objective(double delta) const {
    return std::sqrt(residual_sq) + delta * std::sqrt(penalty_sq);
  }
};

double sobolev_sq(const SobolevVector& u) {
  const double h = u.grid.spacing();
  double mass = 0.0;
  for (int i = 0; i < u.grid.n; ++i) {
    mass += trapezoid_weight(u.grid, i) * u.values[i] * u.values[i];
  }
  double grad = 0.0;
  for (int i = 0; i + 1 < u.grid.n; ++i) {
    const double d = (u.values[i + 1] - u.values[i]) / h;
    grad += h * d * d;
  }
  return mass + grad;
}

SurrogateParts surrogate_parts(const ForwardMapSpec& map, const SobolevVector& u,
                               const SobolevVector& f_delta) {
  const SobolevVector Au = apply_forward(map, u);
  SurrogateParts parts;
  for (int i = 0; i < u.grid.n; ++i) {
    const double r = Au.values[i] - f_delta.values[i];
    parts.residual_sq += trapezoid_weight(u.grid, i) * r * r;
  }
  parts.penalty_sq = sobolev_sq(u);
  return parts;
}

}  // namespace

void Grid1D::validate() const {
  if (n < 2) throw ParameterOutOfRange("grid needs at least two nodes");
}

SobolevVector zeros(const Grid1D& grid) {
  grid.validate();
  return SobolevVector{grid, Vector::Zero(grid.n)};
}

SobolevVector sample(const Grid1D& grid, const std::function<double(double)>& f) {
  grid.validate();
  if (!f) throw InvalidValue("sample needs a callable");
  Vector v(grid.n);
  for (int i = 0; i < grid.n; ++i) v[i] = f(grid.node(i));
  SobolevVector out{grid, std::move(v)};
  check_vector(out, "sampled function");
  return out;
}

double l2_norm(const SobolevVector& u) {
  check_vector(u, "argument");
  double sq = 0.0;
  for (int i = 0; i < u.grid.n; ++i) {
    sq += trapezoid_weight(u.grid, i) * u.values[i] * u.values[i];
  }
  return std::sqrt(sq);
}

double h1_norm(const SobolevVector& u) {
  check_vector(u, "argument");
  return std::sqrt(sobolev_sq(u));
}

SobolevVector apply_forward(const ForwardMapSpec& map, const SobolevVector& u) {
  check_vector(u, "argument");
  if (map.kind == ForwardKind::volterra_cubic) {
    return SobolevVector{u.grid, volterra_cubic(u.grid, u.values)};
  }
  if (!map.custom) throw InvalidValue("custom forward map has no callable");
  Vector out = map.custom(u.grid, u.values);
  if (out.size() != u.grid.n) {
    throw DimensionMismatch("custom forward map changed the grid size");
  }
  if (!out.allFinite()) throw InvalidValue("custom forward map produced non-finite values");
  return SobolevVector{u.grid, std::move(out)};
}

double penalized_value(const ForwardMapSpec& map, const SobolevVector& u,
                       const SobolevVector& f_delta, double delta) {
  check_pair(u, f_delta);
  require_positive(delta, "noise level");
  return surrogate_parts(map, u, f_delta).true_objective(delta);
}

double surrogate_value(const ForwardMapSpec& map, const SobolevVector& u,
                       const SobolevVector& f_delta, double delta) {
  check_pair(u, f_delta);
  require_positive(delta, "noise level");
  return surrogate_parts(map, u, f_delta).value(delta);
}

Vector surrogate_gradient(const ForwardMapSpec& map, const SobolevVector& u,
                          const SobolevVector& f_delta, double delta) {
  check_pair(u, f_delta);
  require_positive(delta, "noise level");
  if (map.kind != ForwardKind::volterra_cubic) {
    throw InvalidValue("analytic gradient is only available for the built-in forward map");
  }

  const Grid1D& grid = u.grid;
  const double h = grid.spacing();
  const SobolevVector Au = apply_forward(map, u);

  // Residual half: A = C o W with W(u) = u + u^3 acting pointwise, so the
  // chain rule gives grad = 2 W'(u) .* C^T M (A(u) - f).
  Vector weighted(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    weighted[i] = trapezoid_weight(grid, i) * (Au.values[i] - f_delta.values[i]);
  }
  const Vector back = cumulative_adjoint(grid, weighted);
  Vector g(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    g[i] = 2.0 * (1.0 + 3.0 * u.values[i] * u.values[i]) * back[i];
  }

  // Penalty half: mass term differentiates to 2 M u; the forward-difference
  // energy h * sum d_i^2 contributes 2 (d_{k-1} - d_k) at node k with the
  // out-of-range differences taken as zero.
  for (int k = 0; k < grid.n; ++k) {
    const double d_prev = (k > 0) ? (u.values[k] - u.values[k - 1]) / h : 0.0;
    const double d_next = (k + 1 < grid.n) ? (u.values[k + 1] - u.values[k]) / h : 0.0;
    g[k] += 2.0 * delta * delta *
            (trapezoid_weight(grid, k) * u.values[k] + (d_prev - d_next));
  }
  return g;
}

QuasiMinResult quasi_minimize(const ForwardMapSpec& map, const SobolevVector& f_delta,
                              double delta, double target, std::int64_t budget) {
  check_vector(f_delta, "data");
  require_positive(delta, "noise level");
  require_positive(target, "target");
  if (budget < 1) throw ParameterOutOfRange("evaluation budget must be at least 1");
  if (map.kind != ForwardKind::volterra_cubic) {
    throw InvalidValue("quasi_minimize needs the analytic gradient of the built-in map");
  }

  QuasiMinResult res;
  res.target = target;
  res.u = zeros(f_delta.grid);
  res.met_target = false;

  std::int64_t evals = 0;
  auto spent = [&] { res.evaluations = evals; };

  SobolevVector u = zeros(f_delta.grid);
  SurrogateParts parts = surrogate_parts(map, u, f_delta);
  ++evals;
  res.F_value = parts.true_objective(delta);
  res.u = u;
  if (res.F_value <= target) {
    res.met_target = true;
    spent();
    return res;
  }

  Vector g, prev_g;
  SobolevVector prev_u = u;
  bool have_prev = false;

  while (evals < budget) {
    g = surrogate_gradient(map, u, f_delta, delta);
    ++evals;

    double gnorm_sq = g.squaredNorm();
    if (!(gnorm_sq > 0.0)) break;  // stationary point of the surrogate

    // Spectral (Barzilai-Borwein) step from the last displacement; falls
    // back to a conservative scale on the first pass or a negative pairing.
    double step = 1.0 / (1.0 + std::sqrt(gnorm_sq));
    if (have_prev) {
      const Vector s = u.values - prev_u.values;
      const Vector y = g - prev_g;
      const double sy = s.dot(y);
      if (std::isfinite(sy) && sy > 0.0) step = s.squaredNorm() / sy;
      if (!(step > 0.0) || !std::isfinite(step)) step = 1.0 / (1.0 + std::sqrt(gnorm_sq));
    }
    prev_u = u;
    prev_g = g;
    have_prev = true;

    // Backtrack until the surrogate drops by the Armijo margin.
    const double G0 = parts.value(delta);
    bool accepted = false;
    SurrogateParts trial_parts;
    SobolevVector trial{u.grid, Vector()};
    for (int half = 0; half < 40 && evals < budget; ++half) {
      trial.values = u.values - step * g;
      trial_parts = surrogate_parts(map, trial, f_delta);
      ++evals;
      const double G1 = trial_parts.value(delta);
      if (std::isfinite(G1) && G1 <= G0 - 1e-4 * step * gnorm_sq) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // either out of budget or the descent has stalled

    u = trial;
    parts = trial_parts;
    const double F = parts.true_objective(delta);
    if (F < res.F_value) {
      res.F_value = F;
      res.u = u;
    }
    if (F <= target) {
      res.F_value = F;
      res.u = u;
      res.met_target = true;
      break;
    }
  }

  spent();
  return res;
}

}  // namespace nonlinear
}  // namespace regdp
