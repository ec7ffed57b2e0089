#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "regdp/nonlinear.hpp"
#include "test_util.hpp"

using namespace regdp;
using namespace regdp::nonlinear;
using testutil::random_vector;
using testutil::uniform;

namespace {

constexpr double kPi = std::numbers::pi;

Grid1D grid_of(int n) { return Grid1D{n}; }

SobolevVector vec_of(int n, const Vector& v) { return SobolevVector{grid_of(n), v}; }

ForwardMapSpec builtin_map() { return ForwardMapSpec{}; }

// Deterministic unit-norm perturbation direction, rough enough to hit both
// signs but fixed so every run sees the same data.
SobolevVector noise_direction(const Grid1D& g) {
  SobolevVector e = sample(g, [](double x) { return std::cos(3.0 * kPi * x) + 0.3; });
  e.values /= l2_norm(e);
  return e;
}

}  // namespace

TEST_CASE("grid: validation and geometry") {
  CHECK_THROWS_AS(grid_of(1).validate(), ParameterOutOfRange);
  CHECK_THROWS_AS(zeros(grid_of(0)), ParameterOutOfRange);

  const Grid1D g = grid_of(5);
  CHECK(g.spacing() == doctest::Approx(0.25));
  CHECK(g.node(0) == 0.0);
  CHECK(g.node(2) == doctest::Approx(0.5));
  CHECK(g.node(4) == doctest::Approx(1.0));

  const SobolevVector z = zeros(g);
  CHECK(z.values.size() == 5);
  CHECK(z.values.norm() == 0.0);

  const SobolevVector s = sample(g, [](double x) { return x * x; });
  CHECK(s.values[2] == doctest::Approx(0.25));
  CHECK_THROWS_AS(sample(g, std::function<double(double)>{}), InvalidValue);
}

TEST_CASE("norms: constants and linear ramp") {
  const Grid1D g = grid_of(64);

  SobolevVector one = sample(g, [](double) { return 1.0; });
  CHECK(l2_norm(one) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(h1_norm(one) == doctest::Approx(1.0).epsilon(1e-14));

  CHECK(l2_norm(zeros(g)) == 0.0);
  CHECK(h1_norm(zeros(g)) == 0.0);

  // Ramp x has unit derivative energy and trapezoid mass 1/3 + h^2/6, a hair
  // above the continuum value sqrt(4/3) = 1.1547.
  SobolevVector ramp = sample(g, [](double x) { return x; });
  CHECK(h1_norm(ramp) == doctest::Approx(std::sqrt(4.0 / 3.0)).epsilon(1e-3));
  CHECK(h1_norm(ramp) > std::sqrt(4.0 / 3.0));

  // Half sine: mass exactly 1/2 on this grid, derivative energy a shade
  // under pi^2 / 2.
  SobolevVector half_sine = sample(g, [](double x) { return std::sin(kPi * x); });
  CHECK(h1_norm(half_sine) == doctest::Approx(2.331).epsilon(2e-3));
  CHECK(l2_norm(half_sine) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
}

TEST_CASE("norms: h1 dominates l2 and validation fires") {
  std::mt19937_64 rng(401);
  for (int t = 0; t < 20; ++t) {
    const int n = 2 + static_cast<int>(uniform(rng, 0.0, 40.0));
    SobolevVector u = vec_of(n, random_vector(rng, n));
    CHECK(h1_norm(u) >= l2_norm(u));
  }

  SobolevVector bad{grid_of(8), Vector::Zero(5)};
  CHECK_THROWS_AS(h1_norm(bad), DimensionMismatch);
  Vector v = Vector::Zero(8);
  v[3] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(l2_norm(vec_of(8, v)), InvalidValue);
}

TEST_CASE("apply_forward: cumulative integral examples") {
  const Grid1D g = grid_of(64);
  const ForwardMapSpec map = builtin_map();

  const SobolevVector zero_image = apply_forward(map, zeros(g));
  CHECK(zero_image.values.norm() == 0.0);

  // u = 1 integrates the constant 2, so the image is the ramp 2x exactly
  // (the trapezoid rule is exact on constants).
  const SobolevVector one_image = apply_forward(map, sample(g, [](double) { return 1.0; }));
  for (int i = 0; i < g.n; ++i) {
    CHECK(one_image.values[i] == doctest::Approx(2.0 * g.node(i)).epsilon(1e-12));
  }

  // u = x: the image at the right endpoint approximates 1/2 + 1/4.
  const SobolevVector ramp_image = apply_forward(map, sample(g, [](double x) { return x; }));
  CHECK(ramp_image.values[0] == 0.0);
  CHECK(ramp_image.values[g.n - 1] == doctest::Approx(0.75).epsilon(2e-3));

  // Nondecreasing image for a nonnegative integrand.
  for (int i = 0; i + 1 < g.n; ++i) {
    CHECK(ramp_image.values[i] <= ramp_image.values[i + 1]);
  }
}

TEST_CASE("apply_forward: custom maps and their contracts") {
  const Grid1D g = grid_of(10);
  SobolevVector u = sample(g, [](double x) { return 1.0 - x; });

  ForwardMapSpec ident;
  ident.kind = ForwardKind::custom;
  ident.custom = [](const Grid1D&, const Vector& v) { return v; };
  CHECK((apply_forward(ident, u).values - u.values).norm() == 0.0);

  ForwardMapSpec empty;
  empty.kind = ForwardKind::custom;
  CHECK_THROWS_AS(apply_forward(empty, u), InvalidValue);

  ForwardMapSpec shrinks;
  shrinks.kind = ForwardKind::custom;
  shrinks.custom = [](const Grid1D&, const Vector& v) { return Vector(v.head(3)); };
  CHECK_THROWS_AS(apply_forward(shrinks, u), DimensionMismatch);
}

TEST_CASE("apply_forward: distinct inputs give distinct images") {
  const Grid1D g = grid_of(32);
  const ForwardMapSpec map = builtin_map();
  std::mt19937_64 rng(402);
  for (int t = 0; t < 100; ++t) {
    SobolevVector u = vec_of(g.n, random_vector(rng, g.n, -2.0, 2.0));
    SobolevVector w = vec_of(g.n, random_vector(rng, g.n, -2.0, 2.0));
    const SobolevVector Au = apply_forward(map, u);
    const SobolevVector Aw = apply_forward(map, w);
    SobolevVector diff = vec_of(g.n, Vector(Au.values - Aw.values));
    const double scale = std::max(l2_norm(Au), l2_norm(Aw));
    CHECK(l2_norm(diff) > 1e-14 * scale);
  }
}

TEST_CASE("penalized_value: closed forms and part domination") {
  const Grid1D g = grid_of(48);
  const ForwardMapSpec map = builtin_map();
  const SobolevVector zero = zeros(g);

  CHECK(penalized_value(map, zero, zero, 0.3) == 0.0);

  const SobolevVector f = sample(g, [](double x) { return 0.5 * x; });
  CHECK(penalized_value(map, zero, f, 0.3) == doctest::Approx(l2_norm(f)).epsilon(1e-14));

  // At the true source with exact-size noise the value is delta (1 + ||y||_1).
  const SobolevVector y = sample(g, [](double x) { return std::sin(kPi * x); });
  const double delta = 5e-2;
  SobolevVector fd = apply_forward(map, y);
  fd.values += delta * noise_direction(g).values;
  CHECK(penalized_value(map, y, fd, delta) ==
        doctest::Approx(delta * (1.0 + h1_norm(y))).epsilon(1e-12));

  // Both halves are dominated by the sum.
  std::mt19937_64 rng(403);
  for (int t = 0; t < 10; ++t) {
    SobolevVector u = vec_of(g.n, random_vector(rng, g.n));
    const double F = penalized_value(map, u, fd, delta);
    SobolevVector resid = vec_of(g.n, Vector(apply_forward(map, u).values - fd.values));
    CHECK(F >= l2_norm(resid) - 1e-15);
    CHECK(F >= delta * h1_norm(u) - 1e-15);
  }

  CHECK_THROWS_AS(penalized_value(map, zero, f, 0.0), NonpositiveParameter);
  CHECK_THROWS_AS(penalized_value(map, zero, f, -1.0), NonpositiveParameter);
  CHECK_THROWS_AS(penalized_value(map, zeros(grid_of(8)), f, 0.3), DimensionMismatch);
}

TEST_CASE("surrogate: squares the parts and bounds the objective") {
  const Grid1D g = grid_of(40);
  const ForwardMapSpec map = builtin_map();
  const SobolevVector f = sample(g, [](double x) { return x * (1.0 - x); });
  std::mt19937_64 rng(404);
  for (int t = 0; t < 10; ++t) {
    SobolevVector u = vec_of(g.n, random_vector(rng, g.n));
    const double delta = uniform(rng, 1e-3, 1e-1);
    const double G = surrogate_value(map, u, f, delta);
    const double F = penalized_value(map, u, f, delta);
    CHECK(F * F <= 2.0 * G * (1.0 + 1e-14));
    CHECK(G <= F * F * (1.0 + 1e-14));
  }
}

TEST_CASE("surrogate_gradient: matches central differences") {
  const Grid1D g = grid_of(16);
  const ForwardMapSpec map = builtin_map();
  std::mt19937_64 rng(405);
  const SobolevVector f = vec_of(g.n, random_vector(rng, g.n));
  const double delta = 3e-2;

  SobolevVector u = vec_of(g.n, random_vector(rng, g.n));
  const Vector grad = surrogate_gradient(map, u, f, delta);

  const double eps = 1e-6;
  for (int t = 0; t < 10; ++t) {
    const int k = static_cast<int>(uniform(rng, 0.0, double(g.n))) % g.n;
    SobolevVector up = u, dn = u;
    up.values[k] += eps;
    dn.values[k] -= eps;
    const double fd =
        (surrogate_value(map, up, f, delta) - surrogate_value(map, dn, f, delta)) / (2.0 * eps);
    CHECK(std::abs(fd - grad[k]) <= 1e-6 * std::max(1.0, std::abs(grad[k])));
  }

  ForwardMapSpec ident;
  ident.kind = ForwardKind::custom;
  ident.custom = [](const Grid1D&, const Vector& v) { return v; };
  CHECK_THROWS_AS(surrogate_gradient(ident, u, f, delta), InvalidValue);
}

TEST_CASE("quasi_minimize: trivial data is solved at the starting point") {
  const Grid1D g = grid_of(32);
  const QuasiMinResult res = quasi_minimize(builtin_map(), zeros(g), 1e-2, 1e-2);
  CHECK(res.met_target);
  CHECK(res.F_value == 0.0);
  CHECK(res.evaluations == 1);
  CHECK(res.u.values.norm() == 0.0);
}

TEST_CASE("quasi_minimize: budget of one reports the start as best effort") {
  const Grid1D g = grid_of(32);
  const SobolevVector f = sample(g, [](double x) { return 2.0 * x; });
  const QuasiMinResult res = quasi_minimize(builtin_map(), f, 1e-2, 1e-3, 1);
  CHECK_FALSE(res.met_target);
  CHECK(res.evaluations == 1);
  CHECK(res.F_value == doctest::Approx(l2_norm(f)).epsilon(1e-14));
  CHECK(res.u.values.norm() == 0.0);
  CHECK(res.target == 1e-3);
}

TEST_CASE("quasi_minimize: recovers the half sine within the noise target") {
  const Grid1D g = grid_of(64);
  const ForwardMapSpec map = builtin_map();
  const SobolevVector y = sample(g, [](double x) { return std::sin(kPi * x); });
  const double y_h1 = h1_norm(y);
  const SobolevVector clean = apply_forward(map, y);

  SobolevVector best_err = zeros(g);
  double err_coarse = 0.0, err_fine = 0.0;
  for (double delta : {1e-1, 1e-2, 1e-3}) {
    SobolevVector fd = clean;
    fd.values += delta * noise_direction(g).values;
    const double target = (2.0 + y_h1) * delta;

    const QuasiMinResult res = quasi_minimize(map, fd, delta, target);
    CHECK(res.met_target);
    CHECK(res.F_value <= target);

    // Independent re-evaluation certifies the reported objective.
    CHECK(penalized_value(map, res.u, fd, delta) == doctest::Approx(res.F_value).epsilon(1e-12));

    // The penalty term alone caps the Sobolev norm of any accepted iterate.
    CHECK(h1_norm(res.u) <= 2.0 + y_h1 + 1e-8);

    best_err = vec_of(g.n, Vector(res.u.values - y.values));
    if (delta == 1e-1) err_coarse = l2_norm(best_err);
    if (delta == 1e-3) err_fine = l2_norm(best_err);
  }
  CHECK(err_fine < err_coarse);
  CHECK(err_coarse < 1.0);
}

TEST_CASE("quasi_minimize: deterministic and validates its inputs") {
  const Grid1D g = grid_of(24);
  SobolevVector fd = apply_forward(builtin_map(), sample(g, [](double x) { return x; }));
  fd.values += 1e-2 * noise_direction(g).values;

  const QuasiMinResult a = quasi_minimize(builtin_map(), fd, 1e-2, 5e-2);
  const QuasiMinResult b = quasi_minimize(builtin_map(), fd, 1e-2, 5e-2);
  CHECK(a.F_value == b.F_value);
  CHECK(a.evaluations == b.evaluations);
  CHECK((a.u.values - b.u.values).norm() == 0.0);

  CHECK_THROWS_AS(quasi_minimize(builtin_map(), fd, 0.0, 1e-2), NonpositiveParameter);
  CHECK_THROWS_AS(quasi_minimize(builtin_map(), fd, 1e-2, 0.0), NonpositiveParameter);
  CHECK_THROWS_AS(quasi_minimize(builtin_map(), fd, 1e-2, 1e-2, 0), ParameterOutOfRange);
  ForwardMapSpec ident;
  ident.kind = ForwardKind::custom;
  ident.custom = [](const Grid1D&, const Vector& v) { return v; };
  CHECK_THROWS_AS(quasi_minimize(ident, fd, 1e-2, 1e-2), InvalidValue);
}
