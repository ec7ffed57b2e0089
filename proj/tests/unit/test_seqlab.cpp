#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "regdp/errors.hpp"
#include "regdp/seqlab.hpp"
#include "regdp/tikhonov.hpp"

namespace seqlab = regdp::seqlab;
using regdp::Enclosure;
using seqlab::PowerLawModel;
using seqlab::TailMode;

namespace {

PowerLawModel drop_model(double q, double r, std::int64_t cap) {
  PowerLawModel m;
  m.q = q;
  m.r = r;
  m.truncation = cap;
  m.tail_mode = TailMode::drop;
  return m;
}

}  // namespace

TEST_CASE("seqlab: model validation") {
  PowerLawModel m;
  m.q = 0.0;
  CHECK_THROWS_AS(seqlab::phi(m, 1.0), regdp::ParameterOutOfRange);
  m = {};
  m.r = 1.0;
  CHECK_THROWS_AS(seqlab::phi(m, 1.0), regdp::ParameterOutOfRange);
  m = {};
  m.truncation = 0;
  CHECK_THROWS_AS(seqlab::phi(m, 1.0), regdp::ParameterOutOfRange);
  m = {};
  CHECK_THROWS_AS(seqlab::phi(m, 0.0), regdp::NonpositiveParameter);
  CHECK_THROWS_AS(seqlab::phi(m, -1.0), regdp::NonpositiveParameter);
  // Sandwich tails are closed-form only for the default exponents.
  m = {};
  m.q = 1.5;
  CHECK_THROWS_AS(seqlab::phi(m, 1.0), regdp::ParameterOutOfRange);
  // Drop mode needs the cap to reach well past the curvature scale 1/a.
  const auto d = drop_model(1.0, 2.0, 1000);
  CHECK_THROWS_AS(seqlab::phi(d, 1e-4), regdp::TruncationInsufficient);
}

TEST_CASE("seqlab: phi at a = 1 matches the shifted basel sum") {
  PowerLawModel m;
  const double expected = std::numbers::pi * std::numbers::pi / 6.0 - 1.0;
  CHECK(seqlab::phi(m, 1.0) == doctest::Approx(expected).epsilon(1e-9));
  const Enclosure enc = seqlab::phi_enclosure(m, 1.0);
  CHECK(enc.lo <= expected);
  CHECK(expected <= enc.hi);
  CHECK(enc.hi - enc.lo <= 1e-12);
}

TEST_CASE("seqlab: dropped tail equals the closed-form bracket") {
  // Independent route: the sandwich midpoint minus the literal truncated sum
  // must land inside the closed-form integral bracket of the dropped tail.
  PowerLawModel full;
  const auto trunc = drop_model(1.0, 2.0, 1'000'000);
  const double a = 0.5;
  const double difference = seqlab::phi(full, a) - seqlab::phi(trunc, a);
  const double n = static_cast<double>(trunc.truncation);
  const double hi = 1.0 / (a * (1.0 + a * n));
  const double lo = 1.0 / (a * (1.0 + a * (n + 1.0)));
  CHECK(difference >= lo - 1e-12);
  CHECK(difference <= hi + 1e-12);
}

TEST_CASE("seqlab: psi closed form") {
  CHECK(seqlab::psi(0.5) == 4.0 / 3.0);  // exact: evaluated as 1/(a(1+a)) with dyadic a
  CHECK(seqlab::psi(1.0) == 0.5);
  CHECK(seqlab::psi(0.01) == doctest::Approx(100.0 - 1.0 / 1.01).epsilon(1e-14));
  CHECK_THROWS_AS(seqlab::psi(0.0), regdp::NonpositiveParameter);
  CHECK_THROWS_AS(seqlab::psi(-2.0), regdp::NonpositiveParameter);
}

TEST_CASE("seqlab: integral sandwich pins a * phi(a) into (1 - a, 1)") {
  PowerLawModel m;
  for (double a : {1e-1, 1e-2, 1e-3, 1e-4}) {
    CAPTURE(a);
    const Enclosure enc = seqlab::phi_enclosure(m, a);
    const double ps = seqlab::psi(a);
    // The series dominates its continuous analog, but only by the first term.
    CHECK(enc.lo > ps);
    const double first_term = 1.0 / ((1.0 + a) * (1.0 + a));
    CHECK(enc.hi - first_term < ps);
    // Consequence used by the root asymptotics.
    CHECK(a * enc.lo > 1.0 - a);
    CHECK(a * enc.hi < 1.0);
  }
}

TEST_CASE("seqlab: data norm matches the classical series value") {
  PowerLawModel m;
  const Enclosure norm = seqlab::data_norm_enclosure(m);
  const double expected = std::numbers::pi / std::sqrt(6.0);
  CHECK(norm.lo <= expected);
  CHECK(expected <= norm.hi);
  CHECK(norm.hi - norm.lo <= 1e-12);
}

TEST_CASE("seqlab: discrepancy value examples") {
  PowerLawModel m;
  CHECK(seqlab::dp_value_model(m, 1.0) ==
        doctest::Approx(std::sqrt(std::numbers::pi * std::numbers::pi / 6.0 - 1.0)).epsilon(1e-9));
  CHECK(seqlab::dp_value_model(m, 1e9) ==
        doctest::Approx(std::numbers::pi / std::sqrt(6.0)).epsilon(1e-6));
  const double h = seqlab::dp_value_model(m, 1e-4);
  CHECK(h >= 0.009999);
  CHECK(h <= 0.010000);
}

TEST_CASE("seqlab: discrepancy value is strictly increasing") {
  PowerLawModel m;
  m.truncation = 1'000'000;  // smaller cap: monotonicity is cap independent
  double prev = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double a = std::pow(10.0, -8.0 + 12.0 * i / 49.0);
    const double h = seqlab::dp_value_model(m, a);
    CHECK(h > prev);
    prev = h;
  }
}

TEST_CASE("seqlab: discrepancy root location and asymptotic ratio") {
  PowerLawModel m;
  const double a1 = seqlab::dp_root_model(m, 0.1, 1.0);
  CHECK(a1 >= 1.000e-2);
  CHECK(a1 <= 1.011e-2);
  const double h1 = seqlab::dp_value_model(m, a1);
  CHECK(h1 >= 0.1);
  CHECK(h1 <= 0.1 * (1.0 + 1e-9));

  const double a2 = seqlab::dp_root_model(m, 1e-2, 1.0);
  CHECK(a2 / 1e-4 >= 1.0);
  CHECK(a2 / 1e-4 <= 1.0002);

  const double a3 = seqlab::dp_root_model(m, 1e-2, 2.0);
  CHECK(a3 / 4e-4 >= 1.0);
  CHECK(a3 / 4e-4 <= 1.0005);
}

TEST_CASE("seqlab: discrepancy root determinism and errors") {
  PowerLawModel m;
  CHECK(seqlab::dp_root_model(m, 0.1, 1.0) == seqlab::dp_root_model(m, 0.1, 1.0));
  // Target at or above the data norm (about 1.2825) leaves no root.
  CHECK_THROWS_AS(seqlab::dp_root_model(m, 1.3, 1.0), regdp::NoRoot);
  CHECK_THROWS_AS(seqlab::dp_root_model(m, 0.65, 2.0), regdp::NoRoot);
  CHECK_THROWS_AS(seqlab::dp_root_model(m, 0.0, 1.0), regdp::NonpositiveParameter);
  CHECK_THROWS_AS(seqlab::dp_root_model(m, 0.1, 0.5), regdp::ParameterOutOfRange);
}

TEST_CASE("seqlab: drop mode supports general exponents end to end") {
  const auto m = drop_model(1.3, 2.5, 100'000);
  const double h_lo = seqlab::dp_value_model(m, 2e-3);
  const double h_hi = seqlab::dp_value_model(m, 2e-1);
  CHECK(h_lo > 0.0);
  CHECK(h_hi > h_lo);
  const double delta = 0.5 * h_hi;
  const double a = seqlab::dp_root_model(m, delta, 1.0);
  const double h = seqlab::dp_value_model(m, a);
  CHECK(h >= delta);
  CHECK(h <= delta * (1.0 + 1e-9));
}

TEST_CASE("seqlab: nearest eigenvalue index") {
  PowerLawModel m;
  // Exact midpoint between the first two eigenvalues: tie goes to the
  // smaller index (0.75 and both distances 0.25 are exact binary values).
  CHECK(seqlab::nearest_eigenvalue_index(m, 0.75) == 1);
  CHECK(seqlab::nearest_eigenvalue_index(m, 0.3) == 3);
  CHECK(seqlab::nearest_eigenvalue_index(m, 1.5) == 1);
  CHECK(seqlab::nearest_eigenvalue_index(m, 1e-3) == 1000);

  PowerLawModel q2;
  q2.q = 2.0;
  CHECK(seqlab::nearest_eigenvalue_index(q2, 0.2) == 2);

  PowerLawModel small;
  small.truncation = 1000;
  CHECK_THROWS_AS(seqlab::nearest_eigenvalue_index(small, 1e-7),
                  regdp::TruncationInsufficient);
  CHECK(seqlab::nearest_eigenvalue_index(small, 1e-3) == 1000);
}

TEST_CASE("seqlab: unreachable data witnessed by divergent partial sums") {
  PowerLawModel m;
  const double n = 1e6;
  const double harmonic = std::log(n) + 0.5772156649015329 + 1.0 / (2.0 * n);
  CHECK(seqlab::range_divergence_proxy(m, 1'000'000) ==
        doctest::Approx(harmonic).epsilon(1e-12));
  const double at_cap = seqlab::range_divergence_proxy(m, 10'000'000);
  CHECK(at_cap >= 10.0);
  CHECK(at_cap >= 0.9 * std::log(1e7));

  // Contrast: with faster data decay the same sum stays bounded.
  PowerLawModel reachable;
  reachable.r = 3.0;
  CHECK(seqlab::range_divergence_proxy(reachable, 1'000'000) < 2.0);
  CHECK_THROWS_AS(seqlab::range_divergence_proxy(m, 0), regdp::InvalidValue);
}

TEST_CASE("seqlab: sparse prefix vectors") {
  seqlab::SparsePrefixVector s;
  s.rule = [](std::int64_t j) { return j == 1 ? 3.0 : 4.0; };
  s.J = 2;
  CHECK(s.coeff(1) == 3.0);
  CHECK(s.coeff(2) == 4.0);
  CHECK(s.coeff(3) == 0.0);
  CHECK(s.norm() == doctest::Approx(5.0).epsilon(1e-15));
  CHECK_THROWS_AS(s.coeff(0), regdp::InvalidValue);

  s.overrides[1] = 0.0;
  CHECK(s.coeff(1) == 0.0);
  CHECK(s.norm() == doctest::Approx(4.0).epsilon(1e-15));

  s.overrides[5] = 1.0;  // outside the prefix
  CHECK_THROWS_AS(s.norm(), regdp::InvalidValue);
}

TEST_CASE("seqlab: certificate for delta = 0.1 matches the worked instance") {
  PowerLawModel m;
  const auto cert = seqlab::build_bad_pair(m, 0.1, 1.0, 0.5);

  CHECK(cert.a >= 1.00e-2);
  CHECK(cert.a <= 1.02e-2);
  CHECK(cert.j_star == 100);
  CHECK(cert.J == 6401);
  CHECK(cert.norm_p == 0.05);

  CHECK(cert.resid_32 <= 0.1 / 8.0);
  CHECK(cert.resid_32 >= 0.0124);
  CHECK(cert.resid_37 <= 0.1);
  CHECK(cert.resid_37 == doctest::Approx(0.051538).epsilon(1e-3));

  CHECK(cert.tp_lower_bound == doctest::Approx(0.1 / (8.0 * std::sqrt(cert.a))).epsilon(1e-15));
  CHECK(cert.gap_lower_bound >= 0.0619);
  CHECK(cert.gap_lower_bound <= 0.0625);
  CHECK(cert.norm_Tp >= cert.tp_lower_bound);
  CHECK(cert.norm_Tp == doctest::Approx(0.2494).epsilon(2e-3));
  CHECK(cert.gap_38 >= cert.gap_lower_bound);

  CHECK(cert.dist == doctest::Approx(1.8425).epsilon(5e-3));
  CHECK(cert.norm_v == doctest::Approx(3.081).epsilon(5e-3));
  CHECK(cert.norm_z == doctest::Approx(80.0999).epsilon(1e-4));
}

TEST_CASE("seqlab: certificate inequality chain") {
  // The gap bound is assembled from three separately checkable pieces: the
  // filtered perturbation is large, the filtered residual dust is small,
  // and their difference still clears the advertised lower bound.
  PowerLawModel m;
  for (double delta : {1e-1, 3e-2}) {
    CAPTURE(delta);
    const auto cert = seqlab::build_bad_pair(m, delta, 1.0, 0.5);
    const double filter_norm = regdp::tikhonov::filter_operator_norm(cert.a);
    CHECK(cert.norm_Tp >= cert.tp_lower_bound);
    CHECK(filter_norm * cert.resid_32 <= cert.gap_lower_bound);
    CHECK(cert.gap_38 >= cert.norm_Tp - cert.gap_lower_bound);
    CHECK(cert.norm_Tp - cert.gap_lower_bound >= cert.gap_lower_bound);
  }
}

TEST_CASE("seqlab: certificate construction errors") {
  PowerLawModel m;
  CHECK_THROWS_AS(seqlab::build_bad_pair(m, 0.1, 1.0, 0.0), regdp::ParameterOutOfRange);
  CHECK_THROWS_AS(seqlab::build_bad_pair(m, 0.1, 1.0, 1.0), regdp::ParameterOutOfRange);
  CHECK_THROWS_AS(seqlab::build_bad_pair(m, 0.1, 0.5, 0.5), regdp::ParameterOutOfRange);
  CHECK_THROWS_AS(seqlab::build_bad_pair(m, 0.0, 1.0, 0.5), regdp::NonpositiveParameter);
  // The cutoff grows like 64 / delta^2 and must stay within the cap.
  PowerLawModel small;
  small.truncation = 10'000;
  CHECK_THROWS_AS(seqlab::build_bad_pair(small, 1e-2, 1.0, 0.5),
                  regdp::TruncationInsufficient);
}

TEST_CASE("seqlab: sweep certificates keep the distance alive and grow the competitor") {
  PowerLawModel m;
  const std::vector<double> deltas{1e-1, 3e-2, 1e-2};
  const auto certs = seqlab::nonuniformity_sweep(m, deltas, 1.0, 0.5);
  REQUIRE(certs.size() == deltas.size());

  double min_dist = certs[0].dist, max_dist = certs[0].dist;
  for (size_t i = 0; i < certs.size(); ++i) {
    CAPTURE(i);
    const auto& c = certs[i];
    CHECK(c.delta == deltas[i]);
    CHECK(c.norm_p == deltas[i] / 2.0);
    CHECK(c.resid_32 <= deltas[i] / 8.0);
    CHECK(c.resid_37 <= deltas[i]);
    CHECK(c.norm_Tp >= c.tp_lower_bound);
    CHECK(c.gap_38 >= c.gap_lower_bound);
    min_dist = std::min(min_dist, c.dist);
    max_dist = std::max(max_dist, c.dist);
  }
  CHECK(min_dist >= 0.5 * max_dist);
  for (size_t i = 1; i < certs.size(); ++i) CHECK(certs[i].norm_v > certs[i - 1].norm_v);

  // A one-element sweep is just build_bad_pair.
  const auto single = seqlab::nonuniformity_sweep(m, {1e-1}, 1.0, 0.5);
  const auto direct = seqlab::build_bad_pair(m, 1e-1, 1.0, 0.5);
  CHECK(single[0].a == direct.a);
  CHECK(single[0].dist == direct.dist);
  CHECK(single[0].norm_z == direct.norm_z);

  CHECK_THROWS_AS(seqlab::nonuniformity_sweep(m, {}, 1.0, 0.5), regdp::InvalidPlan);
  CHECK_THROWS_AS(seqlab::nonuniformity_sweep(m, {1e-2, 1e-1}, 1.0, 0.5), regdp::InvalidPlan);
}
