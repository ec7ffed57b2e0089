#include "regdp/seqlab.hpp"

#include <algorithm>
#include <cmath>

#include "regdp/errors.hpp"
#include "regdp/parallel.hpp"
#include "regdp/rootfind.hpp"
#include "regdp/tikhonov.hpp"

namespace regdp {
namespace seqlab {

namespace {

constexpr double kRelWidthStop = 1e-13;  // adaptive stop for tail brackets
constexpr std::int64_t kCheckStride = 1024;

void require_positive(double a) {
  if (!(a > 0.0) || !std::isfinite(a))
    throw NonpositiveParameter("parameter must be positive and finite");
}

// Integral of (1 + a x)^{-2} from m to infinity: the tail bound for the
// default-exponent series.
double phi_tail_integral(double a, double m) { return 1.0 / (a * (1.0 + a * m)); }

// Default-exponent series sum with certified tail: terms (1 + a j)^{-2}.
// Stops once the tail bracket is relatively negligible or the cap is hit;
// the enclosure stays valid either way, it is just wider at the cap.
Enclosure phi_sandwich(const PowerLawModel& model, double a) {
  KahanAccumulator sum;
  const std::int64_t cap = model.truncation;
  for (std::int64_t j = 1;; ++j) {
    const double w = 1.0 + a * static_cast<double>(j);
    sum.add(1.0 / (w * w));
    if (j % kCheckStride == 0 || j == cap) {
      const double hi_tail = phi_tail_integral(a, static_cast<double>(j));
      const double lo_tail = phi_tail_integral(a, static_cast<double>(j + 1));
      const double lo = sum.value() + lo_tail;
      if (hi_tail - lo_tail <= kRelWidthStop * lo || j == cap)
        return make_enclosure(lo, sum.value() + hi_tail);
    }
  }
}

// Literal truncated sum of j^{-r} / (j^{-q} + a)^2, any exponents.
double phi_drop(const PowerLawModel& model, double a) {
  if (static_cast<double>(model.truncation) < 10.0 / a)
    throw TruncationInsufficient("truncation too small for this parameter in drop mode");
  KahanAccumulator sum;
  const bool defaults = model.has_default_exponents();
  for (std::int64_t j = 1; j <= model.truncation; ++j) {
    if (defaults) {
      const double w = 1.0 + a * static_cast<double>(j);
      sum.add(1.0 / (w * w));
    } else {
      const double x = static_cast<double>(j);
      const double den = std::pow(x, -model.q) + a;
      sum.add(std::pow(x, -model.r) / (den * den));
    }
  }
  return sum.value();
}

void require_sandwich_defaults(const PowerLawModel& model) {
  if (!model.has_default_exponents())
    throw ParameterOutOfRange(
        "integral sandwich tails are only available for the default exponents");
}

}  // namespace

void PowerLawModel::validate() const {
  if (!(q > 0.0) || !std::isfinite(q))
    throw ParameterOutOfRange("eigenvalue exponent must be positive");
  if (!(r > 1.0) || !std::isfinite(r))
    throw ParameterOutOfRange("data exponent must exceed 1");
  if (truncation < 1) throw ParameterOutOfRange("truncation must be a positive count");
}

double PowerLawModel::eigenvalue(std::int64_t j) const {
  const double x = static_cast<double>(j);
  return q == 1.0 ? 1.0 / x : std::pow(x, -q);
}

double PowerLawModel::singular_value(std::int64_t j) const {
  const double x = static_cast<double>(j);
  return q == 1.0 ? 1.0 / std::sqrt(x) : std::pow(x, -0.5 * q);
}

double PowerLawModel::data_coefficient(std::int64_t j) const {
  const double x = static_cast<double>(j);
  return r == 2.0 ? 1.0 / x : std::pow(x, -0.5 * r);
}

double SparsePrefixVector::coeff(std::int64_t j) const {
  if (j < 1) throw InvalidValue("coefficient indices start at 1");
  if (j > J) return 0.0;
  const auto it = overrides.find(j);
  if (it != overrides.end()) return it->second;
  if (!rule) throw InvalidValue("prefix rule not set");
  return rule(j);
}

double SparsePrefixVector::norm() const {
  for (const auto& [key, value] : overrides) {
    (void)value;
    if (key < 1 || key > J) throw InvalidValue("override index outside the prefix");
  }
  KahanAccumulator sum;
  for (std::int64_t j = 1; j <= J; ++j) {
    const double c = coeff(j);
    sum.add(c * c);
  }
  return std::sqrt(sum.value());
}

double phi(const PowerLawModel& model, double a) {
  model.validate();
  require_positive(a);
  if (model.tail_mode == TailMode::drop) return phi_drop(model, a);
  require_sandwich_defaults(model);
  return phi_sandwich(model, a).mid();
}

Enclosure phi_enclosure(const PowerLawModel& model, double a) {
  model.validate();
  require_positive(a);
  if (model.tail_mode != TailMode::integral_sandwich)
    throw ParameterOutOfRange("enclosures require integral sandwich tail mode");
  require_sandwich_defaults(model);
  return phi_sandwich(model, a);
}

double psi(double a) {
  require_positive(a);
  return 1.0 / (a * (1.0 + a));
}

Enclosure data_norm_enclosure(const PowerLawModel& model) {
  model.validate();
  KahanAccumulator sum;
  const double rm1 = model.r - 1.0;
  for (std::int64_t j = 1;; ++j) {
    const double c = model.data_coefficient(j);
    sum.add(c * c);
    if (j % kCheckStride == 0 || j == model.truncation) {
      const double hi_tail = std::pow(static_cast<double>(j), -rm1) / rm1;
      const double lo_tail = std::pow(static_cast<double>(j + 1), -rm1) / rm1;
      const double lo = sum.value() + lo_tail;
      if (hi_tail - lo_tail <= kRelWidthStop * lo || j == model.truncation)
        return make_enclosure(lo, sum.value() + hi_tail).sqrt();
    }
  }
}

double dp_value_model(const PowerLawModel& model, double a) {
  return a * std::sqrt(phi(model, a));
}

double dp_root_model(const PowerLawModel& model, double delta, double C) {
  model.validate();
  require_positive(delta);
  if (!(C >= 1.0) || !std::isfinite(C))
    throw ParameterOutOfRange("discrepancy multiplier must be >= 1");

  const double target = C * delta;
  if (model.tail_mode == TailMode::drop) {
    // In drop mode the value saturates at the truncated data norm.
    KahanAccumulator sum;
    for (std::int64_t j = 1; j <= model.truncation; ++j) {
      const double c = model.data_coefficient(j);
      sum.add(c * c);
    }
    if (!(target < std::sqrt(sum.value())))
      throw NoRoot("target reaches the truncated data norm");
  } else {
    if (!(target < data_norm_enclosure(model).lo))
      throw NoRoot("target reaches the data norm");
  }

  const auto h = [&](double a) { return dp_value_model(model, a); };
  // The asymptotic root location: seeding there keeps the bracket short.
  const double seed = C * C * delta * delta;
  return detail::solve_increasing(h, target, seed, 1e-9, 200).x;
}

std::int64_t nearest_eigenvalue_index(const PowerLawModel& model, double a) {
  model.validate();
  require_positive(a);
  const double x = std::pow(a, -1.0 / model.q);
  // Everything at or beyond x is closer than the last in-range eigenvalue
  // once x clears the cap, so bail out before the integer cast can overflow.
  if (!(x <= static_cast<double>(model.truncation) + 2.0))
    throw TruncationInsufficient("nearest eigenvalue index exceeds the truncation");
  const std::int64_t base = static_cast<std::int64_t>(std::floor(x));

  std::int64_t best = 0;
  double best_gap = 0.0;
  // The eigenvalues are decreasing, so the minimizer sits where they
  // straddle a; the widened candidate window absorbs pow rounding.
  for (std::int64_t c = std::max<std::int64_t>(1, base - 1); c <= base + 2; ++c) {
    if (c > model.truncation) {
      if (best == 0 || std::abs(model.eigenvalue(c) - a) < best_gap)
        throw TruncationInsufficient("nearest eigenvalue index exceeds the truncation");
      break;
    }
    const double gap = std::abs(model.eigenvalue(c) - a);
    if (best == 0 || gap < best_gap) {
      best = c;
      best_gap = gap;
    }
  }
  return best;
}

double range_divergence_proxy(const PowerLawModel& model, std::int64_t upto) {
  model.validate();
  if (upto < 1) throw InvalidValue("partial sum needs at least one term");
  KahanAccumulator sum;
  const double e = model.q - model.r;  // f_j^2 / mu_j = j^{q - r}
  for (std::int64_t j = 1; j <= upto; ++j) {
    const double x = static_cast<double>(j);
    sum.add(e == -1.0 ? 1.0 / x : std::pow(x, e));
  }
  return sum.value();
}

namespace {

// Integral of 1 / (x (1 + a x)^2) from m to infinity: tail bound for the
// filtered-coefficient series shared by the gap and distance fields.
// Equals -log(1-u) - u with u = 1/(1+am), a difference of two nearly equal
// quantities once a m is large; the all-positive power series keeps full
// relative accuracy there, which the bracket-width stopping test needs.
double filtered_tail_integral(double a, double m) {
  const double am = a * m;
  const double u = 1.0 / (1.0 + am);
  if (u < 1e-4) {
    return u * u *
           (1.0 / 2.0 + u * (1.0 / 3.0 + u * (1.0 / 4.0 + u * (1.0 / 5.0 + u * (1.0 / 6.0)))));
  }
  return std::log1p(1.0 / am) - u;
}

// Sum over j > J of (lambda_j f_j / (mu_j + a))^2, enclosed.
Enclosure filtered_tail(const PowerLawModel& model, double a, std::int64_t J) {
  const bool sandwich = model.tail_mode == TailMode::integral_sandwich;
  if (sandwich) require_sandwich_defaults(model);
  KahanAccumulator sum;
  std::int64_t m = J;
  while (m < model.truncation) {
    ++m;
    const double x = static_cast<double>(m);
    double t;
    if (model.has_default_exponents()) {
      const double w = 1.0 + a * x;
      t = 1.0 / (x * w * w);
    } else {
      const double lf = model.singular_value(m) * model.data_coefficient(m);
      const double s = lf / (model.eigenvalue(m) + a);
      t = s * s;
    }
    sum.add(t);
    if (sandwich && m % kCheckStride == 0) {
      const double hi_tail = filtered_tail_integral(a, static_cast<double>(m));
      const double lo_tail = filtered_tail_integral(a, static_cast<double>(m + 1));
      if (hi_tail - lo_tail <= kRelWidthStop * (sum.value() + lo_tail)) break;
    }
  }
  if (!sandwich) return make_enclosure(sum.value(), sum.value());
  const double hi_tail = filtered_tail_integral(a, static_cast<double>(m));
  const double lo_tail = filtered_tail_integral(a, static_cast<double>(m + 1));
  return make_enclosure(sum.value() + lo_tail, sum.value() + hi_tail);
}

// Sum over j > J of f_j^2: closed-form integral bracket when the infinite
// tail participates, literal truncated sum in drop mode.
Enclosure data_tail(const PowerLawModel& model, std::int64_t J) {
  if (model.tail_mode == TailMode::drop) {
    KahanAccumulator sum;
    for (std::int64_t j = J + 1; j <= model.truncation; ++j) {
      const double c = model.data_coefficient(j);
      sum.add(c * c);
    }
    return make_enclosure(sum.value(), sum.value());
  }
  const double rm1 = model.r - 1.0;
  return make_enclosure(std::pow(static_cast<double>(J + 1), -rm1) / rm1,
                        std::pow(static_cast<double>(J), -rm1) / rm1);
}

}  // namespace

BadPairCertificate build_bad_pair(const PowerLawModel& model, double delta, double C, double b) {
  model.validate();
  require_positive(delta);
  if (!(C >= 1.0) || !std::isfinite(C))
    throw ParameterOutOfRange("discrepancy multiplier must be >= 1");
  if (!(b > 0.0) || !(b < 1.0)) throw ParameterOutOfRange("smoothing exponent must lie in (0, 1)");

  BadPairCertificate cert;
  cert.delta = delta;
  cert.C = C;
  cert.b = b;
  cert.a = dp_root_model(model, delta, C);
  cert.j_star = nearest_eigenvalue_index(model, cert.a);

  // Cutoff making the dropped data tail at most (delta/8)^2.
  const double rm1 = model.r - 1.0;
  double J_raw;
  if (model.r == 2.0) {
    J_raw = 64.0 / (delta * delta);
  } else {
    J_raw = std::pow(64.0 / (rm1 * delta * delta), 1.0 / rm1);
  }
  if (!(std::ceil(J_raw) + 1.0 <= static_cast<double>(model.truncation)))
    throw TruncationInsufficient("construction cutoff exceeds the truncation");
  std::int64_t J = static_cast<std::int64_t>(std::ceil(J_raw)) + 1;
  J = std::max(J, cert.j_star);
  cert.J = J;

  const double a = cert.a;
  const std::int64_t js = cert.j_star;
  const double spike = delta / 2.0;
  const double f_js = model.data_coefficient(js);
  const double lam_js = model.singular_value(js);
  const double mu_js = model.eigenvalue(js);
  const double mu_js_b = std::pow(mu_js, b);

  SparsePrefixVector p;
  p.rule = [](std::int64_t) { return 0.0; };
  p.J = js;
  p.overrides[js] = spike;

  SparsePrefixVector z;
  z.rule = [&model, b](std::int64_t j) {
    return model.data_coefficient(j) /
           (model.singular_value(j) * std::pow(model.eigenvalue(j), b));
  };
  z.J = J;
  z.overrides[js] = (f_js - spike) / (lam_js * mu_js_b);

  SparsePrefixVector v;
  v.rule = [&model](std::int64_t j) {
    return model.data_coefficient(j) / model.singular_value(j);
  };
  v.J = J;
  v.overrides[js] = (f_js - spike) / lam_js;

  cert.norm_p = p.norm();
  cert.norm_z = z.norm();
  cert.norm_v = v.norm();

  const double sqrt_a = std::sqrt(a);
  cert.norm_Tp = spike * lam_js / (mu_js + a);
  cert.tp_lower_bound = delta / (8.0 * sqrt_a);
  cert.gap_lower_bound = delta / (16.0 * sqrt_a);

  // One pass over the prefix: floating-point dust of the cancellation in
  // the smoothed residual, the perturbation-only misfit, and the distance
  // head between the regularized solution and the competitor.
  KahanAccumulator dust32, head37, head_dist;
  for (std::int64_t j = 1; j <= J; ++j) {
    const double f_j = model.data_coefficient(j);
    const double lam_j = model.singular_value(j);
    const double mu_j = model.eigenvalue(j);
    const double v_j = v.coeff(j);
    const double p_j = (j == js) ? spike : 0.0;
    const double image = lam_j * v_j;
    const double d32 = f_j - image - p_j;
    dust32.add(d32 * d32);
    const double d37 = f_j - image;
    head37.add(d37 * d37);
    const double u_j = lam_j * f_j / (mu_j + a);
    const double dd = u_j - v_j;
    head_dist.add(dd * dd);
  }

  const Enclosure tail_f = data_tail(model, J);
  const Enclosure tail_filtered = filtered_tail(model, a, J);

  cert.resid_32 = std::sqrt(dust32.value() + tail_f.hi);
  cert.resid_37 = std::sqrt(head37.value() + tail_f.hi);
  cert.gap_38 = std::sqrt(cert.norm_Tp * cert.norm_Tp + tail_filtered.lo);
  cert.dist = std::sqrt(head_dist.value() + tail_filtered.mid());
  return cert;
}

std::vector<BadPairCertificate> nonuniformity_sweep(const PowerLawModel& model,
                                                    const std::vector<double>& deltas, double C,
                                                    double b) {
  if (deltas.empty()) throw InvalidPlan("delta sweep must be nonempty");
  for (size_t i = 1; i < deltas.size(); ++i)
    if (!(deltas[i] < deltas[i - 1])) throw InvalidPlan("delta sweep must be strictly decreasing");
  return detail::parallel_map<BadPairCertificate>(
      static_cast<std::int64_t>(deltas.size()),
      [&](std::int64_t i) { return build_bad_pair(model, deltas[static_cast<size_t>(i)], C, b); });
}

}  // namespace seqlab
}  // namespace regdp
