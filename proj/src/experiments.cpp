#include "regdp/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "regdp/parallel.hpp"
#include "regdp/summation.hpp"
#include "regdp/tikhonov.hpp"

namespace regdp {
namespace experiments {

namespace {

double uniform01(std::mt19937_64& rng) { return (rng() >> 11) * 0x1p-53; }

// Polar-free Box-Muller on the top 53 bits; u1 is shifted into (0, 1] so the
// logarithm never sees zero.
Vector gaussian_vector(std::mt19937_64& rng, Eigen::Index n) {
  Vector e(n);
  for (Eigen::Index i = 0; i < n; i += 2) {
    const double u1 = (static_cast<double>(rng() >> 11) + 1.0) * 0x1p-53;
    const double u2 = uniform01(rng);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    e[i] = radius * std::cos(angle);
    if (i + 1 < n) e[i + 1] = radius * std::sin(angle);
  }
  return e;
}

double compensated_norm(const Vector& v) {
  return std::sqrt(compensated_dot(v.data(), v.data(), static_cast<std::size_t>(v.size())));
}

// Shared noise engine, parameterized by the norm that defines "size delta".
// Adding a small vector to f and subtracting f back does not reproduce the
// vector bit-for-bit, so after the add we rescale the effective perturbation
// fd - f (that subtraction is exact) until its norm sits on ratio*delta.
template <typename NormFn>
Vector noisy_impl(const Vector& f, double delta, const NoiseSpec& spec, NormFn&& norm_of) {
  spec.validate();
  if (!std::isfinite(delta) || delta < 0.0) {
    throw NonpositiveParameter("noise level may not be negative");
  }
  if (f.size() == 0) throw InvalidValue("data vector is empty");
  if (!f.allFinite()) throw InvalidValue("data has non-finite entries");
  if (delta == 0.0) return f;

  const double size = spec.ratio * delta;
  std::mt19937_64 rng(spec.seed);
  for (int attempt = 0; attempt < spec.max_resamples; ++attempt) {
    Vector e = gaussian_vector(rng, f.size());
    const double en = norm_of(e);
    if (!(en > 0.0) || !std::isfinite(en)) continue;

    Vector x = (size / en) * e;
    Vector fd = f + x;
    for (int pass = 0; pass < 4; ++pass) {
      const Vector d = fd - f;
      const double dn = norm_of(d);
      if (!(dn > 0.0)) break;
      if (std::abs(dn - size) <= 1e-15 * size) break;
      fd = f + Vector((size / dn) * d);
    }
    if (norm_of(fd) > delta) return fd;
  }
  throw NoiseRejection("could not reach ||f_delta|| > delta; data norm too small for this noise level");
}

Matrix seeded_orthonormal(std::mt19937_64& rng, int rows, int k) {
  Matrix G(rows, k);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < k; ++j) G(i, j) = 2.0 * uniform01(rng) - 1.0;
  Eigen::HouseholderQR<Matrix> qr(G);
  Matrix Q = qr.householderQ();
  return Q.leftCols(k);
}

// Residual of the worked solution through dense apply plus range projection.
// This shares no arithmetic with the coefficient form inside the discrepancy
// solver, which is the point: the two routes must agree to 1e-9 relative.
double dense_residual(const LinearProblem& problem, const linop::SingularSystem& S,
                      const Vector& u, const Vector& f_delta) {
  const Eigen::Index m = problem.A.rows();
  const Eigen::Index n = problem.A.cols();
  Vector t(m);
  Vector row(n);
  for (Eigen::Index i = 0; i < m; ++i) {
    row = problem.A.row(i);
    t[i] = compensated_dot(row.data(), u.data(), static_cast<std::size_t>(n)) - f_delta[i];
  }
  const double cutoff = linop::default_null_tol(S);
  KahanAccumulator acc;
  for (Eigen::Index j = 0; j < S.sigma.size(); ++j) {
    if (S.sigma[j] <= cutoff) continue;
    const double c =
        compensated_dot(S.left.col(j).data(), t.data(), static_cast<std::size_t>(m));
    acc += c * c;
  }
  return std::sqrt(acc.value());
}

void append_number(std::string& out, double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  out += buf;
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

void NoiseSpec::validate() const {
  if (!std::isfinite(ratio) || !(ratio > 0.0) || ratio > 1.0) {
    throw ConfigError("noise ratio must lie in (0, 1]");
  }
  if (max_resamples < 1) throw ConfigError("max_resamples must be at least 1");
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t row_seed(std::uint64_t base, std::size_t index) {
  return splitmix64(base + static_cast<std::uint64_t>(index) * 0x9E3779B97F4A7C15ULL);
}

Vector make_noisy(const Vector& f, double delta, const NoiseSpec& spec) {
  return noisy_impl(f, delta, spec, [](const Vector& v) { return compensated_norm(v); });
}

LinearProblem diag_powerlaw(int n) {
  if (n < 1) throw ParameterOutOfRange("problem size must be positive");
  LinearProblem p;
  p.name = "diag_powerlaw";
  p.A = Matrix::Zero(n, n);
  p.y = Vector(n);
  for (int j = 1; j <= n; ++j) {
    p.A(j - 1, j - 1) = 1.0 / std::sqrt(static_cast<double>(j));
    p.y[j - 1] = std::pow(static_cast<double>(j), -1.5);
  }
  p.y /= p.y.norm();
  return p;
}

LinearProblem rank_deficient_frame(int n, int rank, std::uint64_t seed) {
  if (n < 1) throw ParameterOutOfRange("problem size must be positive");
  if (rank < 1 || rank > n) throw ParameterOutOfRange("rank must lie in [1, n]");
  std::mt19937_64 rng(seed);
  const Matrix U = seeded_orthonormal(rng, n, rank);
  const Matrix V = seeded_orthonormal(rng, n, rank);
  Vector sigma(rank);
  for (int j = 1; j <= rank; ++j) sigma[j - 1] = 1.0 / std::sqrt(static_cast<double>(j));

  LinearProblem p;
  p.name = "rank_deficient";
  p.A = U * sigma.asDiagonal() * V.transpose();

  // Push a generic source through the operator and take the minimum-norm
  // preimage: that lands exactly in the orthogonal complement of the null
  // space, which the convergence statements require.
  Vector y_raw(n);
  for (int i = 0; i < n; ++i) y_raw[i] = 2.0 * uniform01(rng) - 1.0;
  const linop::SingularSystem S = linop::decompose(p.A);
  p.y = linop::min_norm_solution(S, Vector(p.A * y_raw), linop::default_null_tol(S));
  p.y /= p.y.norm();
  p.projected = true;
  return p;
}

void StudyPlan::validate() const {
  if (deltas.empty()) throw InvalidPlan("plan needs at least one delta");
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!std::isfinite(deltas[i]) || !(deltas[i] > 0.0)) {
      throw InvalidPlan("deltas must be positive and finite");
    }
    if (i > 0 && !(deltas[i] < deltas[i - 1])) {
      throw InvalidPlan("deltas must be strictly decreasing");
    }
  }
  noise.validate();
  if (budget < 1) throw InvalidPlan("optimizer budget must be at least 1");
  if (n < 0 || rank < 0) throw InvalidPlan("sizes may not be negative");
}

LinearProblem resolve_linear_problem(const StudyPlan& plan) {
  if (plan.problem == "diag_powerlaw") {
    return diag_powerlaw(plan.n > 0 ? plan.n : 500);
  }
  if (plan.problem == "rank_deficient") {
    const int n = plan.n > 0 ? plan.n : 100;
    const int rank = plan.rank > 0 ? plan.rank : n / 2;
    return rank_deficient_frame(n, rank, plan.problem_seed);
  }
  throw InvalidPlan("unknown linear study problem: " + plan.problem);
}

std::vector<StudyRow> run_linear_study(const StudyPlan& plan) {
  plan.validate();
  plan.dp.validate();
  return run_linear_study(plan, resolve_linear_problem(plan));
}

std::vector<StudyRow> run_linear_study(const StudyPlan& plan, const LinearProblem& problem) {
  plan.validate();
  plan.dp.validate();
  if (problem.y.size() != problem.A.cols()) {
    throw DimensionMismatch("source length does not match the operator");
  }

  const linop::SingularSystem S = linop::decompose(problem.A);
  const Vector f = problem.A * problem.y;
  const double y_norm = problem.y.norm();

  return detail::parallel_map<StudyRow>(
      static_cast<std::int64_t>(plan.deltas.size()), [&](std::int64_t i) {
        const double delta = plan.deltas[static_cast<std::size_t>(i)];
        NoiseSpec row_spec = plan.noise;
        row_spec.seed = row_seed(plan.noise.seed, static_cast<std::size_t>(i));

        const Vector f_delta = make_noisy(f, delta, row_spec);
        const discrepancy::DPResult root = discrepancy::solve_dp(S, f_delta, delta, plan.dp);
        const Vector u = tikhonov::solve(S, f_delta, root.a).u;

        StudyRow row;
        row.delta = delta;
        row.a = root.a;
        row.h_at_a = root.h_at_a;
        row.u_norm = u.norm();
        row.y_norm = y_norm;
        const Vector diff = problem.y - u;
        row.error = diff.norm();
        row.residual = dense_residual(problem, S, u, f_delta);
        row.ineq_17_slack =
            2.0 * compensated_dot(problem.y.data(), diff.data(),
                                  static_cast<std::size_t>(diff.size())) -
            compensated_dot(diff.data(), diff.data(), static_cast<std::size_t>(diff.size()));
        row.seed = row_spec.seed;
        return row;
      });
}

std::vector<StudyRow> run_nonlinear_study(const StudyPlan& plan) {
  plan.validate();
  if (plan.problem != "sin_reference") {
    throw InvalidPlan("unknown nonlinear study problem: " + plan.problem);
  }

  const nonlinear::Grid1D grid{plan.n > 0 ? plan.n : 64};
  grid.validate();
  const nonlinear::ForwardMapSpec map;
  const nonlinear::SobolevVector y =
      nonlinear::sample(grid, [](double x) { return std::sin(std::numbers::pi * x); });
  const double y_h1 = nonlinear::h1_norm(y);
  const nonlinear::SobolevVector f = nonlinear::apply_forward(map, y);
  const auto trapezoid_norm = [&grid](const Vector& v) {
    return nonlinear::l2_norm(nonlinear::SobolevVector{grid, v});
  };
  const double h = grid.spacing();

  return detail::parallel_map<StudyRow>(
      static_cast<std::int64_t>(plan.deltas.size()), [&](std::int64_t i) {
        const double delta = plan.deltas[static_cast<std::size_t>(i)];
        NoiseSpec row_spec = plan.noise;
        row_spec.seed = row_seed(plan.noise.seed, static_cast<std::size_t>(i));

        // Noise is sized in the same trapezoid norm the objective uses.
        const nonlinear::SobolevVector f_delta{
            grid, noisy_impl(f.values, delta, row_spec, trapezoid_norm)};
        const double target = (2.0 + y_h1) * delta;
        const nonlinear::QuasiMinResult res =
            nonlinear::quasi_minimize(map, f_delta, delta, target, plan.budget);

        StudyRow row;
        row.delta = delta;
        row.u_norm = nonlinear::h1_norm(res.u);
        row.y_norm = y_h1;
        const Vector diff = y.values - res.u.values;
        row.error = trapezoid_norm(diff);
        const nonlinear::SobolevVector image = nonlinear::apply_forward(map, res.u);
        row.residual = trapezoid_norm(Vector(image.values - f_delta.values));
        KahanAccumulator first, second;
        for (int k = 0; k < grid.n; ++k) {
          const double w = (k == 0 || k == grid.n - 1) ? 0.5 * h : h;
          first += w * y.values[k] * diff[k];
          second += w * diff[k] * diff[k];
        }
        row.ineq_17_slack = 2.0 * first.value() - second.value();
        row.seed = row_spec.seed;
        row.met_target = res.met_target;
        return row;
      });
}

std::string canonical_plan_text(const StudyPlan& plan) {
  std::string out = "{\"problem\":\"" + plan.problem + "\",\"n\":" + std::to_string(plan.n) +
                    ",\"rank\":" + std::to_string(plan.rank) +
                    ",\"problem_seed\":" + std::to_string(plan.problem_seed) + ",\"deltas\":[";
  for (std::size_t i = 0; i < plan.deltas.size(); ++i) {
    if (i > 0) out += ',';
    append_number(out, plan.deltas[i]);
  }
  out += "],\"dp\":{\"C\":";
  append_number(out, plan.dp.C);
  out += ",\"rel_tol\":";
  append_number(out, plan.dp.rel_tol);
  out += ",\"max_iter\":" + std::to_string(plan.dp.max_iter) + ",\"bracket_seed\":";
  if (plan.dp.bracket_seed) {
    append_number(out, *plan.dp.bracket_seed);
  } else {
    out += "null";
  }
  out += "},\"noise\":{\"seed\":" + std::to_string(plan.noise.seed) + ",\"ratio\":";
  append_number(out, plan.noise.ratio);
  out += ",\"max_resamples\":" + std::to_string(plan.noise.max_resamples) +
         "},\"budget\":" + std::to_string(plan.budget) + "}";
  return out;
}

std::uint64_t plan_digest(const StudyPlan& plan) { return fnv1a64(canonical_plan_text(plan)); }

ReportMeta meta_for(const StudyPlan& plan, const LinearProblem* problem) {
  ReportMeta meta;
  meta.seed = plan.noise.seed;
  meta.plan_digest = plan_digest(plan);
  if (problem != nullptr && problem->projected) {
    meta.notes.push_back("source projected onto the orthogonal complement of the null space (" +
                         problem->name + ")");
  }
  return meta;
}

}  // namespace experiments
}  // namespace regdp
