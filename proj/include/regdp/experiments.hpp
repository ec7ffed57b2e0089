#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "regdp/discrepancy.hpp"
#include "regdp/linop.hpp"
#include "regdp/nonlinear.hpp"

namespace regdp {
namespace experiments {

// Name written into report headers so a CSV can be traced back to the exact
// random stream that produced it.
inline constexpr const char* kGeneratorName = "mt19937_64+box-muller";

struct NoiseSpec {
  std::uint64_t seed = 0;
  double ratio = 1.0;   // ||f_delta - f|| = ratio * delta; 1 probes the boundary
  int max_resamples = 100;

  void validate() const;
};

// Stateless 64-bit mixer used to split one base seed into independent
// per-row streams. Standard splitmix64 step.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t row_seed(std::uint64_t base, std::size_t index);

// f + ratio*delta*e with e a seeded Gaussian direction of exact unit norm,
// redrawn (same engine) until ||f_delta|| > delta. delta = 0 returns f.
Vector make_noisy(const Vector& f, double delta, const NoiseSpec& spec);

// A linear test problem: operator, exact source orthogonal to the null
// space, and whether the builder had to project to make it so.
struct LinearProblem {
  std::string name;
  Matrix A;
  Vector y;
  bool projected = false;
};

// Diagonal operator with singular values j^(-1/2) and a smooth unit-norm
// source with coefficients proportional to j^(-3/2).
LinearProblem diag_powerlaw(int n = 500);

// Rank-deficient square operator from seeded orthonormal frames with
// spectrum j^(-1/2); the source comes from a minimum-norm solve, so it is
// orthogonal to the null space by construction, then normalized.
LinearProblem rank_deficient_frame(int n = 100, int rank = 50, std::uint64_t seed = 7);

struct StudyPlan {
  std::string problem;          // "diag_powerlaw", "rank_deficient", "sin_reference"
  std::vector<double> deltas;   // strictly decreasing, positive
  discrepancy::DPConfig dp;     // linear studies only
  NoiseSpec noise;
  std::string output_path;      // consumed by the CLI; empty means caller handles output

  int n = 0;                    // 0 picks the problem default
  int rank = 0;                 // 0 picks n/2 (rank_deficient only)
  std::uint64_t problem_seed = 7;
  std::int64_t budget = 100'000;  // nonlinear optimizer budget

  void validate() const;        // InvalidPlan on bad deltas or unknown problem
};

struct StudyRow {
  double delta = 0.0;
  double a = 0.0;
  double h_at_a = 0.0;
  double u_norm = 0.0;
  double y_norm = 0.0;
  double error = 0.0;           // || u_delta - y ||
  double residual = 0.0;        // independent route; matches h_at_a in linear studies
  double ineq_17_slack = 0.0;   // 2 <y, y - u> - ||y - u||^2
  std::uint64_t seed = 0;
  bool met_target = true;       // nonlinear rows only; not serialized
};

// Materialize the named linear problem of a plan (InvalidPlan for names the
// harness does not know).
LinearProblem resolve_linear_problem(const StudyPlan& plan);

std::vector<StudyRow> run_linear_study(const StudyPlan& plan);
std::vector<StudyRow> run_linear_study(const StudyPlan& plan, const LinearProblem& problem);
std::vector<StudyRow> run_nonlinear_study(const StudyPlan& plan);

// Provenance block for the `#` comment lines at the top of a report.
struct ReportMeta {
  std::string generator = kGeneratorName;
  std::uint64_t seed = 0;
  std::uint64_t plan_digest = 0;
  std::vector<std::string> notes;
};

// FNV-1a over the canonical plan text; identical plans hash identically
// regardless of where the report is written.
std::uint64_t plan_digest(const StudyPlan& plan);
std::string canonical_plan_text(const StudyPlan& plan);
ReportMeta meta_for(const StudyPlan& plan, const LinearProblem* problem = nullptr);

std::string render_report(const std::vector<StudyRow>& rows, const ReportMeta& meta = {});
void write_report(const std::vector<StudyRow>& rows, const std::string& path,
                  const ReportMeta& meta = {});
std::vector<StudyRow> parse_report(const std::string& path);

}  // namespace experiments
}  // namespace regdp
