#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "regdp/discrepancy.hpp"
#include "regdp/experiments.hpp"
#include "regdp/nonlinear.hpp"
#include "regdp/seqlab.hpp"
#include "regdp/tikhonov.hpp"

namespace py = pybind11;
using namespace regdp;

namespace {

discrepancy::DPConfig dp_config(double C, double rel_tol, int max_iter,
                                std::optional<double> bracket_seed) {
  discrepancy::DPConfig cfg;
  cfg.C = C;
  cfg.rel_tol = rel_tol;
  cfg.max_iter = max_iter;
  cfg.bracket_seed = bracket_seed;
  return cfg;
}

seqlab::PowerLawModel power_law_model(double q, double r, std::int64_t truncation,
                                      bool drop_tail) {
  seqlab::PowerLawModel model;
  model.q = q;
  model.r = r;
  model.truncation = truncation;
  model.tail_mode = drop_tail ? seqlab::TailMode::drop : seqlab::TailMode::integral_sandwich;
  model.validate();
  return model;
}

nonlinear::SobolevVector grid_function(const Vector& values) {
  nonlinear::Grid1D grid{static_cast<int>(values.size())};
  grid.validate();
  return nonlinear::SobolevVector{grid, values};
}

}  // namespace

PYBIND11_MODULE(_regdp, m) {
  m.doc() =
      "Tikhonov regularization with a discrepancy-principle parameter choice: "
      "spectral solvers, seeded convergence studies, and the power-law "
      "sequence model with its non-uniformity certificates.";
  m.attr("__version__") = "0.1.0";

  // Exception hierarchy: the base first so derived translators run earlier.
  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<NoRoot>(m, "NoRootError", base.ptr());
  py::register_exception<TruncationInsufficient>(m, "TruncationInsufficientError", base.ptr());
  py::register_exception<BudgetExhausted>(m, "BudgetExhaustedError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

  py::class_<tikhonov::RegularizedSolution>(m, "RegularizedSolution")
      .def_readonly("a", &tikhonov::RegularizedSolution::a)
      .def_readonly("u", &tikhonov::RegularizedSolution::u)
      .def_readonly("residual_norm", &tikhonov::RegularizedSolution::residual_norm)
      .def_readonly("solution_norm", &tikhonov::RegularizedSolution::solution_norm)
      .def_readonly("functional_value", &tikhonov::RegularizedSolution::functional_value)
      .def("__repr__", [](const tikhonov::RegularizedSolution& s) {
        return "RegularizedSolution(a=" + std::to_string(s.a) +
               ", residual_norm=" + std::to_string(s.residual_norm) +
               ", solution_norm=" + std::to_string(s.solution_norm) + ")";
      });

  py::class_<discrepancy::DPResult>(m, "DPResult")
      .def_readonly("a", &discrepancy::DPResult::a)
      .def_readonly("h_at_a", &discrepancy::DPResult::h_at_a)
      .def_readonly("iterations", &discrepancy::DPResult::iterations)
      .def_readonly("bracket_lo", &discrepancy::DPResult::bracket_lo)
      .def_readonly("bracket_hi", &discrepancy::DPResult::bracket_hi)
      .def("__repr__", [](const discrepancy::DPResult& r) {
        return "DPResult(a=" + std::to_string(r.a) + ", h_at_a=" + std::to_string(r.h_at_a) +
               ", iterations=" + std::to_string(r.iterations) + ")";
      });

  py::class_<experiments::StudyRow>(m, "StudyRow")
      .def_readonly("delta", &experiments::StudyRow::delta)
      .def_readonly("a", &experiments::StudyRow::a)
      .def_readonly("h_at_a", &experiments::StudyRow::h_at_a)
      .def_readonly("u_norm", &experiments::StudyRow::u_norm)
      .def_readonly("y_norm", &experiments::StudyRow::y_norm)
      .def_readonly("error", &experiments::StudyRow::error)
      .def_readonly("residual", &experiments::StudyRow::residual)
      .def_readonly("ineq_17_slack", &experiments::StudyRow::ineq_17_slack)
      .def_readonly("seed", &experiments::StudyRow::seed)
      .def_readonly("met_target", &experiments::StudyRow::met_target)
      .def("__repr__", [](const experiments::StudyRow& r) {
        return "StudyRow(delta=" + std::to_string(r.delta) + ", error=" +
               std::to_string(r.error) + ")";
      });

  py::class_<seqlab::BadPairCertificate>(m, "BadPairCertificate")
      .def_readonly("delta", &seqlab::BadPairCertificate::delta)
      .def_readonly("C", &seqlab::BadPairCertificate::C)
      .def_readonly("b", &seqlab::BadPairCertificate::b)
      .def_readonly("a", &seqlab::BadPairCertificate::a)
      .def_readonly("j_star", &seqlab::BadPairCertificate::j_star)
      .def_readonly("J", &seqlab::BadPairCertificate::J)
      .def_readonly("norm_p", &seqlab::BadPairCertificate::norm_p)
      .def_readonly("norm_Tp", &seqlab::BadPairCertificate::norm_Tp)
      .def_readonly("tp_lower_bound", &seqlab::BadPairCertificate::tp_lower_bound)
      .def_readonly("resid_32", &seqlab::BadPairCertificate::resid_32)
      .def_readonly("resid_37", &seqlab::BadPairCertificate::resid_37)
      .def_readonly("gap_38", &seqlab::BadPairCertificate::gap_38)
      .def_readonly("gap_lower_bound", &seqlab::BadPairCertificate::gap_lower_bound)
      .def_readonly("dist", &seqlab::BadPairCertificate::dist)
      .def_readonly("norm_v", &seqlab::BadPairCertificate::norm_v)
      .def_readonly("norm_z", &seqlab::BadPairCertificate::norm_z)
      .def("__repr__", [](const seqlab::BadPairCertificate& c) {
        return "BadPairCertificate(delta=" + std::to_string(c.delta) +
               ", a=" + std::to_string(c.a) + ", j_star=" + std::to_string(c.j_star) + ")";
      });

  py::class_<nonlinear::QuasiMinResult>(m, "QuasiMinResult")
      .def_property_readonly("u",
                             [](const nonlinear::QuasiMinResult& r) { return r.u.values; })
      .def_readonly("F_value", &nonlinear::QuasiMinResult::F_value)
      .def_readonly("target", &nonlinear::QuasiMinResult::target)
      .def_readonly("evaluations", &nonlinear::QuasiMinResult::evaluations)
      .def_readonly("met_target", &nonlinear::QuasiMinResult::met_target);

  // ------------------------------------------------------------- solvers

  m.def(
      "solve",
      [](const Matrix& A, const Vector& f_delta, double a) {
        return tikhonov::solve(linop::decompose(A), f_delta, a);
      },
      py::arg("A"), py::arg("f_delta"), py::arg("a"),
      py::call_guard<py::gil_scoped_release>(),
      "Minimize ||A u - f_delta||^2 + a ||u||^2 at a fixed parameter a > 0.");

  m.def(
      "discrepancy_value",
      [](const Matrix& A, const Vector& f_delta, double a) {
        return discrepancy::discrepancy_value(linop::decompose(A), f_delta, a);
      },
      py::arg("A"), py::arg("f_delta"), py::arg("a"),
      py::call_guard<py::gil_scoped_release>(),
      "h(a) = a ||(A A^T + a)^{-1} f_delta|| over the range's closure.");

  m.def(
      "dp_root",
      [](const Matrix& A, const Vector& f_delta, double delta, double C, double rel_tol,
         int max_iter, std::optional<double> bracket_seed) {
        return discrepancy::solve_dp(linop::decompose(A), f_delta, delta,
                                     dp_config(C, rel_tol, max_iter, bracket_seed));
      },
      py::arg("A"), py::arg("f_delta"), py::arg("delta"), py::arg("C") = 1.0,
      py::arg("rel_tol") = 1e-9, py::arg("max_iter") = 200,
      py::arg("bracket_seed") = std::nullopt, py::call_guard<py::gil_scoped_release>(),
      "Solve the discrepancy equation h(a) = C * delta; raises NoRootError "
      "when the data norm cannot reach the target.");

  m.def(
      "regularize_dp",
      [](const Matrix& A, const Vector& f_delta, double delta, double C, double rel_tol,
         int max_iter, std::optional<double> bracket_seed) {
        return discrepancy::regularize_dp(linop::decompose(A), f_delta, delta,
                                          dp_config(C, rel_tol, max_iter, bracket_seed));
      },
      py::arg("A"), py::arg("f_delta"), py::arg("delta"), py::arg("C") = 1.0,
      py::arg("rel_tol") = 1e-9, py::arg("max_iter") = 200,
      py::arg("bracket_seed") = std::nullopt, py::call_guard<py::gil_scoped_release>(),
      "Pick the parameter by the discrepancy principle, then solve there.");

  m.def("filter_factor", &tikhonov::filter_factor, py::arg("sigma"), py::arg("a"),
        "Spectral multiplier sigma / (sigma^2 + a).");
  m.def("filter_operator_norm", &tikhonov::filter_operator_norm, py::arg("a"),
        "Norm of the regularized inverse: 1 / (2 sqrt(a)).");
  m.def("saturation_norm", &tikhonov::saturation_norm, py::arg("a"), py::arg("b"),
        py::arg("s_max"),
        "sup over [0, s_max] of a s^b / (s + a); equals b^b (1-b)^(1-b) a^b "
        "when the interior maximizer is in range.");

  // ------------------------------------------------------------- studies

  m.def(
      "make_noisy",
      [](const Vector& f, double delta, std::uint64_t seed, double ratio, int max_resamples) {
        experiments::NoiseSpec spec;
        spec.seed = seed;
        spec.ratio = ratio;
        spec.max_resamples = max_resamples;
        return experiments::make_noisy(f, delta, spec);
      },
      py::arg("f"), py::arg("delta"), py::arg("seed") = 0, py::arg("ratio") = 1.0,
      py::arg("max_resamples") = 100,
      "f plus a seeded Gaussian direction scaled to ratio * delta, redrawn "
      "until the perturbed data norm exceeds delta.");

  m.def(
      "run_linear_study",
      [](const std::string& problem, std::vector<double> deltas, std::uint64_t seed, double C,
         double ratio, int n, int rank, std::uint64_t problem_seed) {
        experiments::StudyPlan plan;
        plan.problem = problem;
        plan.deltas = std::move(deltas);
        plan.noise.seed = seed;
        plan.noise.ratio = ratio;
        plan.dp.C = C;
        plan.n = n;
        plan.rank = rank;
        plan.problem_seed = problem_seed;
        return experiments::run_linear_study(plan);
      },
      py::arg("problem"), py::arg("deltas"), py::arg("seed") = 0, py::arg("C") = 1.0,
      py::arg("ratio") = 1.0, py::arg("n") = 0, py::arg("rank") = 0,
      py::arg("problem_seed") = 7, py::call_guard<py::gil_scoped_release>(),
      "Noise sweep over a named linear problem ('diag_powerlaw' or "
      "'rank_deficient'): one StudyRow per noise level.");

  m.def(
      "run_nonlinear_study",
      [](std::vector<double> deltas, std::uint64_t seed, double ratio, int n,
         std::int64_t budget) {
        experiments::StudyPlan plan;
        plan.problem = "sin_reference";
        plan.deltas = std::move(deltas);
        plan.noise.seed = seed;
        plan.noise.ratio = ratio;
        plan.n = n;
        plan.budget = budget;
        return experiments::run_nonlinear_study(plan);
      },
      py::arg("deltas"), py::arg("seed") = 0, py::arg("ratio") = 1.0, py::arg("n") = 64,
      py::arg("budget") = 100'000, py::call_guard<py::gil_scoped_release>(),
      "Noise sweep for the penalized nonlinear recovery of sin(pi x).");

  // ------------------------------------------------------------- sequence model

  m.def(
      "phi",
      [](double a, double q, double r, std::int64_t truncation, bool drop_tail) {
        return seqlab::phi(power_law_model(q, r, truncation, drop_tail), a);
      },
      py::arg("a"), py::arg("q") = 1.0, py::arg("r") = 2.0, py::arg("truncation") = 10'000'000,
      py::arg("drop_tail") = false, py::call_guard<py::gil_scoped_release>(),
      "Series sum_j j^{-r} / (j^{-q} + a)^2 of the power-law model.");

  m.def(
      "phi_enclosure",
      [](double a, double q, double r, std::int64_t truncation, bool drop_tail) {
        // Plain pair, not py::make_tuple: the GIL is released inside this
        // lambda, so no Python objects may be created here.
        const Enclosure e = seqlab::phi_enclosure(power_law_model(q, r, truncation, drop_tail), a);
        return std::pair<double, double>(e.lo, e.hi);
      },
      py::arg("a"), py::arg("q") = 1.0, py::arg("r") = 2.0, py::arg("truncation") = 10'000'000,
      py::arg("drop_tail") = false, py::call_guard<py::gil_scoped_release>(),
      "Certified (lo, hi) bracket for phi(a).");

  m.def("psi", &seqlab::psi, py::arg("a"),
        "Closed-form continuous companion of phi: 1 / (a (1 + a)).");

  m.def(
      "dp_root_model",
      [](double delta, double C, double q, double r, std::int64_t truncation, bool drop_tail) {
        return seqlab::dp_root_model(power_law_model(q, r, truncation, drop_tail), delta, C);
      },
      py::arg("delta"), py::arg("C") = 1.0, py::arg("q") = 1.0, py::arg("r") = 2.0,
      py::arg("truncation") = 10'000'000, py::arg("drop_tail") = false,
      py::call_guard<py::gil_scoped_release>(),
      "Root of the model discrepancy equation a sqrt(phi(a)) = C delta.");

  m.def(
      "build_bad_pair",
      [](double delta, double C, double b, double q, double r, std::int64_t truncation,
         bool drop_tail) {
        return seqlab::build_bad_pair(power_law_model(q, r, truncation, drop_tail), delta, C, b);
      },
      py::arg("delta"), py::arg("C") = 1.0, py::arg("b") = 0.5, py::arg("q") = 1.0,
      py::arg("r") = 2.0, py::arg("truncation") = 10'000'000, py::arg("drop_tail") = false,
      py::call_guard<py::gil_scoped_release>(),
      "Audit one non-uniform-convergence construction at noise level delta.");

  m.def(
      "nonuniformity_sweep",
      [](std::vector<double> deltas, double C, double b, double q, double r,
         std::int64_t truncation, bool drop_tail) {
        return seqlab::nonuniformity_sweep(power_law_model(q, r, truncation, drop_tail), deltas,
                                           C, b);
      },
      py::arg("deltas"), py::arg("C") = 1.0, py::arg("b") = 0.5, py::arg("q") = 1.0,
      py::arg("r") = 2.0, py::arg("truncation") = 10'000'000, py::arg("drop_tail") = false,
      py::call_guard<py::gil_scoped_release>(),
      "build_bad_pair over a strictly decreasing noise sweep.");

  // ------------------------------------------------------------- nonlinear

  m.def(
      "apply_forward_volterra",
      [](const Vector& u) {
        return nonlinear::apply_forward(nonlinear::ForwardMapSpec{}, grid_function(u)).values;
      },
      py::arg("u"),
      "Cumulative trapezoid integral of u + u^3 on the unit grid carrying u.");

  m.def(
      "h1_norm", [](const Vector& u) { return nonlinear::h1_norm(grid_function(u)); },
      py::arg("u"), "Discrete first-order Sobolev norm on the unit grid.");

  m.def(
      "penalized_value",
      [](const Vector& u, const Vector& f_delta, double delta) {
        return nonlinear::penalized_value(nonlinear::ForwardMapSpec{}, grid_function(u),
                                          grid_function(f_delta), delta);
      },
      py::arg("u"), py::arg("f_delta"), py::arg("delta"),
      "F(u) = ||A(u) - f_delta|| + delta ||u||_1 for the cubic Volterra map.");

  m.def(
      "quasi_minimize",
      [](const Vector& f_delta, double delta, double target, std::int64_t budget) {
        return nonlinear::quasi_minimize(nonlinear::ForwardMapSpec{}, grid_function(f_delta),
                                         delta, target, budget);
      },
      py::arg("f_delta"), py::arg("delta"), py::arg("target"), py::arg("budget") = 100'000,
      py::call_guard<py::gil_scoped_release>(),
      "Drive F(u) down to the target through the smooth surrogate; "
      "met_target reports whether the budget sufficed.");
}
