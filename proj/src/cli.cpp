#include "regdp/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "regdp/discrepancy.hpp"
#include "regdp/experiments.hpp"
#include "regdp/seqlab.hpp"
#include "regdp/serialize.hpp"
#include "regdp/tikhonov.hpp"

namespace regdp {
namespace cli {

namespace {

using nlohmann::json;

// ---------------------------------------------------------------- config IO

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config is not valid JSON (" + path + "): " + e.what());
  }
}

void check_keys(const json& obj, const char* where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(std::string(where) + " must be a JSON object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ConfigError("unknown key \"" + item.key() + "\" in " + where);
    }
  }
}

double need_double(const json& obj, const char* key, const char* where) {
  if (!obj.contains(key)) throw ConfigError(std::string(where) + " is missing \"" + key + "\"");
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(std::string(key) + " must be a number");
  return v.get<double>();
}

double opt_double(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(std::string(key) + " must be a number");
  return v.get<double>();
}

std::int64_t opt_int(const json& obj, const char* key, std::int64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(std::string(key) + " must be an integer");
  return v.get<std::int64_t>();
}

std::uint64_t opt_uint(const json& obj, const char* key, std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer() || (v.is_number_integer() && v.get<std::int64_t>() < 0 &&
                                 !v.is_number_unsigned())) {
    throw ConfigError(std::string(key) + " must be a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

std::string opt_string(const json& obj, const char* key, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(std::string(key) + " must be a string");
  return v.get<std::string>();
}

std::vector<double> need_double_list(const json& obj, const char* key, const char* where) {
  if (!obj.contains(key)) throw ConfigError(std::string(where) + " is missing \"" + key + "\"");
  const json& arr = obj.at(key);
  if (!arr.is_array() || arr.empty()) {
    throw ConfigError(std::string(key) + " must be a nonempty array of numbers");
  }
  std::vector<double> out;
  out.reserve(arr.size());
  for (const json& v : arr) {
    if (!v.is_number()) throw ConfigError(std::string(key) + " must contain only numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

Vector need_vector(const json& obj, const char* key, const char* where) {
  const std::vector<double> raw = need_double_list(obj, key, where);
  Vector v(static_cast<Eigen::Index>(raw.size()));
  for (std::size_t i = 0; i < raw.size(); ++i) v[static_cast<Eigen::Index>(i)] = raw[i];
  return v;
}

Matrix need_matrix(const json& obj, const char* key, const char* where) {
  if (!obj.contains(key)) throw ConfigError(std::string(where) + " is missing \"" + key + "\"");
  const json& rows = obj.at(key);
  if (!rows.is_array() || rows.empty() || !rows[0].is_array() || rows[0].empty()) {
    throw ConfigError(std::string(key) + " must be a nonempty array of equal-length rows");
  }
  const std::size_t cols = rows[0].size();
  Matrix A(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const json& row = rows[i];
    if (!row.is_array() || row.size() != cols) {
      throw ConfigError(std::string(key) + " rows must all have the same length");
    }
    for (std::size_t j = 0; j < cols; ++j) {
      if (!row[j].is_number()) throw ConfigError(std::string(key) + " must contain only numbers");
      A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j].get<double>();
    }
  }
  return A;
}

seqlab::TailMode parse_tail_mode(const std::string& text) {
  if (text == "integral_sandwich") return seqlab::TailMode::integral_sandwich;
  if (text == "drop") return seqlab::TailMode::drop;
  throw ConfigError("tail_mode must be \"integral_sandwich\" or \"drop\"");
}

// ---------------------------------------------------------------- output

enum class Format { csv, json_text };

Format format_for(const std::string& path, Format fallback) {
  if (path.empty()) return fallback;
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0) return Format::csv;
  if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0) {
    return Format::json_text;
  }
  throw ConfigError("output path must end in .csv or .json: " + path);
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::fputs(content.c_str(), stdout);
    return;
  }
  serialize::write_text_file(path, content);
}

std::string sci(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

std::string hex_digest(std::uint64_t digest) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(digest));
  return buf;
}

std::string meta_json(const experiments::ReportMeta& meta) {
  std::string out = "{\"generator\":\"" + meta.generator +
                    "\",\"seed\":" + std::to_string(meta.seed) + ",\"plan_digest\":\"" +
                    hex_digest(meta.plan_digest) + "\",\"notes\":[";
  for (std::size_t i = 0; i < meta.notes.size(); ++i) {
    if (i > 0) out += ',';
    out += '"' + meta.notes[i] + '"';
  }
  out += "]}";
  return out;
}

std::string rows_json(const std::vector<experiments::StudyRow>& rows,
                      const experiments::ReportMeta& meta) {
  using serialize::number;
  std::string out = "{\"meta\":" + meta_json(meta) + ",\"rows\":[";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const experiments::StudyRow& r = rows[i];
    if (i > 0) out += ',';
    out += "{\"delta\":" + number(r.delta) + ",\"a\":" + number(r.a) +
           ",\"h_at_a\":" + number(r.h_at_a) + ",\"u_norm\":" + number(r.u_norm) +
           ",\"y_norm\":" + number(r.y_norm) + ",\"error\":" + number(r.error) +
           ",\"residual\":" + number(r.residual) +
           ",\"ineq_17_slack\":" + number(r.ineq_17_slack) +
           ",\"seed\":" + std::to_string(r.seed) + "}";
  }
  out += "]}\n";
  return out;
}

// ---------------------------------------------------------------- commands

struct CommonFlags {
  std::string config_path;
  std::string out_path;
};

int do_solve(const CommonFlags& common, const CLI::Option* a_flag, double a_override) {
  const json cfg = load_config(common.config_path);
  check_keys(cfg, "solve config", {"A", "f_delta", "a", "output_path"});
  const Matrix A = need_matrix(cfg, "A", "solve config");
  const Vector f_delta = need_vector(cfg, "f_delta", "solve config");
  double a = need_double(cfg, "a", "solve config");
  if (a_flag->count() > 0) a = a_override;
  std::string out = common.out_path.empty() ? opt_string(cfg, "output_path", "") : common.out_path;

  const Format format = format_for(out, Format::json_text);
  const tikhonov::RegularizedSolution sol = tikhonov::solve(linop::decompose(A), f_delta, a);

  if (format == Format::json_text) {
    emit(out, serialize::to_json(sol) + "\n");
  } else {
    std::string text = "# a: " + serialize::number(sol.a) + "\n";
    text += "# solution_norm: " + serialize::number(sol.solution_norm) + "\n";
    text += "# residual_norm: " + serialize::number(sol.residual_norm) + "\n";
    text += "# functional_value: " + serialize::number(sol.functional_value) + "\n";
    text += "index,u\n";
    for (Eigen::Index i = 0; i < sol.u.size(); ++i) {
      text += std::to_string(i) + "," + sci(sol.u[i]) + "\n";
    }
    emit(out, text);
  }
  return 0;
}

int do_dp_root(const CommonFlags& common, const CLI::Option* delta_flag, double delta_override,
               const CLI::Option* c_flag, double c_override) {
  const json cfg = load_config(common.config_path);
  check_keys(cfg, "dp-root config",
             {"A", "f_delta", "delta", "C", "rel_tol", "max_iter", "bracket_seed",
              "output_path"});
  const Matrix A = need_matrix(cfg, "A", "dp-root config");
  const Vector f_delta = need_vector(cfg, "f_delta", "dp-root config");
  double delta = need_double(cfg, "delta", "dp-root config");
  if (delta_flag->count() > 0) delta = delta_override;

  discrepancy::DPConfig dp;
  dp.C = opt_double(cfg, "C", dp.C);
  if (c_flag->count() > 0) dp.C = c_override;
  dp.rel_tol = opt_double(cfg, "rel_tol", dp.rel_tol);
  dp.max_iter = static_cast<int>(opt_int(cfg, "max_iter", dp.max_iter));
  if (cfg.contains("bracket_seed")) dp.bracket_seed = need_double(cfg, "bracket_seed", "dp-root config");
  std::string out = common.out_path.empty() ? opt_string(cfg, "output_path", "") : common.out_path;

  const Format format = format_for(out, Format::json_text);
  const discrepancy::DPResult root = discrepancy::solve_dp(linop::decompose(A), f_delta, delta, dp);

  if (format == Format::json_text) {
    emit(out, serialize::to_json(root) + "\n");
  } else {
    std::string text = "a,h_at_a,iterations,bracket_lo,bracket_hi\n";
    text += sci(root.a) + "," + sci(root.h_at_a) + "," + std::to_string(root.iterations) + "," +
            sci(root.bracket_lo) + "," + sci(root.bracket_hi) + "\n";
    emit(out, text);
  }
  return 0;
}

struct StudyFlags {
  std::vector<double> deltas;
  std::string problem;
  std::uint64_t seed = 0;
  double C = 1.0;
  double ratio = 1.0;
  int n = 0;
  int rank = 0;
  std::int64_t budget = 100'000;
  const CLI::Option* deltas_opt = nullptr;
  const CLI::Option* problem_opt = nullptr;
  const CLI::Option* seed_opt = nullptr;
  const CLI::Option* c_opt = nullptr;
  const CLI::Option* ratio_opt = nullptr;
  const CLI::Option* n_opt = nullptr;
  const CLI::Option* rank_opt = nullptr;
  const CLI::Option* budget_opt = nullptr;
};

experiments::StudyPlan plan_from(const CommonFlags& common, const StudyFlags& flags,
                                 const std::string& default_problem) {
  experiments::StudyPlan plan;
  plan.problem = default_problem;

  if (!common.config_path.empty()) {
    const json cfg = load_config(common.config_path);
    check_keys(cfg, "study config",
               {"problem", "n", "rank", "problem_seed", "deltas", "dp", "noise", "budget",
                "output_path"});
    plan.problem = opt_string(cfg, "problem", plan.problem);
    plan.n = static_cast<int>(opt_int(cfg, "n", plan.n));
    plan.rank = static_cast<int>(opt_int(cfg, "rank", plan.rank));
    plan.problem_seed = opt_uint(cfg, "problem_seed", plan.problem_seed);
    if (cfg.contains("deltas")) plan.deltas = need_double_list(cfg, "deltas", "study config");
    if (cfg.contains("dp")) {
      const json& dp = cfg.at("dp");
      check_keys(dp, "dp", {"C", "rel_tol", "max_iter", "bracket_seed"});
      plan.dp.C = opt_double(dp, "C", plan.dp.C);
      plan.dp.rel_tol = opt_double(dp, "rel_tol", plan.dp.rel_tol);
      plan.dp.max_iter = static_cast<int>(opt_int(dp, "max_iter", plan.dp.max_iter));
      if (dp.contains("bracket_seed")) plan.dp.bracket_seed = need_double(dp, "bracket_seed", "dp");
    }
    if (cfg.contains("noise")) {
      const json& noise = cfg.at("noise");
      check_keys(noise, "noise", {"seed", "ratio", "max_resamples"});
      plan.noise.seed = opt_uint(noise, "seed", plan.noise.seed);
      plan.noise.ratio = opt_double(noise, "ratio", plan.noise.ratio);
      plan.noise.max_resamples =
          static_cast<int>(opt_int(noise, "max_resamples", plan.noise.max_resamples));
    }
    plan.budget = opt_int(cfg, "budget", plan.budget);
    plan.output_path = opt_string(cfg, "output_path", plan.output_path);
  }

  if (flags.deltas_opt->count() > 0) plan.deltas = flags.deltas;
  if (flags.problem_opt->count() > 0) plan.problem = flags.problem;
  if (flags.seed_opt->count() > 0) plan.noise.seed = flags.seed;
  if (flags.c_opt->count() > 0) plan.dp.C = flags.C;
  if (flags.ratio_opt->count() > 0) plan.noise.ratio = flags.ratio;
  if (flags.n_opt->count() > 0) plan.n = flags.n;
  if (flags.rank_opt->count() > 0) plan.rank = flags.rank;
  if (flags.budget_opt->count() > 0) plan.budget = flags.budget;
  if (!common.out_path.empty()) plan.output_path = common.out_path;

  plan.validate();
  return plan;
}

int do_study_linear(const CommonFlags& common, const StudyFlags& flags) {
  const experiments::StudyPlan plan = plan_from(common, flags, "diag_powerlaw");
  plan.dp.validate();
  const experiments::LinearProblem problem = experiments::resolve_linear_problem(plan);
  const std::vector<experiments::StudyRow> rows = experiments::run_linear_study(plan, problem);
  const experiments::ReportMeta meta = experiments::meta_for(plan, &problem);

  const Format format = format_for(plan.output_path, Format::csv);
  emit(plan.output_path, format == Format::csv ? experiments::render_report(rows, meta)
                                               : rows_json(rows, meta));
  return 0;
}

int do_study_nonlinear(const CommonFlags& common, const StudyFlags& flags) {
  const experiments::StudyPlan plan = plan_from(common, flags, "sin_reference");
  const std::vector<experiments::StudyRow> rows = experiments::run_nonlinear_study(plan);
  experiments::ReportMeta meta = experiments::meta_for(plan);

  std::size_t starved = 0;
  for (const experiments::StudyRow& r : rows) starved += r.met_target ? 0 : 1;
  if (starved > 0) {
    meta.notes.push_back("optimizer budget exhausted on " + std::to_string(starved) + " of " +
                         std::to_string(rows.size()) + " rows");
  }

  const Format format = format_for(plan.output_path, Format::csv);
  emit(plan.output_path, format == Format::csv ? experiments::render_report(rows, meta)
                                               : rows_json(rows, meta));
  if (starved > 0) {
    std::cerr << "error: optimizer budget exhausted on " << starved << " of " << rows.size()
              << " rows (report written)\n";
    return 4;
  }
  return 0;
}

struct ModelFlags {
  double q = 1.0;
  double r = 2.0;
  std::int64_t truncation = 10'000'000;
  bool drop_tail = false;
  const CLI::Option* q_opt = nullptr;
  const CLI::Option* r_opt = nullptr;
  const CLI::Option* truncation_opt = nullptr;
  const CLI::Option* drop_opt = nullptr;
};

seqlab::PowerLawModel model_from(const json* cfg, const ModelFlags& flags) {
  seqlab::PowerLawModel model;
  if (cfg != nullptr) {
    model.q = opt_double(*cfg, "q", model.q);
    model.r = opt_double(*cfg, "r", model.r);
    model.truncation = opt_int(*cfg, "truncation", model.truncation);
    if (cfg->contains("tail_mode")) {
      model.tail_mode = parse_tail_mode(opt_string(*cfg, "tail_mode", ""));
    }
  }
  if (flags.q_opt->count() > 0) model.q = flags.q;
  if (flags.r_opt->count() > 0) model.r = flags.r;
  if (flags.truncation_opt->count() > 0) model.truncation = flags.truncation;
  if (flags.drop_opt->count() > 0 && flags.drop_tail) model.tail_mode = seqlab::TailMode::drop;
  model.validate();
  return model;
}

int do_counterexample(const CommonFlags& common, const ModelFlags& model_flags,
                      const StudyFlags& flags, const CLI::Option* b_opt, double b_flag) {
  std::vector<double> deltas;
  double C = 1.0;
  double b = 0.5;
  std::string out = common.out_path;

  std::optional<json> cfg;
  if (!common.config_path.empty()) {
    cfg = load_config(common.config_path);
    check_keys(*cfg, "counterexample config",
               {"deltas", "C", "b", "q", "r", "truncation", "tail_mode", "output_path"});
    if (cfg->contains("deltas")) deltas = need_double_list(*cfg, "deltas", "counterexample config");
    C = opt_double(*cfg, "C", C);
    b = opt_double(*cfg, "b", b);
    if (out.empty()) out = opt_string(*cfg, "output_path", "");
  }
  if (flags.deltas_opt->count() > 0) deltas = flags.deltas;
  if (flags.c_opt->count() > 0) C = flags.C;
  if (b_opt->count() > 0) b = b_flag;
  if (deltas.empty()) throw ConfigError("counterexample needs --deltas or a config with deltas");

  const seqlab::PowerLawModel model = model_from(cfg ? &*cfg : nullptr, model_flags);
  const Format format = format_for(out, Format::csv);
  const std::vector<seqlab::BadPairCertificate> certs =
      seqlab::nonuniformity_sweep(model, deltas, C, b);

  if (format == Format::json_text) {
    emit(out, serialize::to_json(certs) + "\n");
  } else {
    std::string text = serialize::certificate_csv_header() + "\n";
    for (const seqlab::BadPairCertificate& cert : certs) {
      text += serialize::certificate_csv_row(cert) + "\n";
    }
    emit(out, text);
  }
  return 0;
}

int do_phi_check(const CommonFlags& common, const ModelFlags& model_flags,
                 const CLI::Option* grid_opt, const std::vector<double>& grid_flag) {
  std::vector<double> grid;
  std::string out = common.out_path;

  std::optional<json> cfg;
  if (!common.config_path.empty()) {
    cfg = load_config(common.config_path);
    check_keys(*cfg, "phi-check config",
               {"a_grid", "q", "r", "truncation", "tail_mode", "output_path"});
    if (cfg->contains("a_grid")) grid = need_double_list(*cfg, "a_grid", "phi-check config");
    if (out.empty()) out = opt_string(*cfg, "output_path", "");
  }
  if (grid_opt->count() > 0) grid = grid_flag;
  if (grid.empty()) throw ConfigError("phi-check needs --grid or a config with a_grid");

  const seqlab::PowerLawModel model = model_from(cfg ? &*cfg : nullptr, model_flags);
  const Format format = format_for(out, Format::csv);

  const bool certified = model.tail_mode == seqlab::TailMode::integral_sandwich &&
                         model.has_default_exponents();
  std::string csv = "a,phi,psi,a_phi,phi_lo,phi_hi\n";
  std::string jsn = "[";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double a = grid[i];
    const double phi = seqlab::phi(model, a);
    const double psi = seqlab::psi(a);
    // Without the sandwich certificate the enclosure degenerates to a point:
    // both endpoints report the plain truncated value.
    const Enclosure enc =
        certified ? seqlab::phi_enclosure(model, a) : Enclosure{phi, phi};
    csv += sci(a) + "," + sci(phi) + "," + sci(psi) + "," + sci(a * phi) + "," + sci(enc.lo) +
           "," + sci(enc.hi) + "\n";
    if (i > 0) jsn += ',';
    using serialize::number;
    jsn += "{\"a\":" + number(a) + ",\"phi\":" + number(phi) + ",\"psi\":" + number(psi) +
           ",\"a_phi\":" + number(a * phi) + ",\"phi_lo\":" + number(enc.lo) +
           ",\"phi_hi\":" + number(enc.hi) + "}";
  }
  jsn += "]\n";

  emit(out, format == Format::csv ? csv : jsn);
  return 0;
}

int code_for(const Error& e) {
  if (dynamic_cast<const NoRoot*>(&e) != nullptr) return 3;
  if (dynamic_cast<const BudgetExhausted*>(&e) != nullptr) return 4;
  if (dynamic_cast<const IoError*>(&e) != nullptr) return 5;
  if (dynamic_cast<const TruncationInsufficient*>(&e) != nullptr) return 6;
  if (dynamic_cast<const ConvergenceFailure*>(&e) != nullptr ||
      dynamic_cast<const MaxIterExceeded*>(&e) != nullptr) {
    return 1;
  }
  return 2;  // everything else is a configuration or input problem
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Tikhonov regularization toolkit: discrepancy-principle solvers,\n"
               "convergence studies, and sequence-model diagnostics.\n"
               "REGDP_THREADS caps worker parallelism (default: logical processors)."};
  app.require_subcommand(1);

  CommonFlags solve_common, root_common, lin_common, nonlin_common, cex_common, phi_common;

  // solve
  CLI::App* solve = app.add_subcommand("solve", "Regularized solve at a fixed parameter");
  solve->add_option("--config", solve_common.config_path, "JSON file with A, f_delta, a")
      ->required();
  solve->add_option("--out", solve_common.out_path, "Output file (.csv or .json)");
  double solve_a = 0.0;
  CLI::Option* solve_a_opt =
      solve->add_option("--a", solve_a, "Regularization parameter (overrides config)");

  // dp-root
  CLI::App* dp_root = app.add_subcommand("dp-root", "Solve the discrepancy equation h(a) = C*delta");
  dp_root->add_option("--config", root_common.config_path, "JSON file with A, f_delta, delta")
      ->required();
  dp_root->add_option("--out", root_common.out_path, "Output file (.csv or .json)");
  double root_delta = 0.0, root_C = 1.0;
  CLI::Option* root_delta_opt =
      dp_root->add_option("--delta", root_delta, "Noise level (overrides config)");
  CLI::Option* root_c_opt = dp_root->add_option("--C", root_C, "Discrepancy constant C >= 1");

  // shared study flag bundle builder
  const auto add_study_flags = [](CLI::App* cmd, CommonFlags& common, StudyFlags& flags) {
    cmd->add_option("--config", common.config_path, "JSON study plan");
    cmd->add_option("--out", common.out_path, "Report file (.csv or .json)");
    flags.deltas_opt = cmd->add_option("--deltas", flags.deltas,
                                       "Comma-separated noise levels, strictly decreasing")
                           ->delimiter(',');
    flags.problem_opt = cmd->add_option("--problem", flags.problem, "Problem name");
    flags.seed_opt = cmd->add_option("--seed", flags.seed, "Base noise seed");
    flags.c_opt = cmd->add_option("--C", flags.C, "Discrepancy constant C >= 1");
    flags.ratio_opt = cmd->add_option("--ratio", flags.ratio, "Noise ratio in (0, 1]");
    flags.n_opt = cmd->add_option("--n", flags.n, "Problem size (0 = problem default)");
    flags.rank_opt = cmd->add_option("--rank", flags.rank, "Operator rank (0 = n/2)");
    flags.budget_opt = cmd->add_option("--budget", flags.budget, "Optimizer evaluation budget");
  };

  CLI::App* study_linear =
      app.add_subcommand("study-linear", "Convergence study for the linear solver");
  StudyFlags lin_flags;
  add_study_flags(study_linear, lin_common, lin_flags);

  CLI::App* study_nonlinear =
      app.add_subcommand("study-nonlinear", "Convergence study for the penalized nonlinear solver");
  StudyFlags nonlin_flags;
  add_study_flags(study_nonlinear, nonlin_common, nonlin_flags);

  // counterexample
  CLI::App* cex = app.add_subcommand(
      "counterexample", "Certificates that the discrepancy choice is not uniform in the data");
  StudyFlags cex_flags;
  ModelFlags cex_model;
  cex->add_option("--config", cex_common.config_path, "JSON file with deltas, C, b, model");
  cex->add_option("--out", cex_common.out_path, "Output file (.csv or .json)");
  cex_flags.deltas_opt =
      cex->add_option("--deltas", cex_flags.deltas, "Comma-separated noise levels, strictly decreasing")
          ->delimiter(',');
  cex_flags.c_opt = cex->add_option("--C", cex_flags.C, "Discrepancy constant C >= 1");
  double cex_b = 0.5;
  CLI::Option* cex_b_opt = cex->add_option("--b", cex_b, "Source exponent in (0, 1)");
  cex_model.q_opt = cex->add_option("--q", cex_model.q, "Eigenvalue decay exponent");
  cex_model.r_opt = cex->add_option("--r", cex_model.r, "Data energy decay exponent");
  cex_model.truncation_opt =
      cex->add_option("--truncation", cex_model.truncation, "Series truncation length");
  cex_model.drop_opt =
      cex->add_flag("--drop-tail", cex_model.drop_tail, "Sum literally to the truncation, no tail bracket");

  // phi-check
  CLI::App* phi = app.add_subcommand(
      "phi-check", "Tabulate the model series phi with its companion psi and enclosure");
  ModelFlags phi_model;
  std::vector<double> phi_grid;
  phi->add_option("--config", phi_common.config_path, "JSON file with a_grid and model");
  phi->add_option("--out", phi_common.out_path, "Output file (.csv or .json)");
  CLI::Option* phi_grid_opt =
      phi->add_option("--grid", phi_grid, "Comma-separated a values")->delimiter(',');
  phi_model.q_opt = phi->add_option("--q", phi_model.q, "Eigenvalue decay exponent");
  phi_model.r_opt = phi->add_option("--r", phi_model.r, "Data energy decay exponent");
  phi_model.truncation_opt =
      phi->add_option("--truncation", phi_model.truncation, "Series truncation length");
  phi_model.drop_opt =
      phi->add_flag("--drop-tail", phi_model.drop_tail, "Sum literally to the truncation, no tail bracket");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (solve->parsed()) return do_solve(solve_common, solve_a_opt, solve_a);
    if (dp_root->parsed()) {
      return do_dp_root(root_common, root_delta_opt, root_delta, root_c_opt, root_C);
    }
    if (study_linear->parsed()) return do_study_linear(lin_common, lin_flags);
    if (study_nonlinear->parsed()) return do_study_nonlinear(nonlin_common, nonlin_flags);
    if (cex->parsed()) return do_counterexample(cex_common, cex_model, cex_flags, cex_b_opt, cex_b);
    if (phi->parsed()) return do_phi_check(phi_common, phi_model, phi_grid_opt, phi_grid);
    std::cerr << "error: no command selected\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace cli
}  // namespace regdp
