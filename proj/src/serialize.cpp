#include "regdp/serialize.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "regdp/experiments.hpp"

namespace regdp {

namespace serialize {

namespace {

std::string formatted(const char* fmt, double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, fmt, x);
  return buf;
}

std::string json_array(const Vector& v) {
  std::string out = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) out += ',';
    out += number(v[i]);
  }
  out += ']';
  return out;
}

}  // namespace

std::string number(double x) { return formatted("%.17g", x); }

std::string to_json(const Vector& v) { return json_array(v); }

std::string to_json(const nonlinear::SobolevVector& u) {
  return "{\"n\":" + std::to_string(u.grid.n) + ",\"values\":" + json_array(u.values) + "}";
}

std::string to_json(const tikhonov::RegularizedSolution& sol) {
  return "{\"a\":" + number(sol.a) + ",\"solution_norm\":" + number(sol.solution_norm) +
         ",\"residual_norm\":" + number(sol.residual_norm) +
         ",\"functional_value\":" + number(sol.functional_value) +
         ",\"u\":" + json_array(sol.u) + "}";
}

std::string to_json(const discrepancy::DPResult& root) {
  return "{\"a\":" + number(root.a) + ",\"h_at_a\":" + number(root.h_at_a) +
         ",\"iterations\":" + std::to_string(root.iterations) +
         ",\"bracket_lo\":" + number(root.bracket_lo) +
         ",\"bracket_hi\":" + number(root.bracket_hi) + "}";
}

std::string to_json(const seqlab::BadPairCertificate& cert) {
  return "{\"delta\":" + number(cert.delta) + ",\"C\":" + number(cert.C) +
         ",\"b\":" + number(cert.b) + ",\"a\":" + number(cert.a) +
         ",\"j_star\":" + std::to_string(cert.j_star) + ",\"J\":" + std::to_string(cert.J) +
         ",\"norm_p\":" + number(cert.norm_p) + ",\"norm_Tp\":" + number(cert.norm_Tp) +
         ",\"tp_lower_bound\":" + number(cert.tp_lower_bound) +
         ",\"resid_32\":" + number(cert.resid_32) + ",\"resid_37\":" + number(cert.resid_37) +
         ",\"gap_38\":" + number(cert.gap_38) +
         ",\"gap_lower_bound\":" + number(cert.gap_lower_bound) +
         ",\"dist\":" + number(cert.dist) + ",\"norm_v\":" + number(cert.norm_v) +
         ",\"norm_z\":" + number(cert.norm_z) + "}";
}

std::string to_json(const std::vector<seqlab::BadPairCertificate>& certs) {
  std::string out = "[";
  for (std::size_t i = 0; i < certs.size(); ++i) {
    if (i > 0) out += ',';
    out += to_json(certs[i]);
  }
  out += ']';
  return out;
}

std::string certificate_csv_header() {
  return "delta,C,b,a,j_star,J,norm_p,norm_Tp,tp_lower_bound,resid_32,resid_37,gap_38,"
         "gap_lower_bound,dist,norm_v,norm_z";
}

std::string certificate_csv_row(const seqlab::BadPairCertificate& cert) {
  const auto sci = [](double x) { return formatted("%.16e", x); };
  return sci(cert.delta) + "," + sci(cert.C) + "," + sci(cert.b) + "," + sci(cert.a) + "," +
         std::to_string(cert.j_star) + "," + std::to_string(cert.J) + "," + sci(cert.norm_p) +
         "," + sci(cert.norm_Tp) + "," + sci(cert.tp_lower_bound) + "," + sci(cert.resid_32) +
         "," + sci(cert.resid_37) + "," + sci(cert.gap_38) + "," + sci(cert.gap_lower_bound) +
         "," + sci(cert.dist) + "," + sci(cert.norm_v) + "," + sci(cert.norm_z);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace serialize

namespace experiments {

namespace {

constexpr const char* kReportHeader =
    "delta,a,h_at_a,u_norm,y_norm,error,residual,ineq_17_slack,seed";

double parse_field(const std::string& line, std::size_t& pos, const std::string& path) {
  char* end = nullptr;
  const double v = std::strtod(line.c_str() + pos, &end);
  if (end == line.c_str() + pos) throw IoError("malformed report row in " + path);
  pos = static_cast<std::size_t>(end - line.c_str());
  if (pos < line.size() && line[pos] == ',') ++pos;
  return v;
}

}  // namespace

std::string render_report(const std::vector<StudyRow>& rows, const ReportMeta& meta) {
  if (rows.empty()) throw InvalidPlan("report needs at least one row");

  std::string out;
  out += "# generator: " + meta.generator + "\n";
  out += "# seed: " + std::to_string(meta.seed) + "\n";
  char digest[24];
  std::snprintf(digest, sizeof digest, "%016llx",
                static_cast<unsigned long long>(meta.plan_digest));
  out += std::string("# plan_digest: ") + digest + "\n";
  for (const std::string& note : meta.notes) out += "# note: " + note + "\n";
  out += kReportHeader;
  out += '\n';

  char buf[256];
  for (const StudyRow& r : rows) {
    std::snprintf(buf, sizeof buf,
                  "%.16e,%.16e,%.16e,%.16e,%.16e,%.16e,%.16e,%.16e,%llu\n", r.delta, r.a,
                  r.h_at_a, r.u_norm, r.y_norm, r.error, r.residual, r.ineq_17_slack,
                  static_cast<unsigned long long>(r.seed));
    out += buf;
  }
  return out;
}

void write_report(const std::vector<StudyRow>& rows, const std::string& path,
                  const ReportMeta& meta) {
  serialize::write_text_file(path, render_report(rows, meta));
}

std::vector<StudyRow> parse_report(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open report: " + path);

  std::vector<StudyRow> rows;
  std::string line;
  bool saw_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!saw_header) {
      if (line != kReportHeader) throw IoError("unrecognized report header in " + path);
      saw_header = true;
      continue;
    }
    StudyRow r;
    std::size_t pos = 0;
    r.delta = parse_field(line, pos, path);
    r.a = parse_field(line, pos, path);
    r.h_at_a = parse_field(line, pos, path);
    r.u_norm = parse_field(line, pos, path);
    r.y_norm = parse_field(line, pos, path);
    r.error = parse_field(line, pos, path);
    r.residual = parse_field(line, pos, path);
    r.ineq_17_slack = parse_field(line, pos, path);
    char* end = nullptr;
    r.seed = std::strtoull(line.c_str() + pos, &end, 10);
    if (end == line.c_str() + pos) throw IoError("malformed report row in " + path);
    rows.push_back(r);
  }
  if (!saw_header) throw IoError("report has no header line: " + path);
  return rows;
}

}  // namespace experiments
}  // namespace regdp
