#pragma once

#include <string>
#include <vector>

#include "regdp/discrepancy.hpp"
#include "regdp/nonlinear.hpp"
#include "regdp/seqlab.hpp"
#include "regdp/tikhonov.hpp"

namespace regdp {
namespace serialize {

// 17 significant digits: enough to round-trip any double exactly.
std::string number(double x);

std::string to_json(const Vector& v);
std::string to_json(const nonlinear::SobolevVector& u);
std::string to_json(const tikhonov::RegularizedSolution& sol);
std::string to_json(const discrepancy::DPResult& root);
std::string to_json(const seqlab::BadPairCertificate& cert);
std::string to_json(const std::vector<seqlab::BadPairCertificate>& certs);

std::string certificate_csv_header();
std::string certificate_csv_row(const seqlab::BadPairCertificate& cert);

// Whole-file write with IoError on any failure; overwrites in place.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace serialize
}  // namespace regdp
