#pragma once

namespace regdp {
namespace cli {

// Full command-line front end. Returns the process exit code:
//   0 success, 2 invalid flags or config, 3 no discrepancy root,
//   4 optimizer budget exhausted (report still written), 5 file I/O failure,
//   6 series truncation too short for the request, 1 anything else.
int run(int argc, const char* const* argv);

}  // namespace cli
}  // namespace regdp
