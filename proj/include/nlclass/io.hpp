#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include "nlclass/bounds.hpp"
#include "nlclass/lmi.hpp"
#include "nlclass/model.hpp"

namespace nlclass {

// System file: one `key = value` per line in the fixed order
//   n, m, p, g, A, B, C, G, f, omega
// where every value is JSON: integers for dimensions, row-major nested arrays
// for matrices, a list of expression strings for f and a list of [lo, hi]
// pairs (states then inputs) for omega. Blank lines and lines starting with
// '#' are ignored. Errors are InputError with the offending field path.
SystemModel read_system(std::istream& in);
SystemModel load_system(const std::string& path);
void write_system(std::ostream& out, const SystemModel& model);

// Flat `name = value` document with '#' comments. Duplicate keys and lines
// without '=' are InputErrors.
using KeyValues = std::map<std::string, std::string>;
KeyValues read_key_values(std::istream& in);
KeyValues load_key_values(const std::string& path);

double get_number(const KeyValues& kv, const std::string& key);
bool has_key(const KeyValues& kv, const std::string& key);

// %.17g, with -0 printed as 0.
std::string format_double(double v);

struct ReportContext {
  std::string system;   // source path, as given
  double tol = 0.0;
  std::size_t max_boxes = 0;
  double max_seconds = 0.0;
  std::size_t budget = 0;
  std::string method;   // as requested (may be "all")
  bool has_expected_q2 = false;
  double expected_q2 = 0.0;
};

void write_report(std::ostream& out, const GammaReport& rep, const ReportContext& ctx);

// The printed value is consistent with q2 = eps2 - eps1 when it matches to
// 1e-9 relative.
bool q2_consistent(double printed, double eps1, double eps2);

void write_gain(std::ostream& out, const LmiProblem& problem, const LmiSolution& sol);
// Reads `L` and checks it is rows x cols.
Matrix read_gain(const KeyValues& kv, std::size_t rows, std::size_t cols);

}  // namespace nlclass
