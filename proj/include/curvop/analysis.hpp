#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "curvop/curvature.hpp"
#include "curvop/dilation.hpp"
#include "curvop/fredholm.hpp"

namespace curvop {

using ojson = nlohmann::ordered_json;

struct AnalyzeOptions {
  SequenceOptions seq;
  long long cesaro_n = 100000;
  std::vector<double> radii{0.9, 0.99, 0.999};
  int quad_points = 4096;
  std::optional<std::pair<std::int64_t, std::int64_t>> integral_window;
  int dilation_horizon = 500;  // 0 disables the dilation section
  bool normalize = false;      // dense inputs only: divide by sigma_max
  std::uint64_t seed = 2024;
  bool timing = false;  // timings vary run to run; default reports are
                        // byte-identical for fixed flags and seed
  std::optional<std::string> csv_path;
};

struct AnalyzeResult {
  ojson report;
  int exit_code = 0;  // 0 = verdicts pass or n/a, 1 = a verdict failed
  DefectSequence sequence;
};

// Full report for one operator: every applicable estimator plus the
// theorem-consistency verdicts.  Throws (DomainError/ContractionError) on
// invalid input; the CLI maps that to exit code 2.
AnalyzeResult analyze_operator(const OperatorSpec& spec, const AnalyzeOptions& opt);

// ---- verify suites -----------------------------------------------------------

struct CheckLine {
  std::string name;
  bool pass = false;
  double deviation = 0.0;
  double tol = 0.0;
  std::string note;
};

struct SuiteResult {
  std::string suite;
  std::vector<CheckLine> lines;
  int passes() const;
  int failures() const;
  double worst_deviation() const;
  std::string text() const;  // pass counts + worst deviations + failures
};

const std::vector<std::string>& suite_names();  // prop1 ... additivity, all

// tol_override replaces every check tolerance (the forced-failure hook that
// proves the gate is live).
SuiteResult run_suite(const std::string& suite, std::uint64_t seed,
                      std::optional<double> tol_override);

std::string sequence_csv(const DefectSequence& seq);

}  // namespace curvop
