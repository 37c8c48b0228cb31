// curvop: curvature, index, and dilation analysis of contraction operators.
//
// Subcommands:
//   analyze  <spec.json>   full report (JSON on stdout), exit 0/1/2
//   verify   <suite>       invariant suites over the built-in corpus
//   sequence <spec.json>   defect sequence a_n as CSV
//   example  <name>        emit a named operator spec

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "curvop/analysis.hpp"
#include "curvop/corpus.hpp"
#include "curvop/errors.hpp"
#include "curvop/specfile.hpp"

namespace {

int run_analyze(const std::string& path, const curvop::AnalyzeOptions& opt) {
  const curvop::OperatorSpec spec = curvop::load_spec_file(path);
  const curvop::AnalyzeResult res = curvop::analyze_operator(spec, opt);
  std::cout << res.report.dump(2) << "\n";
  return res.exit_code;
}

int run_verify(const std::string& suite, std::uint64_t seed, double tolerance) {
  std::optional<double> tol;
  if (tolerance > 0.0) tol = tolerance;
  const curvop::SuiteResult res = curvop::run_suite(suite, seed, tol);
  std::cout << res.text();
  return res.failures() == 0 ? 0 : 1;
}

int run_sequence(const std::string& path, const curvop::SequenceOptions& sopt,
                 const std::string& csv_path) {
  const curvop::OperatorSpec spec = curvop::load_spec_file(path);
  const curvop::OperatorContext ctx = curvop::make_context(spec);
  const curvop::DefectSequence seq = curvop::defect_sequence(ctx, sopt);
  const std::string csv = curvop::sequence_csv(seq);
  if (csv_path.empty() || csv_path == "-") {
    std::cout << csv;
  } else {
    std::ofstream out(csv_path);
    if (!out) throw curvop::DomainError("cannot open CSV output '" + csv_path + "'");
    out << csv;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"curvature invariant laboratory for single contraction operators"};
  app.require_subcommand(1);

  // analyze
  std::string analyze_path;
  curvop::AnalyzeOptions aopt;
  std::string csv_path;
  double win_lo = 0, win_hi = 0;
  bool have_window = false;
  auto* analyze = app.add_subcommand("analyze", "full report for one operator spec");
  analyze->add_option("path", analyze_path, "operator spec JSON ('-' = stdin)")->required();
  analyze->add_option("--n-max", aopt.seq.n_max, "defect sequence cap");
  analyze->add_option("--eps", aopt.seq.eps, "defect sequence stopping drop");
  analyze->add_option("--conv-window", aopt.seq.window, "stopping window width");
  analyze->add_option("--cesaro-n", aopt.cesaro_n, "Cesaro horizon");
  analyze->add_option("--radii", aopt.radii, "integral radii in (0,1)");
  analyze->add_option("--quad-points", aopt.quad_points, "quadrature nodes (power of two)");
  analyze->add_option("--dilation-horizon", aopt.dilation_horizon,
                      "affinity horizon (0 disables the dilation section)");
  analyze->add_option("--csv", csv_path, "write the defect sequence as CSV");
  analyze->add_flag("--normalize", aopt.normalize, "rescale a dense near-contraction");
  analyze->add_option("--seed", aopt.seed, "seed for sampled verdicts");
  analyze->add_flag("--timing", aopt.timing, "include timings (breaks byte determinism)");
  auto* wlo = analyze->add_option("--window-lo", win_lo, "integral window low index");
  auto* whi = analyze->add_option("--window-hi", win_hi, "integral window high index");
  wlo->needs(whi);
  whi->needs(wlo);

  // verify
  std::string suite;
  std::uint64_t verify_seed = 2024;
  double tolerance = -1.0;
  auto* verify = app.add_subcommand("verify", "run an invariant suite over the corpus");
  verify->add_option("suite", suite, "prop1|thm2|cesaro|thm4|dilation|reciprocity|additivity|all")
      ->required();
  verify->add_option("--seed", verify_seed, "seed for the randomized corpus entries");
  verify->add_option("--tolerance", tolerance, "override every check tolerance");

  // sequence
  std::string seq_path, seq_csv;
  curvop::SequenceOptions sopt;
  auto* sequence = app.add_subcommand("sequence", "emit the defect sequence a_n as CSV");
  sequence->add_option("path", seq_path, "operator spec JSON ('-' = stdin)")->required();
  sequence->add_option("--n-max", sopt.n_max, "sequence cap");
  sequence->add_option("--eps", sopt.eps, "stopping drop");
  sequence->add_option("--conv-window", sopt.window, "stopping window width");
  sequence->add_option("--csv", seq_csv, "output file (default stdout)");

  // example
  std::string name;
  double kappa = 0.25;
  int m = 2, n = 4, dim = 8;
  std::uint64_t ex_seed = 1;
  std::string out_path;
  auto* example = app.add_subcommand("example", "emit a named operator spec");
  example->add_option("name", name,
                      "kappa_example|unilateral_shift|shift_power|backward_shift|"
                      "jordan_nilpotent|dft_unitary|random_contraction")
      ->required();
  example->add_option("--kappa", kappa, "kappa_example parameter");
  example->add_option("--m", m, "shift_power exponent");
  example->add_option("--n", n, "jordan_nilpotent / dft_unitary dimension");
  example->add_option("--dim", dim, "random_contraction dimension");
  example->add_option("--seed", ex_seed, "random_contraction seed");
  example->add_option("-o,--output", out_path, "output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*analyze) {
      if (!csv_path.empty()) aopt.csv_path = csv_path;
      if (wlo->count() && whi->count()) {
        aopt.integral_window = {static_cast<std::int64_t>(win_lo),
                                static_cast<std::int64_t>(win_hi)};
        have_window = true;
      }
      (void)have_window;
      return run_analyze(analyze_path, aopt);
    }
    if (*verify) return run_verify(suite, verify_seed, tolerance);
    if (*sequence) return run_sequence(seq_path, sopt, seq_csv);
    if (*example) {
      curvop::ojson params = curvop::ojson::object();
      if (name == "kappa_example") params["kappa"] = kappa;
      if (name == "shift_power") params["m"] = m;
      if (name == "jordan_nilpotent" || name == "dft_unitary") params["n"] = n;
      if (name == "random_contraction") {
        params["dim"] = dim;
        params["seed"] = static_cast<long long>(ex_seed);
      }
      const curvop::OperatorSpec spec = curvop::build_named(name, params);
      const std::string text = curvop::canonical_spec_string(spec) + "\n";
      if (out_path.empty()) {
        std::cout << text;
      } else {
        std::ofstream out(out_path);
        if (!out) throw curvop::DomainError("cannot open output '" + out_path + "'");
        out << text;
      }
      return 0;
    }
  } catch (const curvop::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
