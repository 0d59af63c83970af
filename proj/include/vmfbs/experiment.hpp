#pragma once

// Experiment specification files (JSON) and trace serialization.
//
// {
//   "problem": {
//     "smooth": {"type": "quadratic" | "pnorm" | "kl", "p": 4,
//                "A": [[...], ...] | "identity" | "A_file": "path",
//                "b": [...] | "b_file": "path"},
//     "random": {"rows": m, "cols": n, "seed": s},      // instead of A/b
//     "regularizer": {"type": "l1", "weight": w} | {"type": "box", "lo": l, "hi": h}
//                  | {"type": "tv1d", "weight": w, "lo": l, "hi": h}
//                  | {"type": "separable", "l1": w, "lo": l, "hi": h}
//                  | {"type": "sum", "terms": [...separable terms...]} | {"type": "zero"},
//     "x0": [...], "regime": "standard" | "general"
//   },
//   "solver": {"rule": "LS1", "delta": 0.5, "theta": 0.5, "gamma_bar": 1, "lambda_bar": 1,
//              "sigma": 0.5, "beta": 0, "gamma": g, "lambda": l,
//              "gamma_schedule": 1 | [...], "lambda_schedule": 1 | [...],
//              "metric": {...}, "max_iter": 1000, "max_backtracks": 60, "warm_start": false,
//              "tol_fixed_point": 1e-12, "tol_stall": 0, "stall_window": 50, "lipschitz": L},
//   "output": {"trace": "path", "checks": true, "fstar": "path", "compare_tol": 1e-8}
// }
//
// Weight, bound and l1 entries take a number or a per-coordinate array; bounds
// accept null or "inf"/"-inf". Relative paths resolve against the spec file.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vmfbs/problem.hpp"
#include "vmfbs/solver.hpp"

namespace vmfbs {

struct Experiment {
  std::shared_ptr<const CompositeProblem> problem;
  Vector x0;
  SolverConfig solver;
  std::optional<std::filesystem::path> trace_path;
  std::optional<std::filesystem::path> fstar_path;
  double compare_tol = 1e-8;
};

/// Throws ConfigError on schema violations (unknown keys included) and on
/// unreadable data files. seed overrides any seed given in the file.
Experiment parse_experiment(const std::string& json_text, const std::filesystem::path& base_dir,
                            std::optional<std::uint64_t> seed = std::nullopt);
Experiment load_experiment(const std::filesystem::path& spec_path,
                           std::optional<std::uint64_t> seed = std::nullopt);

/// Whitespace-delimited numbers; one matrix row per non-empty line.
std::vector<Vector> read_numeric_file(const std::filesystem::path& path);

/// %.17g
std::string format_real(double v);

struct TraceRow {
  std::size_t k = 0;
  double F = 0.0;
  double gamma = 0.0;
  double lambda = 0.0;
  int backtracks = 0;
  double step_norm = 0.0;
  double check_max_residual = 0.0;
};

inline constexpr const char* kTraceHeader = "k,F,gamma,lambda,backtracks,step_norm,check_max_residual";

void write_trace_csv(std::ostream& out, const SolveResult& result);
/// Throws ConfigError on a malformed file.
std::vector<TraceRow> read_trace_csv(std::istream& in);
std::vector<TraceRow> trace_rows(const SolveResult& result);

struct CompareRow {
  Rule rule = Rule::LS1;
  bool ok = false;
  std::string termination;  // or the error message when !ok
  std::size_t iterations = 0;
  std::optional<std::size_t> iterations_to_tol;
  double F_final = 0.0;
  EvalCounters evals;
  double min_searched = 0.0;  // smallest accepted gamma (LS1/LS3) or lambda (others)
};

/// Runs each rule on the same problem; rows follow the input order.
/// F_ref defaults to the smallest final objective over successful rows.
std::vector<CompareRow> run_compare(const Experiment& ex, const std::vector<Rule>& rules,
                                    std::optional<double> F_ref = std::nullopt);
void write_compare_csv(std::ostream& out, const std::vector<CompareRow>& rows);

/// First number in a whitespace-delimited file.
double read_scalar_file(const std::filesystem::path& path);

}  // namespace vmfbs
