#include "vmfbs/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "vmfbs/diagnostics.hpp"
#include "vmfbs/errors.hpp"
#include "vmfbs/experiment.hpp"

namespace vmfbs {

namespace {

struct Options {
  std::string spec;
  std::string out;
  std::string fstar;
  std::string rules = "LS1,LS2,LS3,LS4,TsengYun";
  std::size_t horizon = 100;
  std::optional<std::uint64_t> seed;
};

// Writes to --out when given, else to the fallback path, else to stdout.
template <class Fn>
void emit(const std::string& out_flag, const std::optional<std::filesystem::path>& fallback,
          std::ostream& out, Fn&& write) {
  std::filesystem::path target;
  if (!out_flag.empty()) target = out_flag;
  else if (fallback) target = *fallback;
  if (target.empty()) {
    write(out);
    return;
  }
  std::ofstream f(target);
  if (!f) throw ConfigError("cannot write " + target.string());
  write(f);
}

int cmd_solve(const Options& o, std::ostream& out, std::ostream& err) {
  const Experiment ex = load_experiment(o.spec, o.seed);
  const SolveResult res = solve(*ex.problem, ex.x0, ex.solver);
  const bool to_file = !o.out.empty() || ex.trace_path;
  emit(o.out, ex.trace_path, out, [&](std::ostream& s) { write_trace_csv(s, res); });
  std::ostream& log = to_file ? out : err;
  log << "termination: " << to_string(res.termination) << "\n"
      << "iterations: " << res.trace.size() << "\n"
      << "F: " << format_real(res.F_final) << "\n";
  if (ex.solver.record_checks) {
    log << "checks: " << (res.verification.pass ? "pass" : "FAIL") << "\n";
  }
  if (res.termination == Termination::search_failure) {
    err << "search failure: " << res.message << "\n";
    return kExitSearch;
  }
  return kExitOk;
}

int cmd_compare(const Options& o, std::ostream& out, std::ostream&) {
  const Experiment ex = load_experiment(o.spec, o.seed);
  std::vector<Rule> rules;
  std::stringstream ss(o.rules);
  std::string name;
  while (std::getline(ss, name, ',')) {
    const auto r = parse_rule(name);
    if (!r) throw UsageError("--rules: unknown rule '" + name + "'");
    rules.push_back(*r);
  }
  if (rules.empty()) throw UsageError("--rules: empty list");
  std::optional<double> ref;
  if (!o.fstar.empty()) ref = read_scalar_file(o.fstar);
  else if (ex.fstar_path) ref = read_scalar_file(*ex.fstar_path);
  const auto rows = run_compare(ex, rules, ref);
  emit(o.out, std::nullopt, out, [&](std::ostream& s) { write_compare_csv(s, rows); });
  return kExitOk;
}

int cmd_validate_metrics(const Options& o, std::ostream& out, std::ostream&) {
  if (o.horizon == 0) throw UsageError("--horizon must be >= 1");
  const Experiment ex = load_experiment(o.spec, o.seed);
  const auto schedule =
      ex.solver.metrics ? ex.solver.metrics : ConstantSchedule::identity(ex.problem->dimension());
  std::vector<DiagonalMetric> metrics;
  if (schedule->state_dependent()) {
    SolverConfig cfg = ex.solver;
    cfg.metrics = schedule;
    cfg.max_iterations = o.horizon + 1;
    cfg.record_iterates = true;
    cfg.record_checks = false;
    const SolveResult res = solve(*ex.problem, ex.x0, cfg);
    for (const auto& r : res.trace) metrics.emplace_back(r.weights);
  } else {
    for (std::size_t k = 0; k <= o.horizon; ++k) metrics.push_back(schedule->emit(k));
  }
  const H4Report h4 = validate_h4(metrics, kInf);
  const std::span<const DiagonalMetric> first(metrics.data(), std::min(metrics.size(), o.horizon));
  const H5Report h5 = validate_h5(first, kInf);
  emit(o.out, std::nullopt, out, [&](std::ostream& s) {
    s << "k,eta,h4_partial_sum,gap,h5_partial_sum\n";
    double s4 = 0.0, s5 = 0.0;
    for (std::size_t k = 0; k < h5.gaps.size(); ++k) {
      const double eta = k < h4.eta.size() ? h4.eta[k] : 0.0;
      s4 += eta;
      s5 += h5.gaps[k];
      s << k << ',' << format_real(eta) << ',' << format_real(s4) << ',' << format_real(h5.gaps[k])
        << ',' << format_real(s5) << '\n';
    }
  });
  if (!o.out.empty()) {
    out << "H4 partial sum: " << format_real(h4.partial_sum) << "\n"
        << "H5 partial sum: " << format_real(h5.partial_sum) << "\n";
  }
  return kExitOk;
}

int cmd_rate(const Options& o, std::ostream& out, std::ostream& err) {
  const Experiment ex = load_experiment(o.spec, o.seed);
  double f_star;
  if (!o.fstar.empty()) f_star = read_scalar_file(o.fstar);
  else if (ex.fstar_path) f_star = read_scalar_file(*ex.fstar_path);
  else throw UsageError("rate needs --fstar or output.fstar in the spec");
  SolverConfig cfg = ex.solver;
  cfg.record_checks = false;
  const SolveResult res = solve(*ex.problem, ex.x0, cfg);
  const std::vector<double> F = res.objective_values();
  const RateReport rep = estimate_rate(F, f_star);
  emit(o.out, std::nullopt, out, [&](std::ostream& s) {
    s << "k,F,ratio\n";
    for (std::size_t k = 0; k < F.size(); ++k) {
      s << k << ',' << format_real(F[k]) << ',' << format_real(rep.ratio[k]) << '\n';
    }
  });
  std::ostream& log = o.out.empty() ? err : out;
  for (const auto& [K, sup] : rep.tail_sup) log << "sup_{k>=" << K << "}: " << format_real(sup) << "\n";
  if (res.termination == Termination::search_failure) {
    err << "search failure: " << res.message << "\n";
    return kExitSearch;
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Variable-metric forward-backward splitting"};
  app.require_subcommand(1);
  Options o;
  auto spec_opt = [&](CLI::App* sub) { sub->add_option("--spec", o.spec, "Experiment spec (JSON)")->required(); };
  auto seed_opt = [&](CLI::App* sub) { sub->add_option("--seed", o.seed, "Seed for generated problem data"); };

  CLI::App* solve_cmd = app.add_subcommand("solve", "Run one solve and write the trace CSV");
  spec_opt(solve_cmd);
  solve_cmd->add_option("--out", o.out, "Trace CSV path");
  seed_opt(solve_cmd);

  CLI::App* compare_cmd = app.add_subcommand("compare", "Compare line-search rules on one problem");
  spec_opt(compare_cmd);
  compare_cmd->add_option("--rules", o.rules, "Comma-separated rules");
  compare_cmd->add_option("--out", o.out, "Comparison CSV path");
  compare_cmd->add_option("--fstar", o.fstar, "File holding the reference optimal value");
  seed_opt(compare_cmd);

  CLI::App* metrics_cmd = app.add_subcommand("validate-metrics", "Report H4/H5 partial sums");
  spec_opt(metrics_cmd);
  metrics_cmd->add_option("--horizon", o.horizon, "Number of iterations to inspect");
  metrics_cmd->add_option("--out", o.out, "Report CSV path");
  seed_opt(metrics_cmd);

  CLI::App* rate_cmd = app.add_subcommand("rate", "Report k (F(x_k) - F*) and its tail suprema");
  spec_opt(rate_cmd);
  rate_cmd->add_option("--fstar", o.fstar, "File holding the reference optimal value");
  rate_cmd->add_option("--out", o.out, "Rate CSV path");
  seed_opt(rate_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kExitSpec;
  }

  try {
    if (*solve_cmd) return cmd_solve(o, out, err);
    if (*compare_cmd) return cmd_compare(o, out, err);
    if (*metrics_cmd) return cmd_validate_metrics(o, out, err);
    return cmd_rate(o, out, err);
  } catch (const SearchFailure& e) {
    err << "search failure: " << e.what() << "\n";
    return kExitSearch;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitSpec;
  }
}

}  // namespace vmfbs
