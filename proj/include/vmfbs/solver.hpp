#pragma once

// Variable-metric forward-backward outer loop:
//   emit W_k -> (general regime: domain search) -> line search -> relax -> stop?
// with a per-iteration trace and inline verification of the inequalities the
// accepted steps must satisfy.

#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vmfbs/linesearch.hpp"
#include "vmfbs/metrics.hpp"
#include "vmfbs/problem.hpp"

namespace vmfbs {

using ParameterSchedule = std::function<double(std::size_t)>;

struct SolverConfig {
  LineSearchConfig linesearch;
  std::shared_ptr<const MetricSchedule> metrics;  // null: identity
  ParameterSchedule lambda_schedule;  // LS1/LS3/Fixed; null: lambda_bar
  ParameterSchedule gamma_schedule;   // LS2/LS4/TsengYun/Fixed; null: gamma_bar
  std::size_t max_iterations = 1000;
  double tol_objective_stall = 0.0;  // 0 disables the stall test
  std::size_t stall_window = 50;
  bool record_checks = true;
  bool record_iterates = false;     // keeps x_k, y_k, x_{k+1}, W_k per row
  std::optional<double> lipschitz;  // overrides f.lipschitz_bound()
};

enum class Termination { fixed_point, max_iter, objective_stall, search_failure };

std::string to_string(Termination t);

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

/// Signed residuals of the inequalities checked at an accepted step,
/// normalized by 1 + |F(x_k)|; <= 0 means satisfied.
struct CheckResiduals {
  double descent = kUnset;              // g(y)-g(x)+<y-x,grad f(x)> + ||y-x||_k^2/gamma
  double sufficient_decrease = kUnset;  // (1-delta)||x+ - x||_k^2 - gamma (F_k - F_{k+1})
  double monotone = kUnset;             // F_{k+1} - F_k
  double descent_lemma = kUnset;        // LS1/LS2 condition at the accepted (gamma, lambda)
  double armijo = kUnset;               // LS4 condition at the accepted (gamma, lambda)
};

struct IterateRecord {
  std::size_t k = 0;
  double F = 0.0;  // F(x_k)
  double gamma = 0.0;
  double lambda = 0.0;
  int backtracks = 0;
  double step_norm = 0.0;          // ||x_{k+1} - x_k||
  double prox_residual = 0.0;      // ||y_k - x_k||_k / gamma_k
  double fixed_point_measure = 0.0;  // ||y_k - x_k||_k / (1 + ||x_k||)
  double domain_gamma = kUnset;    // output of the domain search, general regime only
  StepTag tag = StepTag::accepted;
  double nu = 0.0;  // smallest metric weight
  double mu = 0.0;  // largest metric weight
  EvalCounters evals;  // cumulative after this iteration
  bool checks_recorded = false;
  CheckResiduals checks;
  double check_max_residual = 0.0;
  // Filled only with record_iterates.
  Vector x, y, x_next, weights;
};

struct VerificationReport {
  double worst_descent = -kInf;
  double worst_sufficient_decrease = -kInf;
  double worst_monotone = -kInf;
  double worst_chain = -kInf;  // conditions implied by the accepted rule
  bool pass = true;
};

inline constexpr double kDescentTolerance = 1e-10;
inline constexpr double kChainTolerance = 1e-12;
inline constexpr double kMonotoneTolerance = 1e-12;

struct SolveResult {
  Vector x_final;
  double F_final = 0.0;
  Termination termination = Termination::max_iter;
  std::string message;
  std::vector<IterateRecord> trace;
  VerificationReport verification;
  EvalCounters evals;
  Rule rule = Rule::LS1;
  double delta_used = 0.0;  // delta of the Armijo-type conclusions (implied delta in Fixed mode)

  /// F(x_0), ..., F(x_final).
  std::vector<double> objective_values() const;
};

/// Throws UsageError for an infeasible x0 and ConfigError for invalid
/// settings. Search failures are reported through the result.
SolveResult solve(const CompositeProblem& problem, std::span<const double> x0,
                  const SolverConfig& config);

struct FixedStepReport {
  bool pass = false;
  double bound = 0.0;      // 2 / L
  double sup_ratio = 0.0;  // sup_k gamma_k lambda_k / nu_k
  double margin = 0.0;     // bound - sup_ratio
  double lipschitz = 0.0;
};

/// Checks sup_k gamma_k lambda_k / nu_k < 2 / L over k < horizon.
/// Throws ConfigError when no Lipschitz constant is available.
FixedStepReport fixed_step_validate(const CompositeProblem& problem, const SolverConfig& config,
                                    std::size_t horizon);

/// Termination reason implied by the tail of the trace, if any.
std::optional<Termination> stopping_check(std::span<const IterateRecord> trace,
                                          const SolverConfig& config);

}  // namespace vmfbs
