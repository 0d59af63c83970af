#pragma once

// Forward-backward trial step
//   J(x, gamma, lambda) = x + lambda (prox^W_{gamma g}(x - gamma W^{-1} grad f(x)) - x)
// and the rules that pick (gamma, lambda) on the geometric grids
// {gamma_bar theta^i} and {lambda_bar theta^i}:
//
//   LS1  backtrack gamma until the local descent lemma holds at J
//   LS2  fix gamma, backtrack lambda on the same descent-lemma condition
//   LS3  backtrack gamma until a local Lipschitz bound on the metric gradient holds
//   LS4  fix gamma, backtrack lambda on an Armijo-type decrease of f + g
//   TsengYun  Armijo-type rule with extra (beta / gamma) ||y - x||^2 term
//   Fixed     no backtracking
//
// Each search restarts from the top of its grid unless warm_start is set.
// A residual below -slack (1 + |f(x)|) accepts and one above +slack rejects.
// Inside that band function-value differences are rounding noise, so LS1,
// LS2, LS4 and TsengYun decide with a gradient form of the same inequality
// (one extra gradient evaluation) that convexity makes sufficient. It can
// be up to twice as strict, so there the floors of LS1, LS2 and LS4 halve.
// LS3 accepts anything up to +slack. Any +inf or NaN residual fails and forces
// another backtrack.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "vmfbs/metrics.hpp"
#include "vmfbs/problem.hpp"

namespace vmfbs {

enum class Rule { LS1, LS2, LS3, LS4, TsengYun, Fixed };

std::string to_string(Rule rule);
/// Accepts "LS1".."LS4", "TsengYun"/"tseng-yun", "Fixed"/"fixed".
std::optional<Rule> parse_rule(std::string_view text);

/// True for rules that backtrack on gamma (relaxation chosen a priori).
inline bool searches_gamma(Rule r) { return r == Rule::LS1 || r == Rule::LS3; }

struct LineSearchConfig {
  Rule rule = Rule::LS1;
  double delta = 0.5;
  double theta = 0.5;
  double gamma_bar = 1.0;
  double lambda_bar = 1.0;
  double sigma = 0.5;  // TsengYun only
  double beta = 0.0;   // TsengYun only
  int max_backtracks = 60;
  bool warm_start = false;
  double tol_fixed_point = 1e-12;
  double slack = 1e-14;
  std::optional<double> fixed_gamma;   // Fixed only; overrides the solver schedule
  std::optional<double> fixed_lambda;  // Fixed only

  /// Throws ConfigError when a constant is out of range.
  void validate() const;

  /// delta for the Armijo-type conclusions: 1 - (1 - beta) sigma for TsengYun.
  double effective_delta() const;
};

struct EvalCounters {
  std::size_t f = 0;
  std::size_t grad = 0;
  std::size_t prox = 0;
};

/// Oracle values cached at the current iterate.
struct PointEval {
  Vector x;
  double f = 0.0;
  double g = 0.0;
  Vector grad;

  double objective() const { return f + g; }
};

/// Evaluates f, g and grad f at x. Throws DomainError outside int dom f.
PointEval evaluate_point(const CompositeProblem& problem, std::span<const double> x,
                         EvalCounters* counters = nullptr);

enum class StepTag { accepted, fixed_point, fixed_step };

struct StepOutcome {
  double gamma = 0.0;
  double lambda = 0.0;
  int grid_index = 0;  // exponent i of the searched parameter on its grid
  int backtracks = 0;
  Vector y;       // prox point at the accepted gamma
  Vector x_next;  // x + lambda (y - x)
  double f_next = std::numeric_limits<double>::quiet_NaN();  // f(x_next) if already computed
  StepTag tag = StepTag::accepted;
};

struct SearchContext {
  int start_index = 0;  // first trial is bar * theta^start_index
  EvalCounters* counters = nullptr;
};

struct TrialPoint {
  Vector y;
  Vector x_next;
};

/// y = prox^W_{gamma g}(x - gamma W^{-1} grad f(x)), x_next = x + lambda (y - x).
TrialPoint fb_step(const CompositeProblem& problem, const DiagonalMetric& metric,
                   const PointEval& at, double gamma, double lambda,
                   EvalCounters* counters = nullptr);
TrialPoint fb_step(const CompositeProblem& problem, const DiagonalMetric& metric,
                   std::span<const double> x, double gamma, double lambda);

// Signed condition residuals at a trial (y, gamma, lambda); <= 0 means the
// inequality holds exactly. J = x + lambda (y - x).

/// f(J) - f(x) - <J - x, grad f(x)> - delta / (gamma lambda) ||J - x||_W^2
double descent_lemma_residual(const CompositeProblem& problem, const DiagonalMetric& metric,
                              const PointEval& at, std::span<const double> y, double gamma,
                              double lambda, double delta, EvalCounters* counters = nullptr);

/// ||W^{-1}(grad f(J) - grad f(x))||_W - delta / (gamma lambda) ||J - x||_W
double gradient_lipschitz_residual(const CompositeProblem& problem, const DiagonalMetric& metric,
                                   const PointEval& at, std::span<const double> y, double gamma,
                                   double lambda, double delta, EvalCounters* counters = nullptr);

/// F(J) - F(x) - (1 - delta) lambda (g(y) - g(x) + <y - x, grad f(x)>)
double armijo_residual(const CompositeProblem& problem, const DiagonalMetric& metric,
                       const PointEval& at, std::span<const double> y, double gamma, double lambda,
                       double delta, EvalCounters* counters = nullptr);

/// F(J) - F(x) - sigma lambda (g(y) - g(x) + <y - x, grad f(x)> + beta / gamma ||y - x||_W^2)
double tseng_yun_residual(const CompositeProblem& problem, const DiagonalMetric& metric,
                          const PointEval& at, std::span<const double> y, double gamma,
                          double lambda, double sigma, double beta,
                          EvalCounters* counters = nullptr);

/// g(y) - g(x) + <y - x, grad f(x)> + ||y - x||_W^2 / gamma. Nonpositive for
/// every exact prox point.
double descent_direction_residual(const CompositeProblem& problem, const DiagonalMetric& metric,
                                  const PointEval& at, std::span<const double> y, double gamma);

StepOutcome ls1_search(const CompositeProblem& problem, const DiagonalMetric& metric,
                       const PointEval& at, double lambda, const LineSearchConfig& config,
                       SearchContext ctx = {});

StepOutcome ls2_search(const CompositeProblem& problem, const DiagonalMetric& metric,
                       const PointEval& at, double gamma, const LineSearchConfig& config,
                       SearchContext ctx = {});

StepOutcome ls3_search(const CompositeProblem& problem, const DiagonalMetric& metric,
                       const PointEval& at, double lambda, const LineSearchConfig& config,
                       SearchContext ctx = {});

StepOutcome ls4_search(const CompositeProblem& problem, const DiagonalMetric& metric,
                       const PointEval& at, double gamma, const LineSearchConfig& config,
                       SearchContext ctx = {});

StepOutcome tseng_yun_search(const CompositeProblem& problem, const DiagonalMetric& metric,
                             const PointEval& at, double gamma, const LineSearchConfig& config,
                             SearchContext ctx = {});

/// No search: y at gamma, x_next at lambda.
StepOutcome fixed_step(const CompositeProblem& problem, const DiagonalMetric& metric,
                       const PointEval& at, double gamma, double lambda,
                       const LineSearchConfig& config, EvalCounters* counters = nullptr);

struct DomainSearchResult {
  double gamma = 0.0;
  int grid_index = 0;  // gamma = gamma_start * theta^grid_index
  int backtracks = 0;
};

/// Largest gamma in {gamma_start theta^i} with J(x, gamma, 1) in dom f.
/// Throws SearchFailure after max_backtracks shrinks.
DomainSearchResult domain_search(const CompositeProblem& problem, const DiagonalMetric& metric,
                                 const PointEval& at, double gamma_start, double theta,
                                 int max_backtracks = 60, EvalCounters* counters = nullptr);

}  // namespace vmfbs
