#pragma once

// Post-hoc checks on a recorded run: the descent inequality at every prox
// point, the quasi-Fejer inequality against a reference minimizer, stepsize
// floors, and the empirical O(1/k) rate k (F(x_k) - F*).

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "vmfbs/linesearch.hpp"
#include "vmfbs/problem.hpp"
#include "vmfbs/solver.hpp"

namespace vmfbs {

/// Signed per-step residuals (<= 0 is satisfied) and their worst value.
struct CheckReport {
  std::vector<double> residuals;
  double worst = -kInf;
  double tolerance = 0.0;
  bool pass = true;
};

/// g(y_k) - g(x_k) + <y_k - x_k, grad f(x_k)> + ||y_k - x_k||_k^2 / gamma_k <= 0,
/// relative to 1 + |F(x_k)|. Needs record_iterates.
CheckReport check_descent_inequality(const CompositeProblem& problem, const SolveResult& run,
                                     double tolerance = kDescentTolerance);

enum class FejerBranch { H4, H5 };

struct FejerParams {
  FejerBranch branch = FejerBranch::H4;
  double delta = 0.5;  // delta of the sufficient-decrease inequality
  double nu = 1.0;     // global lower metric bound, H5 branch
};

/// |x_{k+1} - x*|^2 <= (1 + eta_k)|x_k - x*|^2 + 2 alpha_k (F* - F(x_{k+1})) + eps_k
/// with metric norms W_{k+1}, W_k (H4) or Euclidean norms (H5). Residuals are
/// relative to 1 + |F(x_k)|. Steps without a following metric and fixed-point
/// rows are skipped. Needs record_iterates.
CheckReport check_quasi_fejer(const CompositeProblem& problem, const SolveResult& run,
                              std::span<const double> x_star, const FejerParams& params,
                              double tolerance = kDescentTolerance);

struct FloorParams {
  double delta = 0.5;
  double theta = 0.5;
  double gamma_bar = 1.0;
  double lambda_bar = 1.0;
  double nu = 1.0;
  double lipschitz = 1.0;
};

struct FloorReport {
  CheckReport check;  // residual_k = floor - searched parameter
  double floor = 0.0;
  double observed_min = kInf;
};

/// Lower bound on the searched parameter:
///   LS1  min(gamma_bar, 2 delta theta nu / (L sup lambda))
///   LS3  min(gamma_bar, delta theta nu / (L sup lambda))
///   LS2, LS4  min(lambda_bar, 2 delta theta nu / (L sup gamma))
/// Throws UsageError for other rules.
FloorReport check_stepsize_floor(Rule rule, std::span<const double> gammas,
                                 std::span<const double> lambdas, const FloorParams& params);
FloorReport check_stepsize_floor(const SolveResult& run, const FloorParams& params);

/// max_k (F_{k+1} - F_k) relative to 1 + |F_k|.
CheckReport check_monotone(std::span<const double> objective_values,
                           double tolerance = kMonotoneTolerance);

/// Worst normalized inline residual over the trace.
CheckReport check_inline(const SolveResult& run, double tolerance = kDescentTolerance);

struct RateReport {
  std::vector<double> ratio;  // k (F(x_k) - F*), k = 0, 1, ...
  std::vector<std::pair<std::size_t, double>> tail_sup;  // (K, sup_{k >= K} ratio)
};

/// Throws UsageError if F* exceeds min_k F(x_k).
RateReport estimate_rate(std::span<const double> objective_values, double f_star,
                         std::span<const std::size_t> tails = {});

/// sup_{k >= K} ratio[k]; -inf when K is past the end.
double tail_sup(std::span<const double> ratio, std::size_t K);

}  // namespace vmfbs
