#include "vmfbs/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "vmfbs/errors.hpp"
#include "vmfbs/kernels.hpp"

namespace vmfbs {

namespace {

void add(CheckReport& r, double v) {
  r.residuals.push_back(v);
  if (std::isnan(v)) {
    r.pass = false;
    return;
  }
  r.worst = std::max(r.worst, v);
  if (v > r.tolerance) r.pass = false;
}

void require_iterates(const SolveResult& run) {
  for (const auto& rec : run.trace) {
    if (rec.x.empty() || rec.y.empty() || rec.weights.empty()) {
      throw UsageError("diagnostic needs a run with record_iterates");
    }
  }
}

double euclid_sq_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

}  // namespace

CheckReport check_descent_inequality(const CompositeProblem& problem, const SolveResult& run,
                                     double tolerance) {
  require_iterates(run);
  CheckReport r;
  r.tolerance = tolerance;
  for (const auto& rec : run.trace) {
    const PointEval at = evaluate_point(problem, rec.x);
    const DiagonalMetric metric(rec.weights);
    const double v = descent_direction_residual(problem, metric, at, rec.y, rec.gamma);
    add(r, v / (1.0 + std::abs(at.objective())));
  }
  return r;
}

CheckReport check_quasi_fejer(const CompositeProblem& problem, const SolveResult& run,
                              std::span<const double> x_star, const FejerParams& p,
                              double tolerance) {
  require_iterates(run);
  require_dimension(x_star, problem.dimension(), "x_star");
  if (!(p.delta > 0.0 && p.delta < 1.0)) throw UsageError("Fejer check needs delta in (0, 1)");
  if (p.branch == FejerBranch::H5 && !(p.nu > 0.0)) throw UsageError("H5 branch needs nu > 0");
  const double F_star = eval_objective(problem, x_star);

  // Usable steps: row k accepted and followed by row k+1 (for W_{k+1}).
  const auto& tr = run.trace;
  std::vector<std::size_t> steps;
  for (std::size_t k = 0; k + 1 < tr.size(); ++k) {
    if (tr[k].tag != StepTag::fixed_point) steps.push_back(k);
  }
  std::vector<double> eta(tr.size(), 0.0);
  double gamma_bar = 0.0, eta_bar = 0.0;
  for (std::size_t k : steps) {
    const auto& a = tr[k].weights;
    const auto& b = tr[k + 1].weights;
    if (p.branch == FejerBranch::H4) {
      double ratio = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) ratio = std::max(ratio, b[i] / a[i]);
      eta[k] = std::max(0.0, ratio - 1.0);
    } else {
      eta[k] = (tr[k].mu - tr[k].nu) / p.nu;
    }
    gamma_bar = std::max(gamma_bar, tr[k].gamma);
    eta_bar = std::max(eta_bar, eta[k]);
  }

  CheckReport r;
  r.tolerance = tolerance;
  for (std::size_t k : steps) {
    const IterateRecord& rec = tr[k];
    const double F_k = rec.F;
    const double F_next = eval_objective(problem, rec.x_next);
    const double dF = F_k - F_next;
    double lhs, prev, alpha, eps;
    if (p.branch == FejerBranch::H4) {
      lhs = kernels::weighted_sq_dist(tr[k + 1].weights, rec.x_next, x_star);
      prev = kernels::weighted_sq_dist(rec.weights, rec.x, x_star);
      alpha = rec.gamma * rec.lambda * (1.0 + eta[k]);
      eps = 2.0 * gamma_bar * (1.0 + eta_bar) / (1.0 - p.delta) * dF;
    } else {
      lhs = euclid_sq_dist(rec.x_next, x_star);
      prev = euclid_sq_dist(rec.x, x_star);
      alpha = rec.gamma * rec.lambda / rec.nu;
      eps = 2.0 * gamma_bar / (p.nu * (1.0 - p.delta)) * dF;
    }
    const double rhs = (1.0 + eta[k]) * prev + 2.0 * alpha * (F_star - F_next) + eps;
    add(r, (lhs - rhs) / (1.0 + std::abs(F_k)));
  }
  return r;
}

FloorReport check_stepsize_floor(Rule rule, std::span<const double> gammas,
                                 std::span<const double> lambdas, const FloorParams& p) {
  if (gammas.size() != lambdas.size()) throw UsageError("gamma and lambda series differ in length");
  if (!(p.lipschitz > 0.0) || !(p.nu > 0.0)) throw UsageError("floor needs L > 0 and nu > 0");
  FloorReport out;
  out.check.tolerance = 0.0;
  const auto sup = [](std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s = std::max(s, x);
    return s;
  };
  std::span<const double> searched;
  switch (rule) {
    case Rule::LS1:
      out.floor = std::min(p.gamma_bar, 2.0 * p.delta * p.theta * p.nu / (p.lipschitz * sup(lambdas)));
      searched = gammas;
      break;
    case Rule::LS3:
      out.floor = std::min(p.gamma_bar, p.delta * p.theta * p.nu / (p.lipschitz * sup(lambdas)));
      searched = gammas;
      break;
    case Rule::LS2:
    case Rule::LS4:
      out.floor = std::min(p.lambda_bar, 2.0 * p.delta * p.theta * p.nu / (p.lipschitz * sup(gammas)));
      searched = lambdas;
      break;
    default: throw UsageError("no stepsize floor for rule " + to_string(rule));
  }
  for (double v : searched) {
    out.observed_min = std::min(out.observed_min, v);
    add(out.check, out.floor - v);
  }
  return out;
}

FloorReport check_stepsize_floor(const SolveResult& run, const FloorParams& params) {
  std::vector<double> g, l;
  for (const auto& rec : run.trace) {
    g.push_back(rec.gamma);
    l.push_back(rec.lambda);
  }
  return check_stepsize_floor(run.rule, g, l, params);
}

CheckReport check_monotone(std::span<const double> F, double tolerance) {
  CheckReport r;
  r.tolerance = tolerance;
  for (std::size_t k = 0; k + 1 < F.size(); ++k) add(r, (F[k + 1] - F[k]) / (1.0 + std::abs(F[k])));
  return r;
}

CheckReport check_inline(const SolveResult& run, double tolerance) {
  CheckReport r;
  r.tolerance = tolerance;
  for (const auto& rec : run.trace) {
    if (rec.checks_recorded) add(r, rec.check_max_residual);
  }
  return r;
}

double tail_sup(std::span<const double> ratio, std::size_t K) {
  double s = -kInf;
  for (std::size_t k = K; k < ratio.size(); ++k) s = std::max(s, ratio[k]);
  return s;
}

RateReport estimate_rate(std::span<const double> F, double f_star,
                         std::span<const std::size_t> tails) {
  if (F.empty()) throw UsageError("rate estimate needs a non-empty objective sequence");
  if (!std::isfinite(f_star)) throw UsageError("F* must be finite");
  const double lowest = *std::min_element(F.begin(), F.end());
  if (f_star > lowest) {
    throw UsageError("F* exceeds the smallest recorded objective value");
  }
  RateReport r;
  r.ratio.reserve(F.size());
  for (std::size_t k = 0; k < F.size(); ++k) r.ratio.push_back(static_cast<double>(k) * (F[k] - f_star));
  std::vector<std::size_t> Ks(tails.begin(), tails.end());
  if (Ks.empty()) {
    for (std::size_t K = 10; K < F.size(); K *= 10) Ks.push_back(K);
  }
  for (std::size_t K : Ks) r.tail_sup.emplace_back(K, tail_sup(r.ratio, K));
  return r;
}

}  // namespace vmfbs
