#include "vmfbs/linesearch.hpp"

#include <cmath>
#include <string>

#include "vmfbs/errors.hpp"
#include "vmfbs/kernels.hpp"

namespace vmfbs {
namespace {

void count_f(EvalCounters* c) {
  if (c) ++c->f;
}
void count_grad(EvalCounters* c) {
  if (c) ++c->grad;
}
void count_prox(EvalCounters* c) {
  if (c) ++c->prox;
}

double grid_value(double bar, double theta, int i) { return bar * std::pow(theta, i); }

Vector diff(std::span<const double> a, std::span<const double> b) {
  Vector d(a.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

Vector relax(std::span<const double> x, std::span<const double> y, double lambda) {
  Vector out(x.size());
  kernels::lerp(x, y, lambda, out);
  return out;
}

// Residuals built from function values lose everything below eps |f| to
// cancellation once the trial step is tiny. When the residual sits inside the
// slack band and the model term it compares against is itself not far above
// the band, the decision falls to `exact`: a gradient form that implies the
// same condition without subtracting function values.
template <typename Exact>
bool satisfied(double residual, double model, const PointEval& at, const LineSearchConfig& cfg,
               Exact&& exact) {
  // NaN compares false, so undefined residuals fail.
  const double band = cfg.slack * (1.0 + std::abs(at.f));
  if (residual <= -band) return true;
  if (!(residual <= band)) return false;
  if (std::abs(model) > 100.0 * band) return true;
  return exact() <= 0.0;
}

bool satisfied(double residual, const PointEval& at, const LineSearchConfig& cfg) {
  return residual <= cfg.slack * (1.0 + std::abs(at.f));
}

Vector prox_point(const CompositeProblem& problem, const DiagonalMetric& metric,
                  const PointEval& at, double gamma, EvalCounters* counters) {
  Vector forward(at.x.size());
  kernels::scaled_step(at.x, at.grad, metric.weights(), gamma, forward);
  count_prox(counters);
  return metric_prox(problem.g(), metric, forward, gamma);
}

bool is_fixed_point(const DiagonalMetric& metric, const PointEval& at, std::span<const double> y,
                    const LineSearchConfig& cfg) {
  const double step = std::sqrt(kernels::weighted_sq_dist(metric.weights(), y, at.x));
  const double xn = std::sqrt(kernels::dot(at.x, at.x));
  return step <= cfg.tol_fixed_point * (1.0 + xn);
}

// Linearized model slope g(y) - g(x) + <y - x, grad f(x)>.
double model_slope(const CompositeProblem& problem, const PointEval& at,
                   std::span<const double> y, double* g_y = nullptr) {
  if (g_y) *g_y = problem.g().value(y);
  const Vector d = diff(y, at.x);
  return problem.g().difference(at.x, y) + kernels::dot(d, at.grad);
}

[[noreturn]] void fail(const std::string& rule, int backtracks, double last) {
  throw SearchFailure(rule + " line search exceeded max_backtracks (" + std::to_string(backtracks) +
                          " backtracks, last trial " + std::to_string(last) + ")",
                      backtracks, last);
}

void check_common(const PointEval& at, const DiagonalMetric& metric) {
  if (at.grad.size() != at.x.size() || metric.dimension() != at.x.size()) {
    throw UsageError("line search: point, gradient and metric dimensions differ");
  }
}

void check_lambda(double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0)) throw ConfigError("relaxation lambda must lie in (0, 1]");
}

void check_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ConfigError("stepsize gamma must be > 0");
}

// Shared driver for the gamma-searching rules (LS1, LS3).
template <typename Condition>
StepOutcome search_gamma(const CompositeProblem& problem, const DiagonalMetric& metric,
                         const PointEval& at, double lambda, const LineSearchConfig& cfg,
                         SearchContext ctx, const char* rule, Condition&& condition) {
  check_common(at, metric);
  check_lambda(lambda);
  double gamma = 0.0;
  for (int b = 0; b <= cfg.max_backtracks; ++b) {
    const int i = ctx.start_index + b;
    gamma = grid_value(cfg.gamma_bar, cfg.theta, i);
    Vector y = prox_point(problem, metric, at, gamma, ctx.counters);
    if (b == 0 && is_fixed_point(metric, at, y, cfg)) {
      StepOutcome out;
      out.gamma = gamma;
      out.lambda = lambda;
      out.grid_index = i;
      out.x_next = at.x;
      out.y = std::move(y);
      out.tag = StepTag::fixed_point;
      return out;
    }
    double f_next = StepOutcome{}.f_next;
    if (condition(y, gamma, f_next)) {
      StepOutcome out;
      out.gamma = gamma;
      out.lambda = lambda;
      out.grid_index = i;
      out.backtracks = b;
      out.x_next = relax(at.x, y, lambda);
      out.y = std::move(y);
      out.f_next = f_next;
      return out;
    }
  }
  fail(rule, cfg.max_backtracks, gamma);
}

// Shared driver for the lambda-searching rules (LS2, LS4, TsengYun).
template <typename Condition>
StepOutcome search_lambda(const CompositeProblem& problem, const DiagonalMetric& metric,
                          const PointEval& at, double gamma, const LineSearchConfig& cfg,
                          SearchContext ctx, const char* rule, Condition&& condition) {
  check_common(at, metric);
  check_gamma(gamma);
  Vector y = prox_point(problem, metric, at, gamma, ctx.counters);
  if (is_fixed_point(metric, at, y, cfg)) {
    StepOutcome out;
    out.gamma = gamma;
    out.lambda = grid_value(cfg.lambda_bar, cfg.theta, ctx.start_index);
    out.grid_index = ctx.start_index;
    out.x_next = at.x;
    out.y = std::move(y);
    out.tag = StepTag::fixed_point;
    return out;
  }
  double lambda = 0.0;
  for (int b = 0; b <= cfg.max_backtracks; ++b) {
    const int i = ctx.start_index + b;
    lambda = grid_value(cfg.lambda_bar, cfg.theta, i);
    double f_next = StepOutcome{}.f_next;
    if (condition(y, lambda, f_next)) {
      StepOutcome out;
      out.gamma = gamma;
      out.lambda = lambda;
      out.grid_index = i;
      out.backtracks = b;
      out.x_next = relax(at.x, y, lambda);
      out.y = std::move(y);
      out.f_next = f_next;
      return out;
    }
  }
  fail(rule, cfg.max_backtracks, lambda);
}

double descent_lemma_impl(const CompositeProblem& problem, const DiagonalMetric& metric,
                          const PointEval& at, std::span<const double> y, double gamma,
                          double lambda, double delta, EvalCounters* counters, double* f_out,
                          double* model_out = nullptr) {
  const Vector j = relax(at.x, y, lambda);
  count_f(counters);
  const double fj = problem.f().value(j);
  if (f_out) *f_out = fj;
  if (fj == kInf) return kInf;
  const Vector d = diff(j, at.x);
  const double lin = kernels::dot(d, at.grad);
  const double model = delta / (gamma * lambda) * kernels::weighted_sq_norm(metric.weights(), d);
  if (model_out) *model_out = model;
  return fj - at.f - lin - model;
}

double objective_change(const CompositeProblem& problem, const PointEval& at,
                        std::span<const double> j, EvalCounters* counters, double* f_out) {
  count_f(counters);
  const double gj = problem.g().value(j);
  const double fj = gj == kInf ? kInf : problem.f().value(j);
  if (f_out) *f_out = fj;
  if (fj == kInf || gj == kInf) return kInf;
  return (fj - at.f) + problem.g().difference(at.x, j);
}

// <J - x, grad f(J) - grad f(x)> - delta / (gamma lambda) ||J - x||_W^2.
// For convex f it bounds the descent-lemma residual from above. Combined with
// g(J) <= (1 - lambda) g(x) + lambda g(y) and the prox inequality
// g(y) - g(x) + <y - x, grad f(x)> <= -||y - x||_W^2 / gamma, a nonpositive
// value also gives the Armijo condition with the same delta, and the
// Tseng-Yun condition with delta = 1 - (1 - beta) sigma.
double descent_lemma_gradient_form(const CompositeProblem& problem, const DiagonalMetric& metric,
                                   const PointEval& at, std::span<const double> j, double gamma,
                                   double lambda, double delta, EvalCounters* counters) {
  if (!problem.f().in_interior_domain(j)) return kInf;
  count_grad(counters);
  const Vector gj = problem.f().gradient(j);
  const Vector d = diff(j, at.x);
  const Vector dg = diff(gj, at.grad);
  return kernels::dot(d, dg) -
         delta / (gamma * lambda) * kernels::weighted_sq_norm(metric.weights(), d);
}

}  // namespace

std::string to_string(Rule rule) {
  switch (rule) {
    case Rule::LS1: return "LS1";
    case Rule::LS2: return "LS2";
    case Rule::LS3: return "LS3";
    case Rule::LS4: return "LS4";
    case Rule::TsengYun: return "TsengYun";
    case Rule::Fixed: return "Fixed";
  }
  return "?";
}

std::optional<Rule> parse_rule(std::string_view text) {
  if (text == "LS1" || text == "ls1") return Rule::LS1;
  if (text == "LS2" || text == "ls2") return Rule::LS2;
  if (text == "LS3" || text == "ls3") return Rule::LS3;
  if (text == "LS4" || text == "ls4") return Rule::LS4;
  if (text == "TsengYun" || text == "tseng-yun" || text == "TY") return Rule::TsengYun;
  if (text == "Fixed" || text == "fixed") return Rule::Fixed;
  return std::nullopt;
}

void LineSearchConfig::validate() const {
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  if (!(theta > 0.0 && theta < 1.0)) throw ConfigError("theta must lie in (0, 1)");
  if (!(gamma_bar > 0.0) || !std::isfinite(gamma_bar)) throw ConfigError("gamma_bar must be > 0");
  if (!(lambda_bar > 0.0 && lambda_bar <= 1.0)) throw ConfigError("lambda_bar must lie in (0, 1]");
  if (max_backtracks < 1) throw ConfigError("max_backtracks must be >= 1");
  if (!(tol_fixed_point >= 0.0)) throw ConfigError("tol_fixed_point must be >= 0");
  if (!(slack >= 0.0)) throw ConfigError("slack must be >= 0");
  if (rule == Rule::TsengYun) {
    if (!(sigma > 0.0 && sigma <= 1.0)) throw ConfigError("sigma must lie in (0, 1]");
    if (!(beta >= 0.0 && beta <= 1.0)) throw ConfigError("beta must lie in [0, 1]");
    const double s = (1.0 - beta) * sigma;
    if (!(s > 0.0 && s < 1.0)) throw ConfigError("Tseng-Yun constants need 0 < (1 - beta) sigma < 1");
  }
  if (fixed_gamma && !(*fixed_gamma > 0.0)) throw ConfigError("fixed gamma must be > 0");
  if (fixed_lambda && !(*fixed_lambda > 0.0 && *fixed_lambda <= 1.0)) {
    throw ConfigError("fixed lambda must lie in (0, 1]");
  }
}

double LineSearchConfig::effective_delta() const {
  if (rule == Rule::TsengYun) return 1.0 - (1.0 - beta) * sigma;
  return delta;
}

PointEval evaluate_point(const CompositeProblem& problem, std::span<const double> x,
                         EvalCounters* counters) {
  PointEval p;
  p.x.assign(x.begin(), x.end());
  p.grad = eval_gradient(problem, x);
  count_grad(counters);
  count_f(counters);
  p.f = problem.f().value(x);
  p.g = problem.g().value(x);
  return p;
}

TrialPoint fb_step(const CompositeProblem& problem, const DiagonalMetric& metric,
                   const PointEval& at, double gamma, double lambda, EvalCounters* counters) {
  check_common(at, metric);
  check_gamma(gamma);
  check_lambda(lambda);
  TrialPoint t;
  t.y = prox_point(problem, metric, at, gamma, counters);
  t.x_next = relax(at.x, t.y, lambda);
  return t;
}

TrialPoint fb_step(const CompositeProblem& problem, const DiagonalMetric& metric,
                   std::span<const double> x, double gamma, double lambda) {
  return fb_step(problem, metric, evaluate_point(problem, x), gamma, lambda);
}

double descent_lemma_residual(const CompositeProblem& problem, const DiagonalMetric& metric,
                              const PointEval& at, std::span<const double> y, double gamma,
                              double lambda, double delta, EvalCounters* counters) {
  return descent_lemma_impl(problem, metric, at, y, gamma, lambda, delta, counters, nullptr);
}

double gradient_lipschitz_residual(const CompositeProblem& problem, const DiagonalMetric& metric,
                                   const PointEval& at, std::span<const double> y, double gamma,
                                   double lambda, double delta, EvalCounters* counters) {
  const Vector j = relax(at.x, y, lambda);
  if (!problem.f().in_interior_domain(j)) return kInf;
  count_grad(counters);
  const Vector gj = problem.f().gradient(j);
  const double lhs = std::sqrt(kernels::inv_weighted_sq_dist(metric.weights(), gj, at.grad));
  const double step = std::sqrt(kernels::weighted_sq_dist(metric.weights(), j, at.x));
  return lhs - delta / (gamma * lambda) * step;
}

double armijo_residual(const CompositeProblem& problem, const DiagonalMetric& metric,
                       const PointEval& at, std::span<const double> y, double /*gamma*/,
                       double lambda, double delta, EvalCounters* counters) {
  (void)metric;
  const Vector j = relax(at.x, y, lambda);
  const double change = objective_change(problem, at, j, counters, nullptr);
  if (change == kInf) return kInf;
  return change - (1.0 - delta) * lambda * model_slope(problem, at, y);
}

double tseng_yun_residual(const CompositeProblem& problem, const DiagonalMetric& metric,
                          const PointEval& at, std::span<const double> y, double gamma,
                          double lambda, double sigma, double beta, EvalCounters* counters) {
  const Vector j = relax(at.x, y, lambda);
  const double change = objective_change(problem, at, j, counters, nullptr);
  if (change == kInf) return kInf;
  const double sq = kernels::weighted_sq_dist(metric.weights(), y, at.x);
  return change - sigma * lambda * (model_slope(problem, at, y) + beta / gamma * sq);
}

double descent_direction_residual(const CompositeProblem& problem, const DiagonalMetric& metric,
                                  const PointEval& at, std::span<const double> y, double gamma) {
  const double sq = kernels::weighted_sq_dist(metric.weights(), y, at.x);
  return model_slope(problem, at, y) + sq / gamma;
}

StepOutcome ls1_search(const CompositeProblem& problem, const DiagonalMetric& metric,
                       const PointEval& at, double lambda, const LineSearchConfig& config,
                       SearchContext ctx) {
  return search_gamma(problem, metric, at, lambda, config, ctx, "LS1",
                      [&](const Vector& y, double gamma, double& f_next) {
                        double model = 0.0;
                        const double r = descent_lemma_impl(problem, metric, at, y, gamma, lambda,
                                                            config.delta, ctx.counters, &f_next, &model);
                        return satisfied(r, model, at, config, [&] {
                          return descent_lemma_gradient_form(problem, metric, at,
                                                             relax(at.x, y, lambda), gamma, lambda,
                                                             config.delta, ctx.counters);
                        });
                      });
}

StepOutcome ls3_search(const CompositeProblem& problem, const DiagonalMetric& metric,
                       const PointEval& at, double lambda, const LineSearchConfig& config,
                       SearchContext ctx) {
  return search_gamma(problem, metric, at, lambda, config, ctx, "LS3",
                      [&](const Vector& y, double gamma, double&) {
                        const double r = gradient_lipschitz_residual(
                            problem, metric, at, y, gamma, lambda, config.delta, ctx.counters);
                        return satisfied(r, at, config);
                      });
}

StepOutcome ls2_search(const CompositeProblem& problem, const DiagonalMetric& metric,
                       const PointEval& at, double gamma, const LineSearchConfig& config,
                       SearchContext ctx) {
  return search_lambda(problem, metric, at, gamma, config, ctx, "LS2",
                       [&](const Vector& y, double lambda, double& f_next) {
                         double model = 0.0;
                         const double r = descent_lemma_impl(problem, metric, at, y, gamma, lambda,
                                                             config.delta, ctx.counters, &f_next, &model);
                         return satisfied(r, model, at, config, [&] {
                           return descent_lemma_gradient_form(problem, metric, at,
                                                              relax(at.x, y, lambda), gamma,
                                                              lambda, config.delta, ctx.counters);
                         });
                       });
}

StepOutcome ls4_search(const CompositeProblem& problem, const DiagonalMetric& metric,
                       const PointEval& at, double gamma, const LineSearchConfig& config,
                       SearchContext ctx) {
  double slope = 0.0;
  bool have_slope = false;
  return search_lambda(problem, metric, at, gamma, config, ctx, "LS4",
                       [&](const Vector& y, double lambda, double& f_next) {
                         if (!have_slope) {
                           slope = model_slope(problem, at, y);
                           have_slope = true;
                         }
                         const Vector j = relax(at.x, y, lambda);
                         const double change = objective_change(problem, at, j, ctx.counters,
                                                                &f_next);
                         const double scaled = (1.0 - config.delta) * lambda * slope;
                         return satisfied(change - scaled, scaled, at, config, [&] {
                           return descent_lemma_gradient_form(problem, metric, at, j, gamma,
                                                              lambda, config.delta, ctx.counters);
                         });
                       });
}

StepOutcome tseng_yun_search(const CompositeProblem& problem, const DiagonalMetric& metric,
                             const PointEval& at, double gamma, const LineSearchConfig& config,
                             SearchContext ctx) {
  double rhs_unit = 0.0;
  bool have_rhs = false;
  return search_lambda(
      problem, metric, at, gamma, config, ctx, "TsengYun",
      [&](const Vector& y, double lambda, double& f_next) {
        if (!have_rhs) {
          const double sq = kernels::weighted_sq_dist(metric.weights(), y, at.x);
          rhs_unit = model_slope(problem, at, y) + config.beta / gamma * sq;
          have_rhs = true;
        }
        const Vector j = relax(at.x, y, lambda);
        const double change = objective_change(problem, at, j, ctx.counters, &f_next);
        const double scaled = config.sigma * lambda * rhs_unit;
        return satisfied(change - scaled, scaled, at, config, [&] {
          return descent_lemma_gradient_form(problem, metric, at, j, gamma, lambda,
                                             config.effective_delta(), ctx.counters);
        });
      });
}

StepOutcome fixed_step(const CompositeProblem& problem, const DiagonalMetric& metric,
                       const PointEval& at, double gamma, double lambda,
                       const LineSearchConfig& config, EvalCounters* counters) {
  check_common(at, metric);
  check_gamma(gamma);
  check_lambda(lambda);
  StepOutcome out;
  out.gamma = gamma;
  out.lambda = lambda;
  out.y = prox_point(problem, metric, at, gamma, counters);
  if (is_fixed_point(metric, at, out.y, config)) {
    out.x_next = at.x;
    out.tag = StepTag::fixed_point;
    return out;
  }
  out.x_next = relax(at.x, out.y, lambda);
  out.tag = StepTag::fixed_step;
  return out;
}

DomainSearchResult domain_search(const CompositeProblem& problem, const DiagonalMetric& metric,
                                 const PointEval& at, double gamma_start, double theta,
                                 int max_backtracks, EvalCounters* counters) {
  check_common(at, metric);
  check_gamma(gamma_start);
  if (!(theta > 0.0 && theta < 1.0)) throw ConfigError("theta must lie in (0, 1)");
  double gamma = gamma_start;
  for (int b = 0; b <= max_backtracks; ++b) {
    gamma = grid_value(gamma_start, theta, b);
    const Vector y = prox_point(problem, metric, at, gamma, counters);
    if (problem.f().in_domain(y)) return {gamma, b, b};
  }
  fail("domain", max_backtracks, gamma);
}

}  // namespace vmfbs
