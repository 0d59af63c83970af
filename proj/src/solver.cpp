#include "vmfbs/solver.hpp"

#include <algorithm>
#include <cmath>

#include "vmfbs/errors.hpp"
#include "vmfbs/kernels.hpp"

namespace vmfbs {

std::string to_string(Termination t) {
  switch (t) {
    case Termination::fixed_point: return "fixed_point";
    case Termination::max_iter: return "max_iter";
    case Termination::objective_stall: return "objective_stall";
    case Termination::search_failure: return "search_failure";
  }
  return "unknown";
}

std::vector<double> SolveResult::objective_values() const {
  std::vector<double> out;
  out.reserve(trace.size() + 1);
  for (const auto& r : trace) out.push_back(r.F);
  if (trace.empty() || trace.back().tag != StepTag::fixed_point) out.push_back(F_final);
  return out;
}

namespace {

double schedule_value(const ParameterSchedule& s, std::size_t k, double fallback,
                      const char* what) {
  const double v = s ? s(k) : fallback;
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ConfigError(std::string(what) + " schedule produced a non-positive value at k=" +
                      std::to_string(k));
  }
  return v;
}

double lambda_at(const SolverConfig& c, std::size_t k) {
  if (c.linesearch.rule == Rule::Fixed && c.linesearch.fixed_lambda) return *c.linesearch.fixed_lambda;
  const double v = schedule_value(c.lambda_schedule, k, c.linesearch.lambda_bar, "lambda");
  if (v > 1.0) throw ConfigError("lambda schedule exceeds 1 at k=" + std::to_string(k));
  return v;
}

double gamma_at(const SolverConfig& c, std::size_t k) {
  if (c.linesearch.rule == Rule::Fixed && c.linesearch.fixed_gamma) return *c.linesearch.fixed_gamma;
  return schedule_value(c.gamma_schedule, k, c.linesearch.gamma_bar, "gamma");
}

double lipschitz_of(const CompositeProblem& problem, const SolverConfig& config) {
  if (config.lipschitz) {
    if (!(*config.lipschitz > 0.0) || !std::isfinite(*config.lipschitz)) {
      throw ConfigError("Lipschitz constant must be finite and > 0");
    }
    return *config.lipschitz;
  }
  if (auto L = problem.f().lipschitz_bound()) return *L;
  throw ConfigError("fixed stepsizes need a Lipschitz constant for grad f");
}

// Which implied conditions to verify for a rule.
struct ChainPlan {
  bool descent_lemma = false;
  bool armijo = false;
};

ChainPlan chain_plan(Rule r) {
  switch (r) {
    case Rule::LS1:
    case Rule::LS2:
    case Rule::LS3:
    case Rule::Fixed: return {true, true};
    case Rule::LS4:
    case Rule::TsengYun: return {false, true};
  }
  return {};
}

void fold(double& worst, double v) {
  if (std::isnan(v)) return;
  worst = std::max(worst, v);
}

}  // namespace

SolveResult solve(const CompositeProblem& problem, std::span<const double> x0,
                  const SolverConfig& config) {
  const LineSearchConfig& ls = config.linesearch;
  ls.validate();
  if (config.max_iterations == 0) throw ConfigError("max_iterations must be >= 1");
  if (!(config.tol_objective_stall >= 0.0)) throw ConfigError("stall tolerance must be >= 0");
  if (config.tol_objective_stall > 0.0 && config.stall_window == 0) {
    throw ConfigError("stall window must be >= 1");
  }
  require_dimension(x0, problem.dimension(), "x0");
  require_finite(x0, "x0");
  if (!problem.g().in_domain(x0)) throw UsageError("x0 lies outside dom g (" + problem.g().name() + ")");
  if (problem.regime() == DomainRegime::general ? !problem.f().in_interior_domain(x0)
                                                : !problem.f().in_domain(x0)) {
    throw UsageError("x0 lies outside dom f (" + problem.f().name() + ")");
  }

  const std::shared_ptr<const MetricSchedule> schedule =
      config.metrics ? config.metrics : ConstantSchedule::identity(problem.dimension());
  if (!problem.g().separable() && !schedule->scalar_only()) {
    throw ConfigError("non-separable term '" + problem.g().name() + "' needs a scalar metric schedule");
  }

  const Rule rule = ls.rule;
  double lipschitz = 0.0;
  if (rule == Rule::Fixed) {
    if (problem.regime() == DomainRegime::general) {
      throw ConfigError("fixed stepsizes are not available in the general domain regime");
    }
    if (!schedule->state_dependent()) {
      const FixedStepReport rep = fixed_step_validate(problem, config, config.max_iterations);
      if (!rep.pass) {
        throw ConfigError("fixed stepsizes violate sup gamma lambda / nu < 2/L (margin " +
                          std::to_string(rep.margin) + ")");
      }
    }
    lipschitz = lipschitz_of(problem, config);
  }

  SolveResult result;
  result.rule = rule;
  result.delta_used = rule == Rule::Fixed ? 0.0 : ls.effective_delta();
  const ChainPlan plan = chain_plan(rule);

  EvalCounters& counters = result.evals;
  PointEval point = evaluate_point(problem, x0, &counters);
  Vector prev_x, prev_grad;
  std::optional<DiagonalMetric> prev_metric;
  int warm_index = 0;
  result.termination = Termination::max_iter;

  for (std::size_t k = 0; k < config.max_iterations; ++k) {
    ScheduleState state;
    state.k = k;
    state.x = point.x;
    state.grad = point.grad;
    state.prev_x = prev_x;
    state.prev_grad = prev_grad;
    state.prev_metric = prev_metric ? &*prev_metric : nullptr;
    const DiagonalMetric metric = schedule->emit(state);
    if (metric.dimension() != problem.dimension()) {
      throw ConfigError("metric dimension does not match the problem");
    }
    if (rule == Rule::Fixed && schedule->state_dependent()) {
      const double ratio = gamma_at(config, k) * lambda_at(config, k) / metric.nu();
      if (!(ratio < 2.0 / lipschitz)) {
        throw ConfigError("fixed stepsizes violate sup gamma lambda / nu < 2/L at k=" +
                          std::to_string(k));
      }
    }

    IterateRecord rec;
    rec.k = k;
    rec.F = point.objective();
    rec.nu = metric.nu();
    rec.mu = metric.mu();

    StepOutcome out;
    try {
      SearchContext ctx;
      ctx.counters = &counters;
      int domain_backtracks = 0;
      if (searches_gamma(rule)) {
        ctx.start_index = ls.warm_start ? std::max(0, warm_index - 1) : 0;
        if (problem.regime() == DomainRegime::general) {
          const double start = ls.gamma_bar * std::pow(ls.theta, ctx.start_index);
          const DomainSearchResult ds =
              domain_search(problem, metric, point, start, ls.theta, ls.max_backtracks, &counters);
          rec.domain_gamma = ds.gamma;
          ctx.start_index += ds.grid_index;
          domain_backtracks = ds.backtracks;
        }
        const double lambda = lambda_at(config, k);
        out = rule == Rule::LS1 ? ls1_search(problem, metric, point, lambda, ls, ctx)
                                : ls3_search(problem, metric, point, lambda, ls, ctx);
      } else if (rule == Rule::Fixed) {
        out = fixed_step(problem, metric, point, gamma_at(config, k), lambda_at(config, k), ls,
                         &counters);
      } else {
        double gamma = gamma_at(config, k);
        if (problem.regime() == DomainRegime::general) {
          const DomainSearchResult ds =
              domain_search(problem, metric, point, gamma, ls.theta, ls.max_backtracks, &counters);
          rec.domain_gamma = ds.gamma;
          gamma = ds.gamma;
          domain_backtracks = ds.backtracks;
        }
        ctx.start_index = ls.warm_start ? std::max(0, warm_index - 1) : 0;
        out = rule == Rule::LS2   ? ls2_search(problem, metric, point, gamma, ls, ctx)
              : rule == Rule::LS4 ? ls4_search(problem, metric, point, gamma, ls, ctx)
                                  : tseng_yun_search(problem, metric, point, gamma, ls, ctx);
      }
      out.backtracks += domain_backtracks;
    } catch (const SearchFailure& e) {
      result.termination = Termination::search_failure;
      result.message = e.what();
      break;
    }
    warm_index = out.grid_index;

    rec.gamma = out.gamma;
    rec.lambda = out.lambda;
    rec.backtracks = out.backtracks;
    rec.tag = out.tag;
    const double y_step = std::sqrt(kernels::weighted_sq_dist(metric.weights(), out.y, point.x));
    rec.prox_residual = y_step / out.gamma;
    rec.fixed_point_measure = y_step / (1.0 + std::sqrt(kernels::dot(point.x, point.x)));
    if (config.record_iterates) {
      rec.x = point.x;
      rec.y = out.y;
      rec.x_next = out.x_next;
      rec.weights.assign(metric.weights().begin(), metric.weights().end());
    }

    if (out.tag == StepTag::fixed_point) {
      rec.step_norm = 0.0;
      if (config.record_checks) {
        rec.checks_recorded = true;
        const double scale = 1.0 + std::abs(rec.F);
        rec.checks.descent =
            descent_direction_residual(problem, metric, point, out.y, out.gamma) / scale;
        rec.check_max_residual = rec.checks.descent;
        fold(result.verification.worst_descent, rec.checks.descent);
      } else {
        rec.check_max_residual = kUnset;
      }
      rec.evals = counters;
      result.trace.push_back(std::move(rec));
      result.termination = Termination::fixed_point;
      break;
    }

    // Next point.
    PointEval next;
    next.x = out.x_next;
    if (std::isnan(out.f_next)) {
      next.f = problem.f().value(next.x);
      ++counters.f;
    } else {
      next.f = out.f_next;
    }
    next.g = problem.g().value(next.x);
    try {
      next.grad = problem.f().gradient(next.x);
      ++counters.grad;
    } catch (const DomainError& e) {
      result.termination = Termination::search_failure;
      result.message = std::string("accepted point left the domain of f: ") + e.what();
      rec.evals = counters;
      result.trace.push_back(std::move(rec));
      break;
    }
    Vector diff(point.x.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = next.x[i] - point.x[i];
    rec.step_norm = std::sqrt(kernels::dot(diff, diff));

    if (config.record_checks) {
      rec.checks_recorded = true;
      const double scale = 1.0 + std::abs(rec.F);
      double delta = result.delta_used;
      if (rule == Rule::Fixed) {
        delta = lipschitz * out.gamma * out.lambda / (2.0 * metric.nu());
        result.delta_used = std::max(result.delta_used, delta);
      }
      CheckResiduals& c = rec.checks;
      c.descent = descent_direction_residual(problem, metric, point, out.y, out.gamma) / scale;
      const double dF = rec.F - next.objective();
      c.sufficient_decrease =
          ((1.0 - delta) * kernels::weighted_sq_norm(metric.weights(), diff) - out.gamma * dF) /
          scale;
      c.monotone = -dF / scale;
      if (plan.descent_lemma) {
        c.descent_lemma =
            descent_lemma_residual(problem, metric, point, out.y, out.gamma, out.lambda, delta) /
            scale;
      }
      if (plan.armijo) {
        c.armijo =
            armijo_residual(problem, metric, point, out.y, out.gamma, out.lambda, delta) / scale;
      }
      VerificationReport& v = result.verification;
      fold(v.worst_descent, c.descent);
      fold(v.worst_sufficient_decrease, c.sufficient_decrease);
      fold(v.worst_monotone, c.monotone);
      fold(v.worst_chain, c.descent_lemma);
      fold(v.worst_chain, c.armijo);
      double worst = -kInf;
      for (double r : {c.descent, c.sufficient_decrease, c.monotone, c.descent_lemma, c.armijo}) {
        fold(worst, r);
      }
      rec.check_max_residual = worst;
    } else {
      rec.check_max_residual = kUnset;
    }
    rec.evals = counters;
    result.trace.push_back(std::move(rec));

    prev_x = std::move(point.x);
    prev_grad = std::move(point.grad);
    prev_metric = metric;
    point = std::move(next);

    if (auto stop = stopping_check(result.trace, config)) {
      result.termination = *stop;
      break;
    }
  }

  result.x_final = point.x;
  result.F_final = point.objective();
  VerificationReport& v = result.verification;
  v.pass = v.worst_descent <= kDescentTolerance &&
           v.worst_sufficient_decrease <= kDescentTolerance &&
           v.worst_monotone <= kMonotoneTolerance && v.worst_chain <= kChainTolerance;
  return result;
}

FixedStepReport fixed_step_validate(const CompositeProblem& problem, const SolverConfig& config,
                                    std::size_t horizon) {
  if (horizon == 0) throw UsageError("horizon must be >= 1");
  FixedStepReport r;
  r.lipschitz = lipschitz_of(problem, config);
  r.bound = 2.0 / r.lipschitz;
  const std::shared_ptr<const MetricSchedule> schedule =
      config.metrics ? config.metrics : ConstantSchedule::identity(problem.dimension());
  for (std::size_t k = 0; k < horizon; ++k) {
    const double nu = schedule->state_dependent() ? schedule->global_nu() : schedule->emit(k).nu();
    r.sup_ratio = std::max(r.sup_ratio, gamma_at(config, k) * lambda_at(config, k) / nu);
  }
  r.margin = r.bound - r.sup_ratio;
  r.pass = r.sup_ratio < r.bound;
  return r;
}

std::optional<Termination> stopping_check(std::span<const IterateRecord> trace,
                                          const SolverConfig& config) {
  if (trace.empty()) return std::nullopt;
  const IterateRecord& last = trace.back();
  if (last.tag == StepTag::fixed_point ||
      last.fixed_point_measure <= config.linesearch.tol_fixed_point) {
    return Termination::fixed_point;
  }
  const std::size_t w = config.stall_window;
  if (config.tol_objective_stall > 0.0 && w > 0 && trace.size() > w) {
    const double then = trace[trace.size() - 1 - w].F;
    if (then - last.F < config.tol_objective_stall * (1.0 + std::abs(last.F))) {
      return Termination::objective_stall;
    }
  }
  return std::nullopt;
}

}  // namespace vmfbs
