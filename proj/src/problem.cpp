#include "vmfbs/problem.hpp"

#include <cmath>
#include <string>

#include "vmfbs/errors.hpp"

namespace vmfbs {

void require_finite(std::span<const double> x, const char* what) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) {
      throw UsageError(std::string(what) + ": entry " + std::to_string(i) + " is not finite");
    }
  }
}

void require_dimension(std::span<const double> x, std::size_t n, const char* what) {
  if (x.size() != n) {
    throw UsageError(std::string(what) + ": expected dimension " + std::to_string(n) + ", got " +
                     std::to_string(x.size()));
  }
}

double ProxTerm::optimality_residual(std::span<const double>, double, std::span<const double>,
                                     std::span<const double>) const {
  throw Unsupported("no subdifferential formula for prox term '" + name() + "'");
}

CompositeProblem::CompositeProblem(std::shared_ptr<const SmoothTerm> f,
                                   std::shared_ptr<const ProxTerm> g,
                                   std::optional<DomainRegime> regime)
    : f_(std::move(f)), g_(std::move(g)) {
  if (!f_ || !g_) throw ConfigError("composite problem needs both a smooth and a prox term");
  if (f_->dimension() == 0) throw ConfigError("problem dimension must be positive");
  if (f_->dimension() != g_->dimension()) {
    throw ConfigError("smooth term has dimension " + std::to_string(f_->dimension()) +
                      " but prox term has " + std::to_string(g_->dimension()));
  }
  dimension_ = f_->dimension();
  regime_ = regime.value_or(f_->full_domain() ? DomainRegime::standard : DomainRegime::general);
  if (regime_ == DomainRegime::general && !g_->lower_bound().has_value()) {
    throw ConfigError("general domain regime requires g bounded below");
  }
}

double eval_objective(const CompositeProblem& problem, std::span<const double> x) {
  require_dimension(x, problem.dimension(), "eval_objective");
  const double gv = problem.g().value(x);
  if (gv == kInf) return kInf;
  const double fv = problem.f().value(x);
  if (fv == kInf) return kInf;
  return fv + gv;
}

Vector eval_gradient(const CompositeProblem& problem, std::span<const double> x) {
  require_dimension(x, problem.dimension(), "eval_gradient");
  if (!problem.f().in_interior_domain(x)) {
    throw DomainError("gradient of '" + problem.f().name() +
                      "' requested outside the interior of its domain");
  }
  return problem.f().gradient(x);
}

}  // namespace vmfbs
