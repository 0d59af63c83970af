#pragma once

// Composite objective F = f + g with f smooth (value/gradient oracles) and g
// prox-friendly. Objective values are extended reals: +infinity outside the
// domain, represented by std::numeric_limits<double>::infinity().

#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace vmfbs {

using Vector = std::vector<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Throws UsageError if any entry is NaN or infinite.
void require_finite(std::span<const double> x, const char* what);

/// Throws UsageError if x.size() != n.
void require_dimension(std::span<const double> x, std::size_t n, const char* what);

/// Smooth convex term. Oracles are pure and safe to call concurrently.
class SmoothTerm {
 public:
  virtual ~SmoothTerm() = default;

  virtual std::size_t dimension() const = 0;

  /// f(x), or +inf when x is outside dom f.
  virtual double value(std::span<const double> x) const = 0;

  /// Euclidean gradient. Throws DomainError unless in_interior_domain(x).
  virtual Vector gradient(std::span<const double> x) const = 0;

  virtual bool in_domain(std::span<const double> x) const = 0;
  virtual bool in_interior_domain(std::span<const double> x) const = 0;

  /// True when dom f is the whole space.
  virtual bool full_domain() const = 0;

  /// Global Lipschitz constant of the gradient, when one is known.
  virtual std::optional<double> lipschitz_bound() const { return std::nullopt; }

  virtual std::string name() const = 0;
};

/// Proper lsc convex term with a computable proximity operator.
class ProxTerm {
 public:
  virtual ~ProxTerm() = default;

  virtual std::size_t dimension() const = 0;

  /// g(x), or +inf outside dom g.
  virtual double value(std::span<const double> x) const = 0;

  /// argmin_y g(y) + (1/(2 gamma)) sum_i w_i (y_i - z_i)^2.
  /// An empty weight span means the identity metric. Terms that are not
  /// separable accept only constant weights and throw ConfigError otherwise.
  virtual Vector prox(std::span<const double> z, double gamma,
                      std::span<const double> weights) const = 0;
  Vector prox(std::span<const double> z, double gamma) const { return prox(z, gamma, {}); }

  virtual bool in_domain(std::span<const double> x) const = 0;

  /// g(y) - g(x), summed term by term where possible so that nearby points
  /// do not lose the difference to cancellation. +inf if y is outside dom g.
  virtual double difference(std::span<const double> x, std::span<const double> y) const {
    return value(y) - value(x);
  }

  virtual std::optional<double> lower_bound() const { return std::nullopt; }

  /// Separable terms admit any diagonal metric in prox().
  virtual bool separable() const = 0;

  /// Upper bound on dist(W (z - p) / gamma, dg(p)); zero exactly when p is
  /// the metric prox of z. Throws Unsupported for terms without a
  /// subdifferential formula.
  virtual double optimality_residual(std::span<const double> z, double gamma,
                                     std::span<const double> p,
                                     std::span<const double> weights) const;
  double optimality_residual(std::span<const double> z, double gamma,
                             std::span<const double> p) const {
    return optimality_residual(z, gamma, p, {});
  }

  virtual std::string name() const = 0;
};

enum class DomainRegime {
  standard,  // dom g is contained in dom f
  general,   // dom g need not lie in dom f; iterates stay in int dom f
};

class CompositeProblem {
 public:
  /// Regime defaults to standard when f has full domain, general otherwise.
  CompositeProblem(std::shared_ptr<const SmoothTerm> f, std::shared_ptr<const ProxTerm> g,
                   std::optional<DomainRegime> regime = std::nullopt);

  const SmoothTerm& f() const { return *f_; }
  const ProxTerm& g() const { return *g_; }
  std::size_t dimension() const { return dimension_; }
  DomainRegime regime() const { return regime_; }

 private:
  std::shared_ptr<const SmoothTerm> f_;
  std::shared_ptr<const ProxTerm> g_;
  std::size_t dimension_;
  DomainRegime regime_;
};

/// f(x) + g(x); +inf if x lies outside either domain.
double eval_objective(const CompositeProblem& problem, std::span<const double> x);

/// Euclidean gradient of f. Throws DomainError outside int dom f.
Vector eval_gradient(const CompositeProblem& problem, std::span<const double> x);

}  // namespace vmfbs
