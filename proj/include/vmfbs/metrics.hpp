#pragma once

// Diagonal variable metrics <u, v>_k = sum_i w_{k,i} u_i v_i and the
// schedules that emit them, together with finite-horizon validators for the
// two admissible metric-variation regimes:
//   near-monotone norms:  ||.||_{k+1}^2 <= (1 + eta_k) ||.||_k^2, sum eta_k < inf
//   summable spread:      sum_k (mu_k - nu_k) < inf
// A finite horizon can refute summability but never prove it; the validators
// compare partial sums against a caller budget.

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "vmfbs/problem.hpp"

namespace vmfbs {

class DiagonalMetric {
 public:
  /// Throws ConfigError unless every weight is finite and > 0.
  explicit DiagonalMetric(Vector weights);

  static DiagonalMetric identity(std::size_t n) { return DiagonalMetric(Vector(n, 1.0)); }

  std::size_t dimension() const { return w_.size(); }
  std::span<const double> weights() const { return w_; }
  double nu() const { return nu_; }  // smallest weight
  double mu() const { return mu_; }  // largest weight
  bool is_scalar() const { return nu_ == mu_; }

 private:
  Vector w_;
  double nu_;
  double mu_;
};

/// sum_i w_i v_i^2
double metric_norm_sq(const DiagonalMetric& m, std::span<const double> v);

/// W^{-1} g: gradient with respect to the metric inner product.
Vector metric_gradient(const DiagonalMetric& m, std::span<const double> euclidean_grad);

/// argmin_y g(y) + (1 / (2 gamma)) ||y - z||_W^2. Throws ConfigError for a
/// non-separable g with a non-scalar metric.
Vector metric_prox(const ProxTerm& g, const DiagonalMetric& m, std::span<const double> z,
                   double gamma);

enum class MetricRegime { constant, near_monotone, summable_spread };

/// Solver state visible to state-dependent schedules at emission time.
struct ScheduleState {
  std::size_t k = 0;
  std::span<const double> x;          // current iterate
  std::span<const double> grad;       // gradient at the current iterate
  std::span<const double> prev_x;     // empty at k = 0
  std::span<const double> prev_grad;  // empty at k = 0
  const DiagonalMetric* prev_metric = nullptr;
};

class MetricSchedule {
 public:
  MetricSchedule(double global_nu, double global_mu, MetricRegime regime);
  virtual ~MetricSchedule() = default;

  double global_nu() const { return nu_; }
  double global_mu() const { return mu_; }
  MetricRegime declared_regime() const { return regime_; }

  /// Metric for iteration k, checked against [global_nu, global_mu].
  DiagonalMetric emit(const ScheduleState& state) const;

  /// Convenience for schedules that ignore solver state.
  DiagonalMetric emit(std::size_t k) const;

  /// True when every emitted metric is a multiple of the identity.
  virtual bool scalar_only() const = 0;

  /// True when emission depends on iterates rather than on k alone.
  virtual bool state_dependent() const { return false; }

 protected:
  virtual Vector generate(const ScheduleState& state) const = 0;

 private:
  double nu_;
  double mu_;
  MetricRegime regime_;
};

/// Same weights at every iteration.
class ConstantSchedule final : public MetricSchedule {
 public:
  explicit ConstantSchedule(Vector weights);
  static std::shared_ptr<ConstantSchedule> identity(std::size_t n);

  bool scalar_only() const override;

 protected:
  Vector generate(const ScheduleState& state) const override;

 private:
  Vector w_;
};

/// Explicit table of weights; the last row repeats past the end.
class TableSchedule final : public MetricSchedule {
 public:
  TableSchedule(std::vector<Vector> rows, MetricRegime regime);

  bool scalar_only() const override;

 protected:
  Vector generate(const ScheduleState& state) const override;

 private:
  std::vector<Vector> rows_;
};

/// Weights given by a deterministic function of k.
class FunctionSchedule final : public MetricSchedule {
 public:
  FunctionSchedule(std::function<Vector(std::size_t)> fn, double global_nu, double global_mu,
                   MetricRegime regime, bool scalar);

  bool scalar_only() const override { return scalar_; }

 protected:
  Vector generate(const ScheduleState& state) const override;

 private:
  std::function<Vector(std::size_t)> fn_;
  bool scalar_;
};

/// Per-coordinate secant curvature y_i / s_i (s = x_k - x_{k-1},
/// y = grad_k - grad_{k-1}) clipped into [nu, mu] and into the corridor
/// w_{k,i} <= (1 + eta0 2^{-k}) w_{k-1,i}. Coordinates without a usable
/// positive secant keep their previous weight.
class SafeguardedBBSchedule final : public MetricSchedule {
 public:
  SafeguardedBBSchedule(std::size_t n, double nu, double mu, double eta0);

  bool scalar_only() const override { return false; }
  bool state_dependent() const override { return true; }
  double eta0() const { return eta0_; }

 protected:
  Vector generate(const ScheduleState& state) const override;

 private:
  std::size_t n_;
  double eta0_;
};

struct H4Report {
  std::vector<double> eta;  // eta_k = max(0, max_i w_{k+1,i} / w_{k,i} - 1)
  double partial_sum = 0.0;
  bool pass_under_budget = false;
};

struct H5Report {
  std::vector<double> gaps;  // mu_k - nu_k
  double partial_sum = 0.0;
  bool pass_under_budget = false;
};

/// Uses metrics emitted for k = 0..horizon (horizon ratios). Throws
/// UsageError for horizon < 1 or a state-dependent schedule.
H4Report validate_h4(const MetricSchedule& schedule, std::size_t horizon, double budget);
H5Report validate_h5(const MetricSchedule& schedule, std::size_t horizon, double budget);

/// Same checks over an already recorded metric sequence.
H4Report validate_h4(std::span<const DiagonalMetric> metrics, double budget);
H5Report validate_h5(std::span<const DiagonalMetric> metrics, double budget);

}  // namespace vmfbs
