#include "vmfbs/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vmfbs/errors.hpp"
#include "vmfbs/kernels.hpp"

namespace vmfbs {

DiagonalMetric::DiagonalMetric(Vector weights) : w_(std::move(weights)) {
  if (w_.empty()) throw ConfigError("metric needs dimension >= 1");
  for (double w : w_) {
    if (!(w > 0.0) || !std::isfinite(w)) throw ConfigError("metric weights must be finite and > 0");
  }
  const auto [lo, hi] = std::minmax_element(w_.begin(), w_.end());
  nu_ = *lo;
  mu_ = *hi;
}

double metric_norm_sq(const DiagonalMetric& m, std::span<const double> v) {
  require_dimension(v, m.dimension(), "metric_norm_sq");
  return kernels::weighted_sq_norm(m.weights(), v);
}

Vector metric_gradient(const DiagonalMetric& m, std::span<const double> euclidean_grad) {
  require_dimension(euclidean_grad, m.dimension(), "metric_gradient");
  const std::span<const double> w = m.weights();
  Vector out(euclidean_grad.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = euclidean_grad[i] / w[i];
  return out;
}

Vector metric_prox(const ProxTerm& g, const DiagonalMetric& m, std::span<const double> z,
                   double gamma) {
  if (!(gamma > 0.0)) throw UsageError("metric_prox needs gamma > 0");
  require_dimension(z, m.dimension(), "metric_prox");
  if (!g.separable() && !m.is_scalar()) {
    throw ConfigError("prox of non-separable term '" + g.name() +
                      "' requires a scalar metric");
  }
  return g.prox(z, gamma, m.weights());
}

// --- schedules -------------------------------------------------------------

MetricSchedule::MetricSchedule(double global_nu, double global_mu, MetricRegime regime)
    : nu_(global_nu), mu_(global_mu), regime_(regime) {
  if (!(nu_ > 0.0) || !(mu_ >= nu_) || !std::isfinite(mu_)) {
    throw ConfigError("metric bounds must satisfy 0 < nu <= mu < inf");
  }
}

DiagonalMetric MetricSchedule::emit(const ScheduleState& state) const {
  DiagonalMetric m(generate(state));
  if (m.nu() < nu_ || m.mu() > mu_) {
    throw ConfigError("metric at k=" + std::to_string(state.k) + " leaves the bounds [" +
                      std::to_string(nu_) + ", " + std::to_string(mu_) + "]");
  }
  return m;
}

DiagonalMetric MetricSchedule::emit(std::size_t k) const {
  ScheduleState s;
  s.k = k;
  return emit(s);
}

ConstantSchedule::ConstantSchedule(Vector weights)
    : MetricSchedule(weights.empty() ? 1.0 : *std::min_element(weights.begin(), weights.end()),
                     weights.empty() ? 1.0 : *std::max_element(weights.begin(), weights.end()),
                     MetricRegime::constant),
      w_(std::move(weights)) {
  DiagonalMetric check(w_);
}

std::shared_ptr<ConstantSchedule> ConstantSchedule::identity(std::size_t n) {
  return std::make_shared<ConstantSchedule>(Vector(n, 1.0));
}

bool ConstantSchedule::scalar_only() const {
  return std::adjacent_find(w_.begin(), w_.end(), std::not_equal_to<>()) == w_.end();
}

Vector ConstantSchedule::generate(const ScheduleState&) const { return w_; }

namespace {

std::pair<double, double> table_bounds(const std::vector<Vector>& rows) {
  if (rows.empty() || rows.front().empty()) throw ConfigError("metric table is empty");
  double lo = kInf, hi = 0.0;
  for (const auto& r : rows) {
    if (r.size() != rows.front().size()) throw ConfigError("metric table rows differ in length");
    for (double w : r) {
      lo = std::min(lo, w);
      hi = std::max(hi, w);
    }
  }
  return {lo, hi};
}

}  // namespace

TableSchedule::TableSchedule(std::vector<Vector> rows, MetricRegime regime)
    : MetricSchedule(table_bounds(rows).first, table_bounds(rows).second, regime),
      rows_(std::move(rows)) {}

bool TableSchedule::scalar_only() const {
  for (const auto& r : rows_) {
    if (std::adjacent_find(r.begin(), r.end(), std::not_equal_to<>()) != r.end()) return false;
  }
  return true;
}

Vector TableSchedule::generate(const ScheduleState& state) const {
  return rows_[std::min(state.k, rows_.size() - 1)];
}

FunctionSchedule::FunctionSchedule(std::function<Vector(std::size_t)> fn, double global_nu,
                                   double global_mu, MetricRegime regime, bool scalar)
    : MetricSchedule(global_nu, global_mu, regime), fn_(std::move(fn)), scalar_(scalar) {
  if (!fn_) throw ConfigError("function schedule needs a generator");
}

Vector FunctionSchedule::generate(const ScheduleState& state) const { return fn_(state.k); }

SafeguardedBBSchedule::SafeguardedBBSchedule(std::size_t n, double nu, double mu, double eta0)
    : MetricSchedule(nu, mu, MetricRegime::near_monotone), n_(n), eta0_(eta0) {
  if (n_ == 0) throw ConfigError("BB schedule needs dimension >= 1");
  if (!(eta0_ >= 0.0) || !std::isfinite(eta0_)) throw ConfigError("BB eta0 must be >= 0");
}

Vector SafeguardedBBSchedule::generate(const ScheduleState& state) const {
  const double nu = global_nu();
  const double mu = global_mu();
  Vector w(n_);
  if (state.prev_metric == nullptr) {
    for (double& v : w) v = std::clamp(1.0, nu, mu);
    return w;
  }
  const std::span<const double> prev = state.prev_metric->weights();
  const bool have_secant = state.prev_x.size() == n_ && state.prev_grad.size() == n_ &&
                           state.x.size() == n_ && state.grad.size() == n_;
  const double growth = 1.0 + eta0_ * std::ldexp(1.0, -static_cast<int>(std::min<std::size_t>(state.k, 1000)));
  for (std::size_t i = 0; i < n_; ++i) {
    double target = prev[i];
    if (have_secant) {
      const double s = state.x[i] - state.prev_x[i];
      const double y = state.grad[i] - state.prev_grad[i];
      if (s != 0.0) {
        const double curv = y / s;
        if (curv > 0.0 && std::isfinite(curv)) target = curv;
      }
    }
    target = std::clamp(target, nu, mu);
    w[i] = std::min(target, growth * prev[i]);
  }
  return w;
}

// --- validators ------------------------------------------------------------

namespace {

std::vector<DiagonalMetric> emit_horizon(const MetricSchedule& schedule, std::size_t count) {
  if (schedule.state_dependent()) {
    throw UsageError("state-dependent schedules must be validated on recorded metrics");
  }
  std::vector<DiagonalMetric> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) out.push_back(schedule.emit(k));
  return out;
}

}  // namespace

H4Report validate_h4(std::span<const DiagonalMetric> metrics, double budget) {
  H4Report r;
  for (std::size_t k = 0; k + 1 < metrics.size(); ++k) {
    const auto a = metrics[k].weights();
    const auto b = metrics[k + 1].weights();
    if (a.size() != b.size()) throw UsageError("metric dimensions change along the sequence");
    double ratio = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) ratio = std::max(ratio, b[i] / a[i]);
    const double eta = std::max(0.0, ratio - 1.0);
    r.eta.push_back(eta);
    r.partial_sum += eta;
  }
  r.pass_under_budget = r.partial_sum <= budget;
  return r;
}

H5Report validate_h5(std::span<const DiagonalMetric> metrics, double budget) {
  H5Report r;
  for (const auto& m : metrics) {
    const double gap = m.mu() - m.nu();
    r.gaps.push_back(gap);
    r.partial_sum += gap;
  }
  r.pass_under_budget = r.partial_sum <= budget;
  return r;
}

H4Report validate_h4(const MetricSchedule& schedule, std::size_t horizon, double budget) {
  if (horizon < 1) throw UsageError("validate_h4 needs horizon >= 1");
  const auto ms = emit_horizon(schedule, horizon + 1);
  return validate_h4(ms, budget);
}

H5Report validate_h5(const MetricSchedule& schedule, std::size_t horizon, double budget) {
  if (horizon < 1) throw UsageError("validate_h5 needs horizon >= 1");
  const auto ms = emit_horizon(schedule, horizon);
  return validate_h5(ms, budget);
}

}  // namespace vmfbs
