#include "vmfbs/prox.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vmfbs/errors.hpp"
#include "vmfbs/kernels.hpp"

namespace vmfbs {
namespace {

double dist_to_interval(double v, double lo, double hi) {
  if (v < lo) return lo - v;
  if (v > hi) return v - hi;
  return 0.0;
}

void check_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw UsageError("prox stepsize must be positive");
}

void check_weights(std::span<const double> weights, std::size_t n) {
  if (weights.empty()) return;
  if (weights.size() != n) throw UsageError("metric weights have the wrong dimension");
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw UsageError("metric weights must be positive");
  }
}

double weight_at(std::span<const double> weights, std::size_t i) {
  return weights.empty() ? 1.0 : weights[i];
}

}  // namespace

double soft_threshold(double z, double tau) {
  if (tau < 0.0) throw UsageError("soft threshold needs tau >= 0");
  const double m = std::abs(z) - tau;
  return m > 0.0 ? std::copysign(m, z) : 0.0;
}

Vector project_box(std::span<const double> z, std::span<const double> lo,
                   std::span<const double> hi) {
  if (lo.size() != z.size() || hi.size() != z.size()) {
    throw UsageError("project_box: bound dimensions differ from input");
  }
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (!(lo[i] <= hi[i])) throw ConfigError("project_box: empty box");
  }
  Vector out(z.size());
  kernels::clamp(z, lo, hi, out);
  return out;
}

// Direct 1-D TV denoising: scans left to right keeping the admissible range
// [vmin, vmax] of the current segment value together with the running dual
// residuals umin/umax; a segment is emitted once the range collapses.
Vector prox_tv1d(std::span<const double> z, double gamma) {
  if (!(gamma >= 0.0)) throw UsageError("TV prox needs gamma >= 0");
  const std::size_t n = z.size();
  Vector out(n);
  if (n == 0) return out;
  if (gamma == 0.0 || n == 1) {
    std::copy(z.begin(), z.end(), out.begin());
    return out;
  }
  const double lam = gamma;
  const double mlam = -gamma;
  const double two_lam = 2.0 * gamma;
  const std::size_t last = n - 1;
  std::size_t k = 0, k0 = 0, kplus = 0, kminus = 0;
  double umin = lam, umax = mlam;
  double vmin = z[0] - lam, vmax = z[0] + lam;
  for (;;) {
    while (k == last) {
      if (umin < 0.0) {
        do out[k0++] = vmin; while (k0 <= kminus);
        k = kminus = k0;
        vmin = z[k];
        umin = lam;
        umax = vmin + umin - vmax;
      } else if (umax > 0.0) {
        do out[k0++] = vmax; while (k0 <= kplus);
        k = kplus = k0;
        vmax = z[k];
        umax = mlam;
        umin = vmax + umax - vmin;
      } else {
        vmin += umin / static_cast<double>(k - k0 + 1);
        do out[k0++] = vmin; while (k0 <= k);
        return out;
      }
    }
    umin += z[k + 1] - vmin;
    if (umin < mlam) {
      do out[k0++] = vmin; while (k0 <= kminus);
      k = kplus = kminus = k0;
      vmin = z[k];
      vmax = vmin + two_lam;
      umin = lam;
      umax = mlam;
      continue;
    }
    umax += z[k + 1] - vmax;
    if (umax > lam) {
      do out[k0++] = vmax; while (k0 <= kplus);
      k = kplus = kminus = k0;
      vmax = z[k];
      vmin = vmax - two_lam;
      umin = lam;
      umax = mlam;
      continue;
    }
    ++k;
    if (umin >= lam) {
      kminus = k;
      vmin += (umin - lam) / static_cast<double>(kminus - k0 + 1);
      umin = lam;
    }
    if (umax <= mlam) {
      kplus = k;
      vmax += (umax + lam) / static_cast<double>(kplus - k0 + 1);
      umax = mlam;
    }
  }
}

std::optional<double> scalar_weight(std::span<const double> weights) {
  if (weights.empty()) return 1.0;
  const double c = weights.front();
  for (double w : weights) {
    if (w != c) return std::nullopt;
  }
  return c;
}

double prox_optimality_residual(const ProxTerm& g, std::span<const double> z, double gamma,
                                std::span<const double> p, std::span<const double> weights) {
  return g.optimality_residual(z, gamma, p, weights);
}

// --- SeparableTerm -------------------------------------------------------

SeparableTerm::SeparableTerm(Vector l1_weights, Vector lo, Vector hi)
    : a_(std::move(l1_weights)), lo_(std::move(lo)), hi_(std::move(hi)) {
  if (a_.empty()) throw ConfigError("separable term needs dimension >= 1");
  if (lo_.size() != a_.size() || hi_.size() != a_.size()) {
    throw ConfigError("separable term: weight and bound dimensions differ");
  }
  for (std::size_t i = 0; i < a_.size(); ++i) {
    if (!(a_[i] >= 0.0) || !std::isfinite(a_[i])) {
      throw ConfigError("l1 weights must be finite and nonnegative");
    }
    if (std::isnan(lo_[i]) || std::isnan(hi_[i]) || !(lo_[i] <= hi_[i]) || lo_[i] == kInf ||
        hi_[i] == -kInf) {
      throw ConfigError("empty box in separable term");
    }
  }
}

SeparableTerm SeparableTerm::zero(std::size_t n) {
  return SeparableTerm(Vector(n, 0.0), Vector(n, -kInf), Vector(n, kInf));
}

SeparableTerm SeparableTerm::l1(std::size_t n, double weight) {
  return SeparableTerm(Vector(n, weight), Vector(n, -kInf), Vector(n, kInf));
}

SeparableTerm SeparableTerm::box(std::size_t n, double lo, double hi) {
  return SeparableTerm(Vector(n, 0.0), Vector(n, lo), Vector(n, hi));
}

SeparableTerm SeparableTerm::l1_box(std::size_t n, double weight, double lo, double hi) {
  return SeparableTerm(Vector(n, weight), Vector(n, lo), Vector(n, hi));
}

bool SeparableTerm::in_domain(std::span<const double> x) const {
  require_dimension(x, a_.size(), "SeparableTerm");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] >= lo_[i] && x[i] <= hi_[i])) return false;
  }
  return true;
}

double SeparableTerm::value(std::span<const double> x) const {
  if (!in_domain(x)) return kInf;
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += a_[i] * std::abs(x[i]);
  return s;
}

double SeparableTerm::difference(std::span<const double> x, std::span<const double> y) const {
  if (!in_domain(y)) return kInf;
  if (!in_domain(x)) return -kInf;
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += a_[i] * (std::abs(y[i]) - std::abs(x[i]));
  return s;
}

Vector SeparableTerm::prox(std::span<const double> z, double gamma,
                           std::span<const double> weights) const {
  require_dimension(z, a_.size(), "SeparableTerm::prox");
  check_gamma(gamma);
  check_weights(weights, a_.size());
  const std::size_t n = a_.size();
  // Per-coordinate stepsize gamma / w_i; the scalar prox of |.| + interval
  // indicator is the clamp of the soft threshold.
  Vector tau(n);
  for (std::size_t i = 0; i < n; ++i) tau[i] = gamma * a_[i] / weight_at(weights, i);
  Vector out(n);
  kernels::soft_threshold(z, tau, out);
  kernels::clamp(out, lo_, hi_, out);
  return out;
}

std::optional<double> SeparableTerm::lower_bound() const {
  double s = 0.0;
  for (std::size_t i = 0; i < a_.size(); ++i) s += a_[i] * dist_to_interval(0.0, lo_[i], hi_[i]);
  return s;
}

double SeparableTerm::optimality_residual(std::span<const double> z, double gamma,
                                          std::span<const double> p,
                                          std::span<const double> weights) const {
  require_dimension(z, a_.size(), "optimality_residual z");
  require_dimension(p, a_.size(), "optimality_residual p");
  check_gamma(gamma);
  check_weights(weights, a_.size());
  if (!in_domain(p)) return kInf;
  double s = 0.0;
  for (std::size_t i = 0; i < a_.size(); ++i) {
    const double v = weight_at(weights, i) * (z[i] - p[i]) / gamma;
    double lo, hi;
    if (p[i] > 0.0) {
      lo = hi = a_[i];
    } else if (p[i] < 0.0) {
      lo = hi = -a_[i];
    } else {
      lo = -a_[i];
      hi = a_[i];
    }
    if (lo_[i] == hi_[i]) {
      lo = -kInf;
      hi = kInf;
    } else if (p[i] == lo_[i]) {
      lo = -kInf;
    } else if (p[i] == hi_[i]) {
      hi = kInf;
    }
    const double d = dist_to_interval(v, lo, hi);
    s += d * d;
  }
  return std::sqrt(s);
}

std::string SeparableTerm::name() const {
  bool any_l1 = false, any_box = false;
  for (std::size_t i = 0; i < a_.size(); ++i) {
    any_l1 = any_l1 || a_[i] != 0.0;
    any_box = any_box || lo_[i] != -kInf || hi_[i] != kInf;
  }
  if (any_l1 && any_box) return "l1+box";
  if (any_l1) return "l1";
  if (any_box) return "box";
  return "zero";
}

// --- TotalVariation1D ----------------------------------------------------

TotalVariation1D::TotalVariation1D(std::size_t n, double weight, double lo, double hi)
    : n_(n), weight_(weight), lo_(lo), hi_(hi) {
  if (n_ == 0) throw ConfigError("TV term needs dimension >= 1");
  if (!(weight_ >= 0.0) || !std::isfinite(weight_)) {
    throw ConfigError("TV weight must be finite and nonnegative");
  }
  if (std::isnan(lo_) || std::isnan(hi_) || !(lo_ <= hi_) || lo_ == kInf || hi_ == -kInf) {
    throw ConfigError("empty box in TV term");
  }
}

bool TotalVariation1D::in_domain(std::span<const double> x) const {
  require_dimension(x, n_, "TotalVariation1D");
  for (double v : x) {
    if (!(v >= lo_ && v <= hi_)) return false;
  }
  return true;
}

double TotalVariation1D::value(std::span<const double> x) const {
  if (!in_domain(x)) return kInf;
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < n_; ++i) s += std::abs(x[i + 1] - x[i]);
  return weight_ * s;
}

double TotalVariation1D::difference(std::span<const double> x,
                                    std::span<const double> y) const {
  if (!in_domain(y)) return kInf;
  if (!in_domain(x)) return -kInf;
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < n_; ++i) {
    s += std::abs(y[i + 1] - y[i]) - std::abs(x[i + 1] - x[i]);
  }
  return weight_ * s;
}

Vector TotalVariation1D::prox(std::span<const double> z, double gamma,
                              std::span<const double> weights) const {
  require_dimension(z, n_, "TotalVariation1D::prox");
  check_gamma(gamma);
  check_weights(weights, n_);
  const auto c = scalar_weight(weights);
  if (!c) throw ConfigError("TV prox supports only scalar (c * identity) metrics");
  Vector out = prox_tv1d(z, weight_ * gamma / *c);
  if (constrained()) {
    for (double& v : out) v = std::clamp(v, lo_, hi_);
  }
  return out;
}

double TotalVariation1D::optimality_residual(std::span<const double> z, double gamma,
                                             std::span<const double> p,
                                             std::span<const double> weights) const {
  if (constrained()) {
    throw Unsupported("optimality residual for TV with an active box is not implemented");
  }
  require_dimension(z, n_, "optimality_residual z");
  require_dimension(p, n_, "optimality_residual p");
  check_gamma(gamma);
  check_weights(weights, n_);
  Vector v(n_);
  for (std::size_t i = 0; i < n_; ++i) v[i] = weight_at(weights, i) * (z[i] - p[i]) / gamma;
  if (weight_ == 0.0) return std::sqrt(kernels::dot(v, v));

  // u_j = -(v_1 + ... + v_j) / weight, clipped to the subdifferential of |.|
  // at the j-th difference; then measure v - weight * D^T u.
  Vector u(n_ - 1);
  double cum = 0.0;
  for (std::size_t j = 0; j + 1 < n_; ++j) {
    cum += v[j];
    double uj = -cum / weight_;
    const double d = p[j + 1] - p[j];
    if (d > 0.0) {
      uj = 1.0;
    } else if (d < 0.0) {
      uj = -1.0;
    } else {
      uj = std::clamp(uj, -1.0, 1.0);
    }
    u[j] = uj;
  }
  double s = 0.0;
  for (std::size_t j = 0; j < n_; ++j) {
    const double left = j > 0 ? u[j - 1] : 0.0;
    const double right = j + 1 < n_ ? u[j] : 0.0;
    const double r = v[j] - weight_ * (left - right);
    s += r * r;
  }
  return std::sqrt(s);
}

std::string TotalVariation1D::name() const { return constrained() ? "tv1d+box" : "tv1d"; }

}  // namespace vmfbs
