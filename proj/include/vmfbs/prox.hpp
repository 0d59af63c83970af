#pragma once

// Prox-friendly terms with exact proximity operators:
//   separable weighted l1 plus interval constraints (covers l1, box, l1+box, zero)
//   1-D total variation, optionally intersected with a constant interval.

#include <cstddef>
#include <optional>
#include <span>
#include <string>

#include "vmfbs/problem.hpp"

namespace vmfbs {

/// sign(z) max(|z| - tau, 0). Ties |z| = tau give 0.
double soft_threshold(double z, double tau);

/// Componentwise clamp into [lo, hi]. Throws ConfigError on an empty box.
Vector project_box(std::span<const double> z, std::span<const double> lo,
                   std::span<const double> hi);

/// argmin_y gamma sum_i |y_{i+1} - y_i| + 0.5 ||y - z||^2, computed exactly
/// by the direct taut-string style scan (no inner iterations).
Vector prox_tv1d(std::span<const double> z, double gamma);

/// g(x) = sum_i a_i |x_i| + indicator{lo_i <= x_i <= hi_i}.
class SeparableTerm final : public ProxTerm {
 public:
  using ProxTerm::optimality_residual;
  using ProxTerm::prox;

  SeparableTerm(Vector l1_weights, Vector lo, Vector hi);

  static SeparableTerm zero(std::size_t n);
  static SeparableTerm l1(std::size_t n, double weight);
  static SeparableTerm box(std::size_t n, double lo, double hi);
  static SeparableTerm l1_box(std::size_t n, double weight, double lo, double hi);

  std::size_t dimension() const override { return a_.size(); }
  double value(std::span<const double> x) const override;
  Vector prox(std::span<const double> z, double gamma,
              std::span<const double> weights) const override;
  bool in_domain(std::span<const double> x) const override;
  double difference(std::span<const double> x, std::span<const double> y) const override;
  std::optional<double> lower_bound() const override;
  bool separable() const override { return true; }
  double optimality_residual(std::span<const double> z, double gamma, std::span<const double> p,
                             std::span<const double> weights) const override;
  std::string name() const override;

  std::span<const double> l1_weights() const { return a_; }
  std::span<const double> lower() const { return lo_; }
  std::span<const double> upper() const { return hi_; }

 private:
  Vector a_;
  Vector lo_;
  Vector hi_;
};

/// g(x) = weight * sum_i |x_{i+1} - x_i|, plus an optional constraint
/// lo <= x_i <= hi shared by all coordinates. The prox of the sum is the
/// clamp of the TV prox, which requires the interval to be the same for
/// every coordinate.
class TotalVariation1D final : public ProxTerm {
 public:
  using ProxTerm::optimality_residual;
  using ProxTerm::prox;

  TotalVariation1D(std::size_t n, double weight, double lo = -kInf, double hi = kInf);

  std::size_t dimension() const override { return n_; }
  double value(std::span<const double> x) const override;
  /// Only constant metrics are accepted: W = c I rescales the stepsize to gamma / c.
  Vector prox(std::span<const double> z, double gamma,
              std::span<const double> weights) const override;
  bool in_domain(std::span<const double> x) const override;
  double difference(std::span<const double> x, std::span<const double> y) const override;
  std::optional<double> lower_bound() const override { return 0.0; }
  bool separable() const override { return false; }
  /// Dual certificate u = -cumsum(v) / weight clipped to the sign pattern of
  /// the differences; unsupported when a box is active.
  double optimality_residual(std::span<const double> z, double gamma, std::span<const double> p,
                             std::span<const double> weights) const override;
  std::string name() const override;

  double weight() const { return weight_; }
  bool constrained() const { return lo_ != -kInf || hi_ != kInf; }

 private:
  std::size_t n_;
  double weight_;
  double lo_;
  double hi_;
};

/// dist(W (z - p) / gamma, dg(p)) as computed by the term; see ProxTerm.
double prox_optimality_residual(const ProxTerm& g, std::span<const double> z, double gamma,
                                std::span<const double> p, std::span<const double> weights = {});

/// The single scale c when weights are c * 1 (or empty -> 1); nullopt otherwise.
std::optional<double> scalar_weight(std::span<const double> weights);

}  // namespace vmfbs
