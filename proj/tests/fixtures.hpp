#pragma once

// Problem instances and schedules shared by the unit and acceptance tests.

#include <cmath>
#include <memory>
#include <random>

#include "vmfbs/metrics.hpp"
#include "vmfbs/prox.hpp"
#include "vmfbs/smooth.hpp"

namespace fixtures {

using namespace vmfbs;

// f = (1/2)(x - 3)^2, g = |x|; minimizer 2, value 2.5.
inline std::shared_ptr<CompositeProblem> lasso_1d() {
  return std::make_shared<CompositeProblem>(make_quadratic(LinearMap::identity(1), Vector{3.0}),
                                            std::make_shared<SeparableTerm>(SeparableTerm::l1(1, 1.0)));
}

// f = 2 x^2 (L = 4), g = 0.
inline std::shared_ptr<CompositeProblem> scaled_square() {
  return std::make_shared<CompositeProblem>(make_quadratic(LinearMap::diagonal(Vector{2.0}), Vector{0.0}),
                                            std::make_shared<SeparableTerm>(SeparableTerm::zero(1)));
}

// f = (1/2) x^2 (L = 1), g = 0.
inline std::shared_ptr<CompositeProblem> unit_square() {
  return std::make_shared<CompositeProblem>(make_quadratic(LinearMap::identity(1), Vector{0.0}),
                                            std::make_shared<SeparableTerm>(SeparableTerm::zero(1)));
}

// Scalar KL divergence D(1, x), g = 0 on [0, inf) (general regime).
inline std::shared_ptr<CompositeProblem> scalar_kl() {
  return std::make_shared<CompositeProblem>(
      std::make_shared<KLDivergence>(LinearMap::identity(1), Vector{1.0}),
      std::make_shared<SeparableTerm>(SeparableTerm::box(1, 0.0, kInf)));
}

// Scalar weights 1 + 2^{-k}: nonincreasing.
inline std::shared_ptr<MetricSchedule> monotone_schedule() {
  return std::make_shared<FunctionSchedule>(
      [](std::size_t k) { return Vector{1.0 + std::ldexp(1.0, -static_cast<int>(std::min<std::size_t>(k, 1000)))}; },
      1.0, 2.0, MetricRegime::near_monotone, true);
}

// Scalar weights alternating 1, 2, 1, 2, ...
inline std::shared_ptr<MetricSchedule> alternating_schedule() {
  return std::make_shared<FunctionSchedule>(
      [](std::size_t k) { return Vector{k % 2 == 0 ? 1.0 : 2.0}; }, 1.0, 2.0,
      MetricRegime::near_monotone, true);
}

// diag(1, 2) at every step: spread 1.
inline std::shared_ptr<MetricSchedule> constant_gap_schedule() {
  return std::make_shared<ConstantSchedule>(Vector{1.0, 2.0});
}

// diag(1, 1 + 2^{-k}): spread sums to 2.
inline std::shared_ptr<MetricSchedule> geometric_gap_schedule() {
  return std::make_shared<FunctionSchedule>(
      [](std::size_t k) { return Vector{1.0, 1.0 + std::ldexp(1.0, -static_cast<int>(std::min<std::size_t>(k, 1000)))}; },
      1.0, 2.0, MetricRegime::summable_spread, false);
}

}  // namespace fixtures
