#pragma once

// Smooth data-fidelity terms composed with a dense linear map:
//   (1/p) ||A x - b||_p^p     (p > 1; p = 2 is least squares)
//   D(b, A x) = sum_i b_i log(b_i / (Ax)_i) + (Ax)_i - b_i   (Kullback-Leibler)

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vmfbs/problem.hpp"

namespace vmfbs {

/// Dense row-major m x n matrix with a cached operator-norm estimate.
class LinearMap {
 public:
  LinearMap(std::size_t rows, std::size_t cols, std::vector<double> row_major);

  static LinearMap identity(std::size_t n);
  static LinearMap diagonal(std::span<const double> d);
  static LinearMap from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<const double> data() const { return data_; }

  Vector apply(std::span<const double> x) const;
  Vector apply_transpose(std::span<const double> r) const;

  /// ||A||_2 by power iteration on A^T A. The estimate is the certified
  /// ratio ||A v|| / ||v||, so it never exceeds the true norm.
  double norm_estimate() const { return norm_; }

  bool nonnegative() const;

  /// [A | 1]: appends a column of ones (background term for KL fitting).
  LinearMap with_ones_column() const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
  double norm_ = 0.0;
};

/// Power iteration for ||A||_2; stops when the Rayleigh quotient of A^T A
/// changes by less than rel_tol (relative) or after max_iter sweeps.
double power_iteration_norm(const LinearMap& a, double rel_tol = 1e-15, int max_iter = 100000);

class PNormResidual final : public SmoothTerm {
 public:
  PNormResidual(LinearMap a, Vector b, double p);

  std::size_t dimension() const override { return a_.cols(); }
  double value(std::span<const double> x) const override;
  Vector gradient(std::span<const double> x) const override;
  bool in_domain(std::span<const double>) const override { return true; }
  bool in_interior_domain(std::span<const double>) const override { return true; }
  bool full_domain() const override { return true; }
  std::optional<double> lipschitz_bound() const override;
  std::string name() const override;

  const LinearMap& map() const { return a_; }
  std::span<const double> data() const { return b_; }
  double p() const { return p_; }

 private:
  LinearMap a_;
  Vector b_;
  double p_;
};

/// Least-squares term (1/2)||A x - b||^2.
inline std::shared_ptr<PNormResidual> make_quadratic(LinearMap a, Vector b) {
  return std::make_shared<PNormResidual>(std::move(a), std::move(b), 2.0);
}

/// L = ||A||^2 for p = 2; throws Unsupported otherwise (no global constant exists).
double quadratic_lipschitz(const PNormResidual& f);

class KLDivergence final : public SmoothTerm {
 public:
  /// A must be entrywise nonnegative and b entrywise positive.
  KLDivergence(LinearMap a, Vector b);

  std::size_t dimension() const override { return a_.cols(); }
  double value(std::span<const double> x) const override;
  Vector gradient(std::span<const double> x) const override;
  bool in_domain(std::span<const double> x) const override;
  bool in_interior_domain(std::span<const double> x) const override { return in_domain(x); }
  bool full_domain() const override { return false; }
  std::string name() const override { return "kl"; }

  const LinearMap& map() const { return a_; }
  std::span<const double> data() const { return b_; }

 private:
  LinearMap a_;
  Vector b_;
};

}  // namespace vmfbs
