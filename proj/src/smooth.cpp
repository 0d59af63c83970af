#include "vmfbs/smooth.hpp"

#include <cmath>
#include <string>

#include "vmfbs/errors.hpp"
#include "vmfbs/kernels.hpp"

namespace vmfbs {

LinearMap::LinearMap(std::size_t rows, std::size_t cols, std::vector<double> row_major)
    : rows_(rows), cols_(cols), data_(std::move(row_major)) {
  if (rows_ == 0 || cols_ == 0) throw ConfigError("linear map must have positive shape");
  if (data_.size() != rows_ * cols_) {
    throw ConfigError("linear map data has " + std::to_string(data_.size()) + " entries, expected " +
                      std::to_string(rows_ * cols_));
  }
  for (double v : data_) {
    if (!std::isfinite(v)) throw ConfigError("linear map has a non-finite entry");
  }
  norm_ = power_iteration_norm(*this);
}

LinearMap LinearMap::identity(std::size_t n) {
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) d[i * n + i] = 1.0;
  return LinearMap(n, n, std::move(d));
}

LinearMap LinearMap::diagonal(std::span<const double> diag) {
  const std::size_t n = diag.size();
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) d[i * n + i] = diag[i];
  return LinearMap(n, n, std::move(d));
}

LinearMap LinearMap::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw ConfigError("linear map needs at least one row");
  const std::size_t cols = rows.front().size();
  std::vector<double> d;
  d.reserve(rows.size() * cols);
  for (const auto& r : rows) {
    if (r.size() != cols) throw ConfigError("ragged matrix rows");
    d.insert(d.end(), r.begin(), r.end());
  }
  return LinearMap(rows.size(), cols, std::move(d));
}

Vector LinearMap::apply(std::span<const double> x) const {
  require_dimension(x, cols_, "LinearMap::apply");
  Vector out(rows_);
  kernels::active().gemv(data_.data(), rows_, cols_, x.data(), out.data());
  return out;
}

Vector LinearMap::apply_transpose(std::span<const double> r) const {
  require_dimension(r, rows_, "LinearMap::apply_transpose");
  Vector out(cols_);
  kernels::active().gemv_t(data_.data(), rows_, cols_, r.data(), out.data());
  return out;
}

bool LinearMap::nonnegative() const {
  for (double v : data_) {
    if (v < 0.0) return false;
  }
  return true;
}

LinearMap LinearMap::with_ones_column() const {
  std::vector<double> d;
  d.reserve(rows_ * (cols_ + 1));
  for (std::size_t r = 0; r < rows_; ++r) {
    d.insert(d.end(), data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
             data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_));
    d.push_back(1.0);
  }
  return LinearMap(rows_, cols_ + 1, std::move(d));
}

double power_iteration_norm(const LinearMap& a, double rel_tol, int max_iter) {
  const std::size_t n = a.cols();
  // Deterministic start with distinct entries so it is not orthogonal to the
  // leading singular vector of structured matrices.
  Vector v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + 0.1 * static_cast<double>(i % 7) / 7.0;
  double best = 0.0;
  double prev_rq = -1.0;
  for (int it = 0; it < max_iter; ++it) {
    const double vn = std::sqrt(kernels::dot(v, v));
    if (vn == 0.0) break;
    for (double& e : v) e /= vn;
    const Vector av = a.apply(v);
    const double ratio = std::sqrt(kernels::dot(av, av));
    if (ratio > best) best = ratio;
    const double rq = ratio * ratio;
    if (prev_rq >= 0.0 && std::abs(rq - prev_rq) <= rel_tol * rq) break;
    prev_rq = rq;
    v = a.apply_transpose(av);
  }
  return best;
}

PNormResidual::PNormResidual(LinearMap a, Vector b, double p)
    : a_(std::move(a)), b_(std::move(b)), p_(p) {
  if (!(p_ > 1.0) || !std::isfinite(p_)) throw ConfigError("p-norm exponent must satisfy p > 1");
  if (b_.size() != a_.rows()) throw ConfigError("data vector length must match matrix rows");
  require_finite(b_, "p-norm data");
}

double PNormResidual::value(std::span<const double> x) const {
  Vector r = a_.apply(x);
  double s = 0.0;
  if (p_ == 2.0) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      const double d = r[i] - b_[i];
      s += d * d;
    }
    return 0.5 * s;
  }
  for (std::size_t i = 0; i < r.size(); ++i) s += std::pow(std::abs(r[i] - b_[i]), p_);
  return s / p_;
}

Vector PNormResidual::gradient(std::span<const double> x) const {
  Vector r = a_.apply(x);
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double d = r[i] - b_[i];
    if (p_ == 2.0) {
      r[i] = d;
    } else {
      r[i] = std::copysign(std::pow(std::abs(d), p_ - 1.0), d);
    }
  }
  return a_.apply_transpose(r);
}

std::optional<double> PNormResidual::lipschitz_bound() const {
  if (p_ != 2.0) return std::nullopt;
  return a_.norm_estimate() * a_.norm_estimate();
}

std::string PNormResidual::name() const {
  if (p_ == 2.0) return "quadratic";
  return "pnorm(p=" + std::to_string(p_) + ")";
}

double quadratic_lipschitz(const PNormResidual& f) {
  if (f.p() != 2.0) {
    throw Unsupported("a global gradient Lipschitz constant exists only for p = 2");
  }
  return *f.lipschitz_bound();
}

KLDivergence::KLDivergence(LinearMap a, Vector b) : a_(std::move(a)), b_(std::move(b)) {
  if (!a_.nonnegative()) throw ConfigError("KL divergence requires a nonnegative matrix");
  if (b_.size() != a_.rows()) throw ConfigError("data vector length must match matrix rows");
  for (double v : b_) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("KL data must be strictly positive");
  }
}

bool KLDivergence::in_domain(std::span<const double> x) const {
  const Vector ax = a_.apply(x);
  for (double v : ax) {
    if (!(v > 0.0)) return false;
  }
  return true;
}

double KLDivergence::value(std::span<const double> x) const {
  const Vector ax = a_.apply(x);
  double s = 0.0;
  for (std::size_t i = 0; i < ax.size(); ++i) {
    if (!(ax[i] > 0.0)) return kInf;
    s += b_[i] * std::log(b_[i] / ax[i]) + ax[i] - b_[i];
  }
  return s;
}

Vector KLDivergence::gradient(std::span<const double> x) const {
  Vector ax = a_.apply(x);
  for (std::size_t i = 0; i < ax.size(); ++i) {
    if (!(ax[i] > 0.0)) throw DomainError("KL gradient requested where (Ax)_i <= 0");
    ax[i] = 1.0 - b_[i] / ax[i];
  }
  return a_.apply_transpose(ax);
}

}  // namespace vmfbs
