#include <cmath>

#include "kernels_internal.hpp"

namespace vmfbs::kernels::detail {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double weighted_sq_norm(const double* w, const double* v, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * v[i] * v[i];
  return s;
}

double weighted_sq_dist(const double* w, const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    s += w[i] * d * d;
  }
  return s;
}

double inv_weighted_sq_dist(const double* w, const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d / w[i];
  }
  return s;
}

void lerp(const double* x, const double* y, double t, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] + t * (y[i] - x[i]);
}

void scaled_step(const double* x, const double* g, const double* w, double gamma, double* out,
                 std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] - gamma * (g[i] / w[i]);
}

void soft_threshold(const double* z, const double* tau, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double m = std::abs(z[i]) - tau[i];
    out[i] = std::copysign(m > 0.0 ? m : 0.0, z[i]);
  }
}

void clamp(const double* z, const double* lo, const double* hi, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double v = z[i] < lo[i] ? lo[i] : z[i];
    out[i] = v > hi[i] ? hi[i] : v;
  }
}

void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* out) {
  for (std::size_t r = 0; r < rows; ++r) out[r] = dot(a + r * cols, x, cols);
}

void gemv_t(const double* a, std::size_t rows, std::size_t cols, const double* r, double* out) {
  for (std::size_t c = 0; c < cols; ++c) out[c] = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    const double ri = r[i];
    const double* row = a + i * cols;
    for (std::size_t c = 0; c < cols; ++c) out[c] += ri * row[c];
  }
}

}  // namespace

const KernelTable kScalarTable{
    "scalar",        dot,   weighted_sq_norm, weighted_sq_dist, inv_weighted_sq_dist, lerp,
    scaled_step,     soft_threshold, clamp,   gemv,             gemv_t,
};

}  // namespace vmfbs::kernels::detail
