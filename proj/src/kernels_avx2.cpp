// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include "kernels_internal.hpp"

namespace vmfbs::kernels::detail {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double weighted_sq_norm(const double* w, const double* v, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vv = _mm256_loadu_pd(v + i);
    acc = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + i), vv), vv, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += w[i] * v[i] * v[i];
  return s;
}

double weighted_sq_dist(const double* w, const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + i), d), d, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    s += w[i] * d * d;
  }
  return s;
}

double inv_weighted_sq_dist(const double* w, const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_add_pd(acc, _mm256_div_pd(_mm256_mul_pd(d, d), _mm256_loadu_pd(w + i)));
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d / w[i];
  }
  return s;
}

void lerp(const double* x, const double* y, double t, double* out, std::size_t n) {
  const __m256d vt = _mm256_set1_pd(t);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vx = _mm256_loadu_pd(x + i);
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(y + i), vx);
    _mm256_storeu_pd(out + i, _mm256_add_pd(vx, _mm256_mul_pd(vt, d)));
  }
  for (; i < n; ++i) out[i] = x[i] + t * (y[i] - x[i]);
}

void scaled_step(const double* x, const double* g, const double* w, double gamma, double* out,
                 std::size_t n) {
  const __m256d vg = _mm256_set1_pd(gamma);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d q = _mm256_div_pd(_mm256_loadu_pd(g + i), _mm256_loadu_pd(w + i));
    _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_mul_pd(vg, q)));
  }
  for (; i < n; ++i) out[i] = x[i] - gamma * (g[i] / w[i]);
}

void soft_threshold(const double* z, const double* tau, double* out, std::size_t n) {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vz = _mm256_loadu_pd(z + i);
    const __m256d mag = _mm256_andnot_pd(sign_mask, vz);
    const __m256d m = _mm256_max_pd(_mm256_sub_pd(mag, _mm256_loadu_pd(tau + i)), zero);
    _mm256_storeu_pd(out + i, _mm256_or_pd(m, _mm256_and_pd(vz, sign_mask)));
  }
  for (; i < n; ++i) {
    const double m = (z[i] < 0 ? -z[i] : z[i]) - tau[i];
    const double r = m > 0.0 ? m : 0.0;
    out[i] = __builtin_copysign(r, z[i]);
  }
}

void clamp(const double* z, const double* lo, const double* hi, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    // max_pd/min_pd return the second operand on ties, matching the scalar select.
    const __m256d v = _mm256_max_pd(_mm256_loadu_pd(z + i), _mm256_loadu_pd(lo + i));
    _mm256_storeu_pd(out + i, _mm256_min_pd(v, _mm256_loadu_pd(hi + i)));
  }
  for (; i < n; ++i) {
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
    const __m256d ri = _mm256_set1_pd(r[i]);
    const double* row = a + i * cols;
    std::size_t c = 0;
    for (; c + 4 <= cols; c += 4) {
      _mm256_storeu_pd(out + c,
                       _mm256_fmadd_pd(ri, _mm256_loadu_pd(row + c), _mm256_loadu_pd(out + c)));
    }
    for (; c < cols; ++c) out[c] += r[i] * row[c];
  }
}

}  // namespace

const KernelTable kAvx2Table{
    "avx2",      dot,   weighted_sq_norm, weighted_sq_dist, inv_weighted_sq_dist, lerp,
    scaled_step, soft_threshold, clamp,   gemv,             gemv_t,
};

}  // namespace vmfbs::kernels::detail
