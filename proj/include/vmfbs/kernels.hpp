#pragma once

// Dense vector kernels used in the solver inner loops.
//
// Every kernel has a portable scalar reference implementation; on x86-64 an
// AVX2/FMA variant is compiled separately and chosen at first use when the
// CPU supports it. VMFBS_KERNELS=scalar|avx2 in the environment overrides the
// choice. Elementwise kernels are bit-identical across variants; reductions
// differ only by summation order.

#include <cstddef>
#include <span>
#include <string_view>

namespace vmfbs::kernels {

struct KernelTable {
  const char* name;

  // sum a_i b_i
  double (*dot)(const double* a, const double* b, std::size_t n);
  // sum w_i v_i^2
  double (*weighted_sq_norm)(const double* w, const double* v, std::size_t n);
  // sum w_i (a_i - b_i)^2
  double (*weighted_sq_dist)(const double* w, const double* a, const double* b, std::size_t n);
  // sum (a_i - b_i)^2 / w_i
  double (*inv_weighted_sq_dist)(const double* w, const double* a, const double* b, std::size_t n);
  // out = x + t (y - x)
  void (*lerp)(const double* x, const double* y, double t, double* out, std::size_t n);
  // out = x - gamma g / w
  void (*scaled_step)(const double* x, const double* g, const double* w, double gamma, double* out,
                      std::size_t n);
  // out = sign(z) max(|z| - tau, 0)
  void (*soft_threshold)(const double* z, const double* tau, double* out, std::size_t n);
  // out = min(max(z, lo), hi)
  void (*clamp)(const double* z, const double* lo, const double* hi, double* out, std::size_t n);
  // out = A x, A row-major rows x cols
  void (*gemv)(const double* a, std::size_t rows, std::size_t cols, const double* x, double* out);
  // out = A^T r
  void (*gemv_t)(const double* a, std::size_t rows, std::size_t cols, const double* r, double* out);
};

const KernelTable& scalar_table();

/// nullptr when the variant was not compiled in or the CPU lacks the ISA.
const KernelTable* avx2_table();

/// Table selected for this process.
const KernelTable& active();

/// Forces a variant ("scalar" or "avx2"); returns false if unavailable.
bool select(std::string_view name);

// Span front-ends over the active table. Sizes are the caller's contract.

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline double weighted_sq_norm(std::span<const double> w, std::span<const double> v) {
  return active().weighted_sq_norm(w.data(), v.data(), v.size());
}

inline double weighted_sq_dist(std::span<const double> w, std::span<const double> a,
                               std::span<const double> b) {
  return active().weighted_sq_dist(w.data(), a.data(), b.data(), a.size());
}

inline double inv_weighted_sq_dist(std::span<const double> w, std::span<const double> a,
                                   std::span<const double> b) {
  return active().inv_weighted_sq_dist(w.data(), a.data(), b.data(), a.size());
}

inline void lerp(std::span<const double> x, std::span<const double> y, double t,
                 std::span<double> out) {
  active().lerp(x.data(), y.data(), t, out.data(), x.size());
}

inline void scaled_step(std::span<const double> x, std::span<const double> g,
                        std::span<const double> w, double gamma, std::span<double> out) {
  active().scaled_step(x.data(), g.data(), w.data(), gamma, out.data(), x.size());
}

inline void soft_threshold(std::span<const double> z, std::span<const double> tau,
                           std::span<double> out) {
  active().soft_threshold(z.data(), tau.data(), out.data(), z.size());
}

inline void clamp(std::span<const double> z, std::span<const double> lo,
                  std::span<const double> hi, std::span<double> out) {
  active().clamp(z.data(), lo.data(), hi.data(), out.data(), z.size());
}

}  // namespace vmfbs::kernels
