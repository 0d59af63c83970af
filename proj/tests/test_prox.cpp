#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "vmfbs/errors.hpp"
#include "vmfbs/metrics.hpp"
#include "vmfbs/prox.hpp"

using namespace vmfbs;

TEST_CASE("soft threshold") {
  CHECK(soft_threshold(0.0, 0.7) == 0.0);
  CHECK(soft_threshold(2.0, 0.5) == 1.5);
  CHECK(soft_threshold(-1.0, 2.0) == 0.0);
  const double brute = oracle::golden_section(
      [](double y) { return std::abs(y) + (y - 2.0) * (y - 2.0) / (2.0 * 0.5); }, -5.0, 5.0);
  CHECK(brute == doctest::Approx(1.5).epsilon(1e-7));
  const double brute0 = oracle::golden_section(
      [](double y) { return std::abs(y) + (y + 1.0) * (y + 1.0) / (2.0 * 2.0); }, -5.0, 5.0);
  CHECK(std::abs(brute0) < 1e-7);
  CHECK_THROWS_AS(soft_threshold(1.0, -0.1), UsageError);
}

TEST_CASE("box projection") {
  CHECK(project_box(Vector{5.0}, Vector{0.0}, Vector{1.0}) == Vector{1.0});
  CHECK(project_box(Vector{-3.0}, Vector{0.0}, Vector{kInf}) == Vector{0.0});
  CHECK(project_box(Vector{0.5}, Vector{0.0}, Vector{1.0}) == Vector{0.5});
  CHECK_THROWS_AS(project_box(Vector{0.5}, Vector{1.0}, Vector{0.0}), ConfigError);
}

TEST_CASE("1-D TV prox") {
  SUBCASE("two points, closed form") {
    const Vector a = prox_tv1d(Vector{1.0, 0.0}, 0.25);
    CHECK(a[0] == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(a[1] == doctest::Approx(0.25).epsilon(1e-15));
    const Vector b = prox_tv1d(Vector{1.0, 0.0}, 1.0);
    CHECK(b[0] == 0.5);
    CHECK(b[1] == 0.5);
    const auto [y1, y2] = oracle::golden_section_2d(
        [](double u, double v) { return 0.25 * std::abs(v - u) + 0.5 * ((u - 1) * (u - 1) + v * v); },
        -2.0, 2.0);
    CHECK(y1 == doctest::Approx(0.75).epsilon(1e-6));
    CHECK(y2 == doctest::Approx(0.25).epsilon(1e-6));
  }
  SUBCASE("constant input is a fixed point") {
    const Vector z(7, 1.25);
    CHECK(prox_tv1d(z, 3.0) == z);
  }
  SUBCASE("agrees with a dual projected-gradient oracle") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = 2 + trial % 9;
      const Vector z = oracle::random_vec(rng, n, -2.0, 2.0);
      const double gamma = std::uniform_real_distribution<double>(0.01, 1.5)(rng);
      const Vector p = prox_tv1d(z, gamma);
      const Vector ref = oracle::tv_prox_dual(z, gamma);
      auto obj = [&](const Vector& y) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += 0.5 * (y[i] - z[i]) * (y[i] - z[i]);
        return gamma * oracle::tv(y) + s;
      };
      CHECK(obj(p) <= obj(ref) + 1e-12);
      CHECK(oracle::rel_error(p, ref) < 1e-8);
      TotalVariation1D g(n, 1.0);
      CHECK(g.optimality_residual(z, gamma, p) < 1e-10);
    }
  }
}

TEST_CASE("optimality residual examples") {
  const SeparableTerm g = SeparableTerm::l1(1, 1.0);
  CHECK(g.optimality_residual(Vector{3.0}, 1.0, Vector{2.0}) == 0.0);
  CHECK(g.optimality_residual(Vector{3.0}, 1.0, Vector{3.0}) == 1.0);
  const SeparableTerm zero = SeparableTerm::zero(3);
  const Vector z{0.3, -1.0, 4.0};
  CHECK(zero.optimality_residual(z, 0.7, z) == 0.0);
  const TotalVariation1D boxed(3, 1.0, 0.0, 1.0);
  CHECK_THROWS_AS(boxed.optimality_residual(z, 1.0, boxed.prox(z, 1.0)), Unsupported);
}

TEST_CASE("metric prox") {
  const SeparableTerm g = SeparableTerm::l1(2, 1.0);
  const Vector p = metric_prox(g, DiagonalMetric(Vector{2.0, 4.0}), Vector{2.0, -2.0}, 1.0);
  CHECK(p == Vector{1.5, -1.75});
  // per-coordinate oracle: argmin |y| + w/2 (y - z)^2
  const double y0 = oracle::golden_section([](double y) { return std::abs(y) + (y - 2) * (y - 2); }, -5, 5);
  const double y1 = oracle::golden_section([](double y) { return std::abs(y) + 2 * (y + 2) * (y + 2); }, -5, 5);
  CHECK(y0 == doctest::Approx(1.5).epsilon(1e-7));
  CHECK(y1 == doctest::Approx(-1.75).epsilon(1e-7));

  CHECK(metric_prox(SeparableTerm::l1(1, 1.0), DiagonalMetric::identity(1), Vector{3.0}, 1.0) == Vector{2.0});
  CHECK(metric_prox(SeparableTerm::box(1, 0.0, kInf), DiagonalMetric::identity(1), Vector{1.0}, 0.3) == Vector{1.0});

  const TotalVariation1D tv(2, 1.0);
  CHECK_THROWS_AS(metric_prox(tv, DiagonalMetric(Vector{1.0, 2.0}), Vector{1.0, 0.0}, 1.0), ConfigError);
  // scalar metric c rescales the stepsize exactly
  const Vector scaled = metric_prox(tv, DiagonalMetric(Vector{4.0, 4.0}), Vector{1.0, 0.0}, 1.0);
  CHECK(scaled == prox_tv1d(Vector{1.0, 0.0}, 0.25));
}

TEST_CASE("identity metric prox equals the Euclidean prox for every catalog term") {
  std::mt19937_64 rng(17);
  const std::size_t n = 6;
  std::vector<std::shared_ptr<ProxTerm>> terms = {
      std::make_shared<SeparableTerm>(SeparableTerm::l1(n, 0.7)),
      std::make_shared<SeparableTerm>(SeparableTerm::box(n, -0.5, 1.0)),
      std::make_shared<SeparableTerm>(SeparableTerm::l1_box(n, 0.3, 0.0, kInf)),
      std::make_shared<TotalVariation1D>(n, 0.4),
      std::make_shared<TotalVariation1D>(n, 0.4, 0.0, 1.0),
  };
  for (const auto& g : terms) {
    for (int trial = 0; trial < 20; ++trial) {
      const Vector z = oracle::random_vec(rng, n, -2.0, 2.0);
      CHECK(metric_prox(*g, DiagonalMetric::identity(n), z, 0.8) == g->prox(z, 0.8));
    }
  }
}

TEST_CASE("separable prox against scalar brute force") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-3.0, 3.0), pos(0.05, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double a = trial % 3 == 0 ? 0.0 : pos(rng);
    double lo = u(rng), hi = u(rng);
    if (lo > hi) std::swap(lo, hi);
    if (trial % 5 == 0) hi = kInf;
    const double z = u(rng), gamma = pos(rng), w = pos(rng);
    const SeparableTerm g(Vector{a}, Vector{lo}, Vector{hi});
    const Vector p = g.prox(Vector{z}, gamma, Vector{w});
    const double ref = oracle::golden_section(
        [&](double y) { return a * std::abs(y) + w * (y - z) * (y - z) / (2 * gamma); }, lo,
        std::isfinite(hi) ? hi : 10.0);
    CHECK(std::abs(p[0] - ref) < 1e-6);
    CHECK(g.optimality_residual(Vector{z}, gamma, p, Vector{w}) < 1e-10);
  }
}

TEST_CASE("prox is nonexpansive") {
  std::mt19937_64 rng(29);
  const SeparableTerm g = SeparableTerm::l1_box(5, 0.5, -1.0, 2.0);
  const TotalVariation1D tv(5, 0.5);
  for (int trial = 0; trial < 100; ++trial) {
    const Vector a = oracle::random_vec(rng, 5, -3, 3), b = oracle::random_vec(rng, 5, -3, 3);
    for (const ProxTerm* t : {static_cast<const ProxTerm*>(&g), static_cast<const ProxTerm*>(&tv)}) {
      const Vector pa = t->prox(a, 0.9), pb = t->prox(b, 0.9);
      double dp = 0.0, dz = 0.0;
      for (int i = 0; i < 5; ++i) {
        dp += (pa[i] - pb[i]) * (pa[i] - pb[i]);
        dz += (a[i] - b[i]) * (a[i] - b[i]);
      }
      CHECK(dp <= dz + 1e-14);
    }
  }
}

TEST_CASE("prox distance shrinks as gamma halves") {
  std::mt19937_64 rng(31);
  const TotalVariation1D tv(6, 1.0);
  const SeparableTerm g = SeparableTerm::l1(6, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector x = oracle::random_vec(rng, 6, -2, 2);
    for (const ProxTerm* t : {static_cast<const ProxTerm*>(&g), static_cast<const ProxTerm*>(&tv)}) {
      double prev = kInf;
      for (double gamma = 1.0; gamma > 1e-6; gamma *= 0.5) {
        const Vector p = t->prox(x, gamma);
        double d = 0.0;
        for (int i = 0; i < 6; ++i) d += (p[i] - x[i]) * (p[i] - x[i]);
        CHECK(d <= prev);
        prev = d;
      }
      CHECK(prev < 1e-9);
    }
  }
}

TEST_CASE("objective differences match value differences and survive tiny steps") {
  const SeparableTerm l1 = SeparableTerm::l1_box(3, 0.7, -2.0, 2.0);
  const TotalVariation1D tv(3, 1.3);
  const Vector x{0.5, -1.25, 1.0};
  const Vector y{-0.25, 1.5, 1.75};
  CHECK(l1.difference(x, y) == doctest::Approx(l1.value(y) - l1.value(x)));
  CHECK(tv.difference(x, y) == doctest::Approx(tv.value(y) - tv.value(x)));
  CHECK(l1.difference(x, Vector{0.0, 3.0, 0.0}) == kInf);

  // A 2^-46 move next to a coordinate of 1e3 is below ulp(1001), so
  // value(b) - value(a) loses it; the term-wise sum keeps it exactly.
  const SeparableTerm big = SeparableTerm::l1(2, 1.0);
  const Vector a{1e3, 1.0};
  const Vector b{1e3, 1.0 + 0x1p-46};
  CHECK(big.difference(a, b) == 0x1p-46);
}
