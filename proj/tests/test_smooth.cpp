#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "vmfbs/errors.hpp"
#include "vmfbs/prox.hpp"
#include "vmfbs/smooth.hpp"

using namespace vmfbs;

namespace {

LinearMap random_map(std::mt19937_64& rng, std::size_t m, std::size_t n, double lo, double hi) {
  return LinearMap(m, n, oracle::random_vec(rng, m * n, lo, hi));
}

std::shared_ptr<SeparableTerm> l1(std::size_t n, double w) {
  return std::make_shared<SeparableTerm>(SeparableTerm::l1(n, w));
}

}  // namespace

TEST_CASE("objective evaluation") {
  SUBCASE("half squared norm at the origin") {
    CompositeProblem p(make_quadratic(LinearMap::identity(3), Vector(3, 0.0)),
                       std::make_shared<SeparableTerm>(SeparableTerm::zero(3)));
    CHECK(eval_objective(p, Vector{0, 0, 0}) == 0.0);
  }
  SUBCASE("1-D lasso at x = 2") {
    CompositeProblem p(make_quadratic(LinearMap::identity(1), Vector{3.0}), l1(1, 1.0));
    CHECK(eval_objective(p, Vector{2.0}) == 2.5);
  }
  SUBCASE("KL outside its domain") {
    auto kl = std::make_shared<KLDivergence>(LinearMap::identity(2), Vector{1.0, 1.0});
    CompositeProblem p(kl, std::make_shared<SeparableTerm>(SeparableTerm::box(2, 0.0, kInf)));
    CHECK(eval_objective(p, Vector{0.0, 1.0}) == kInf);
    CHECK(kl->value(Vector{-1.0, 1.0}) == kInf);
    CHECK_THROWS_AS(eval_gradient(p, Vector{0.0, 1.0}), DomainError);
    CHECK(p.regime() == DomainRegime::general);
  }
  SUBCASE("dimension mismatch") {
    CompositeProblem p(make_quadratic(LinearMap::identity(2), Vector(2, 0.0)), l1(2, 1.0));
    CHECK_THROWS_AS(eval_objective(p, Vector{1.0}), UsageError);
    CHECK_THROWS_AS(CompositeProblem(make_quadratic(LinearMap::identity(2), Vector(2, 0.0)), l1(3, 1.0)),
                    ConfigError);
  }
}

TEST_CASE("gradient examples") {
  CompositeProblem sq(make_quadratic(LinearMap::identity(2), Vector(2, 0.0)),
                      std::make_shared<SeparableTerm>(SeparableTerm::zero(2)));
  CHECK(eval_gradient(sq, Vector{3, 4}) == Vector{3, 4});

  // (1/4) x^4 as a p-norm with p = 4, checked against central differences
  PNormResidual quartic(LinearMap::identity(1), Vector{0.0}, 4.0);
  const Vector g = quartic.gradient(Vector{2.0});
  const Vector fd = oracle::fd_gradient([&](const Vector& x) { return quartic.value(x); }, {2.0});
  CHECK(g[0] == doctest::Approx(8.0).epsilon(1e-15));
  CHECK(fd[0] == doctest::Approx(8.0).epsilon(1e-8));

  KLDivergence kl(LinearMap::identity(1), Vector{1.0});
  const Vector gk = kl.gradient(Vector{2.0});
  const Vector fk = oracle::fd_gradient([&](const Vector& x) { return kl.value(x); }, {2.0});
  CHECK(gk[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(fk[0] == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("gradients agree with finite differences") {
  std::mt19937_64 rng(7);
  for (double p : {1.5, 2.0, 3.0, 4.0}) {
    CAPTURE(p);
    for (int trial = 0; trial < 20; ++trial) {
      PNormResidual f(random_map(rng, 6, 4, -1.0, 1.0), oracle::random_vec(rng, 6, -1.0, 1.0), p);
      const Vector x = oracle::random_vec(rng, 4, -2.0, 2.0);
      const Vector fd = oracle::fd_gradient([&](const Vector& v) { return f.value(v); }, x);
      CHECK(oracle::rel_error(f.gradient(x), fd) < 1e-6);
    }
  }
  for (int trial = 0; trial < 20; ++trial) {
    KLDivergence f(random_map(rng, 5, 4, 0.1, 1.0), oracle::random_vec(rng, 5, 0.5, 2.0));
    const Vector x = oracle::random_vec(rng, 4, 0.2, 2.0);
    const Vector fd = oracle::fd_gradient([&](const Vector& v) { return f.value(v); }, x);
    CHECK(oracle::rel_error(f.gradient(x), fd) < 1e-6);
  }
}

TEST_CASE("convexity spot-check on random interior pairs") {
  std::mt19937_64 rng(11);
  std::vector<std::shared_ptr<SmoothTerm>> terms;
  terms.push_back(std::make_shared<PNormResidual>(random_map(rng, 5, 3, -1, 1), oracle::random_vec(rng, 5, -1, 1), 1.5));
  terms.push_back(std::make_shared<PNormResidual>(random_map(rng, 5, 3, -1, 1), oracle::random_vec(rng, 5, -1, 1), 2.0));
  terms.push_back(std::make_shared<PNormResidual>(random_map(rng, 5, 3, -1, 1), oracle::random_vec(rng, 5, -1, 1), 4.0));
  terms.push_back(std::make_shared<KLDivergence>(random_map(rng, 5, 3, 0.1, 1), oracle::random_vec(rng, 5, 0.5, 2)));
  for (const auto& f : terms) {
    CAPTURE(f->name());
    for (int trial = 0; trial < 200; ++trial) {
      const Vector x = oracle::random_vec(rng, 3, 0.05, 3.0);
      const Vector y = oracle::random_vec(rng, 3, 0.05, 3.0);
      Vector mid(3);
      for (int i = 0; i < 3; ++i) mid[i] = 0.5 * (x[i] + y[i]);
      const double lhs = f->value(mid);
      const double rhs = 0.5 * f->value(x) + 0.5 * f->value(y);
      CHECK(lhs <= rhs + 1e-12 * (1.0 + std::abs(rhs)));
    }
  }
}

TEST_CASE("Lipschitz constant of the quadratic gradient") {
  auto two_i = make_quadratic(LinearMap::diagonal(Vector{2, 2, 2}), Vector(3, 0.0));
  CHECK(quadratic_lipschitz(*two_i) == doctest::Approx(4.0).epsilon(1e-12));
  auto d13 = make_quadratic(LinearMap::diagonal(Vector{1, 3}), Vector(2, 0.0));
  CHECK(quadratic_lipschitz(*d13) == doctest::Approx(9.0).epsilon(1e-12));

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const Vector a = oracle::random_vec(rng, 25, -1.0, 1.0);
    auto f = make_quadratic(LinearMap(5, 5, a), Vector(5, 0.0));
    CHECK(std::abs(quadratic_lipschitz(*f) - oracle::lipschitz_ata(a, 5, 5)) < 1e-6);
  }

  PNormResidual quartic(LinearMap::identity(2), Vector(2, 0.0), 4.0);
  CHECK_THROWS_AS(quadratic_lipschitz(quartic), Unsupported);
  CHECK_FALSE(quartic.lipschitz_bound().has_value());
}

TEST_CASE("linear map validation") {
  CHECK_THROWS_AS(LinearMap(2, 2, Vector{1, 2, 3}), ConfigError);
  CHECK_THROWS_AS(LinearMap(1, 1, Vector{NAN}), ConfigError);
  CHECK_THROWS_AS(KLDivergence(LinearMap::diagonal(Vector{1, -1}), Vector{1, 1}), ConfigError);
  CHECK_THROWS_AS(KLDivergence(LinearMap::identity(2), Vector{1, 0}), ConfigError);
  CHECK_THROWS_AS(PNormResidual(LinearMap::identity(1), Vector{0}, 1.0), ConfigError);
}
