#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "vmfbs/errors.hpp"
#include "vmfbs/solver.hpp"

using namespace vmfbs;

TEST_CASE("1-D lasso with fixed unit steps reaches the minimizer in one step") {
  SolverConfig c;
  c.linesearch.rule = Rule::Fixed;
  c.linesearch.fixed_gamma = 1.0;
  c.linesearch.fixed_lambda = 1.0;
  c.max_iterations = 10;
  const SolveResult r = solve(*fixtures::lasso_1d(), Vector{0.0}, c);
  CHECK(r.termination == Termination::fixed_point);
  REQUIRE(r.trace.size() == 2);
  CHECK(r.trace[0].F == 4.5);
  CHECK(r.trace[1].F == 2.5);
  CHECK(r.trace[1].tag == StepTag::fixed_point);
  CHECK(r.x_final == Vector{2.0});
  CHECK(r.F_final == 2.5);
  CHECK(r.verification.pass);
  CHECK(r.objective_values() == std::vector<double>{4.5, 2.5});
}

TEST_CASE("exact step on the unit quadratic") {
  SolverConfig c;
  c.linesearch.rule = Rule::Fixed;
  c.linesearch.fixed_gamma = 1.0;
  c.max_iterations = 5;
  c.record_iterates = true;
  const SolveResult r = solve(*fixtures::unit_square(), Vector{1.0}, c);
  CHECK(r.trace.size() == 2);
  CHECK(r.trace[0].x_next == Vector{0.0});
  CHECK(r.x_final == Vector{0.0});
}

TEST_CASE("every rule solves the 1-D lasso") {
  for (Rule rule : {Rule::LS1, Rule::LS2, Rule::LS3, Rule::LS4, Rule::TsengYun}) {
    CAPTURE(to_string(rule));
    SolverConfig c;
    c.linesearch.rule = rule;
    c.max_iterations = 200;
    const SolveResult r = solve(*fixtures::lasso_1d(), Vector{-4.0}, c);
    CHECK(r.termination == Termination::fixed_point);
    CHECK(std::abs(r.x_final[0] - 2.0) < 1e-10);
    CHECK(r.verification.pass);
  }
}

TEST_CASE("KL with nonnegativity stays inside the domain") {
  auto p = std::make_shared<CompositeProblem>(
      std::make_shared<KLDivergence>(LinearMap::identity(2), Vector{1.0, 1.0}),
      std::make_shared<SeparableTerm>(SeparableTerm::box(2, 0.0, kInf)));
  CHECK(p->regime() == DomainRegime::general);
  for (Rule rule : {Rule::LS1, Rule::LS2, Rule::LS3, Rule::LS4, Rule::TsengYun}) {
    CAPTURE(to_string(rule));
    SolverConfig c;
    c.linesearch.rule = rule;
    c.linesearch.gamma_bar = 8.0;
    c.max_iterations = 500;
    c.record_iterates = true;
    const SolveResult r = solve(*p, Vector{2.0, 2.0}, c);
    CHECK(r.termination != Termination::search_failure);
    for (std::size_t k = 0; k < r.trace.size(); ++k) {
      const auto& rec = r.trace[k];
      CHECK(rec.x[0] > 0.0);
      CHECK(rec.x[1] > 0.0);
      CHECK(rec.domain_gamma > 0.0);
      if (k > 0) CHECK(rec.F <= r.trace[k - 1].F);
    }
    CHECK(std::abs(r.x_final[0] - 1.0) < 1e-6);
    CHECK(r.verification.pass);
  }
}

TEST_CASE("fixed-step validation") {
  auto p = std::make_shared<CompositeProblem>(make_quadratic(LinearMap::diagonal(Vector{2.0}), Vector{0.0}),
                                              std::make_shared<SeparableTerm>(SeparableTerm::zero(1)));
  SolverConfig c;
  c.linesearch.rule = Rule::Fixed;
  c.linesearch.fixed_gamma = 0.45;
  FixedStepReport r = fixed_step_validate(*p, c, 10);
  CHECK(r.pass);
  CHECK(r.margin == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(r.lipschitz == doctest::Approx(4.0).epsilon(1e-12));

  c.linesearch.fixed_gamma = 0.5;
  CHECK_FALSE(fixed_step_validate(*p, c, 10).pass);
  CHECK_THROWS_AS(solve(*p, Vector{1.0}, c), ConfigError);

  c.linesearch.fixed_gamma = 0.9;
  c.metrics = std::make_shared<ConstantSchedule>(Vector{2.0});
  r = fixed_step_validate(*p, c, 10);
  CHECK(r.pass);
  CHECK(r.sup_ratio == doctest::Approx(0.45).epsilon(1e-12));

  SolverConfig quartic;
  quartic.linesearch.rule = Rule::Fixed;
  auto q = std::make_shared<CompositeProblem>(std::make_shared<PNormResidual>(LinearMap::identity(1), Vector{0.0}, 4.0),
                                              std::make_shared<SeparableTerm>(SeparableTerm::zero(1)));
  CHECK_THROWS_AS(fixed_step_validate(*q, quartic, 5), ConfigError);
  quartic.lipschitz = 3.0;
  quartic.linesearch.fixed_gamma = 0.5;
  CHECK(fixed_step_validate(*q, quartic, 5).pass);

  SolverConfig general;
  general.linesearch.rule = Rule::Fixed;
  general.lipschitz = 1.0;
  general.linesearch.fixed_gamma = 0.1;
  CHECK_THROWS_AS(solve(*fixtures::scalar_kl(), Vector{2.0}, general), ConfigError);
}

TEST_CASE("stopping rule") {
  SolverConfig c;
  std::vector<IterateRecord> trace(1);
  trace[0].tag = StepTag::fixed_point;
  CHECK(stopping_check(trace, c) == Termination::fixed_point);

  trace.assign(60, IterateRecord{});
  for (std::size_t k = 0; k < trace.size(); ++k) {
    trace[k].F = 100.0 - static_cast<double>(k);
    trace[k].fixed_point_measure = 1.0;
  }
  c.tol_objective_stall = 1e-12;
  CHECK_FALSE(stopping_check(trace, c).has_value());

  for (std::size_t k = 0; k < trace.size(); ++k) trace[k].F = 1.0 - 1e-16 * static_cast<double>(k) / 50.0;
  CHECK(stopping_check(trace, c) == Termination::objective_stall);
  c.tol_objective_stall = 0.0;
  CHECK_FALSE(stopping_check(trace, c).has_value());
}

TEST_CASE("input validation") {
  SolverConfig c;
  CHECK_THROWS_AS(solve(*fixtures::scalar_kl(), Vector{-1.0}, c), UsageError);
  try {
    solve(*fixtures::scalar_kl(), Vector{-1.0}, c);
  } catch (const UsageError& e) {
    CHECK(std::string(e.what()).find("dom g") != std::string::npos);
  }
  auto open_kl = std::make_shared<CompositeProblem>(
      std::make_shared<KLDivergence>(LinearMap::identity(1), Vector{1.0}),
      std::make_shared<SeparableTerm>(SeparableTerm::box(1, -5.0, 5.0)));
  try {
    solve(*open_kl, Vector{-1.0}, c);
    FAIL("expected a usage error");
  } catch (const UsageError& e) {
    CHECK(std::string(e.what()).find("dom f") != std::string::npos);
  }
  CHECK_THROWS_AS(solve(*fixtures::lasso_1d(), Vector{0.0, 1.0}, c), UsageError);
  c.max_iterations = 0;
  CHECK_THROWS_AS(solve(*fixtures::lasso_1d(), Vector{0.0}, c), ConfigError);

  SolverConfig tv;
  tv.metrics = std::make_shared<ConstantSchedule>(Vector{1.0, 2.0});
  auto p = std::make_shared<CompositeProblem>(make_quadratic(LinearMap::identity(2), Vector{1.0, 0.0}),
                                              std::make_shared<TotalVariation1D>(2, 1.0));
  CHECK_THROWS_AS(solve(*p, Vector{0.0, 0.0}, tv), ConfigError);
}

TEST_CASE("search failures are reported, not thrown") {
  SolverConfig c;
  c.linesearch.max_backtracks = 1;
  const SolveResult r = solve(*fixtures::scaled_square(), Vector{1.0}, c);
  CHECK(r.termination == Termination::search_failure);
  CHECK_FALSE(r.message.empty());
  CHECK(r.x_final == Vector{1.0});
}

TEST_CASE("variable metrics on a random least-squares + l1 problem") {
  std::mt19937_64 rng(53);
  const std::size_t m = 12, n = 8;
  auto p = std::make_shared<CompositeProblem>(
      make_quadratic(LinearMap(m, n, oracle::random_vec(rng, m * n, -1, 1)), oracle::random_vec(rng, m, -1, 1)),
      std::make_shared<SeparableTerm>(SeparableTerm::l1(n, 0.1)));
  SolverConfig base;
  base.max_iterations = 5000;
  const SolveResult ref = solve(*p, Vector(n, 0.0), base);

  SolverConfig bb = base;
  bb.metrics = std::make_shared<SafeguardedBBSchedule>(n, 0.05, 20.0, 1.0);
  bb.record_iterates = true;
  const SolveResult r = solve(*p, Vector(n, 0.0), bb);
  CHECK(r.verification.pass);
  CHECK(std::abs(r.F_final - ref.F_final) < 1e-9 * (1 + std::abs(ref.F_final)));
  for (std::size_t k = 1; k < r.trace.size(); ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(r.trace[k].weights[i] <= (1 + std::ldexp(1.0, -static_cast<int>(std::min<std::size_t>(k, 1000)))) *
                                          r.trace[k - 1].weights[i] * (1 + 1e-15));
    }
  }

  // Square-summability proxy: the last tenth of the run adds a vanishing share.
  double total = 0.0, tail = 0.0;
  for (std::size_t k = 0; k < ref.trace.size(); ++k) {
    const double s = ref.trace[k].step_norm * ref.trace[k].step_norm;
    total += s;
    if (k >= ref.trace.size() * 9 / 10) tail += s;
  }
  CHECK(tail <= 1e-6 * total);
}

TEST_CASE("trace counters and determinism") {
  SolverConfig c;
  c.linesearch.rule = Rule::LS3;
  c.max_iterations = 50;
  const auto p = fixtures::scaled_square();
  const SolveResult a = solve(*p, Vector{1.0}, c);
  const SolveResult b = solve(*p, Vector{1.0}, c);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t k = 0; k < a.trace.size(); ++k) {
    CHECK(a.trace[k].F == b.trace[k].F);
    CHECK(a.trace[k].gamma == b.trace[k].gamma);
  }
  CHECK(a.evals.grad > a.trace.size());
  CHECK(a.trace.back().evals.grad == a.evals.grad);
}
