#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "vmfbs/diagnostics.hpp"
#include "vmfbs/errors.hpp"

using namespace vmfbs;

namespace {

SolveResult lasso_run(Rule rule = Rule::LS1) {
  SolverConfig c;
  c.linesearch.rule = rule;
  c.max_iterations = 50;
  c.record_iterates = true;
  return solve(*fixtures::lasso_1d(), Vector{0.0}, c);
}

}  // namespace

TEST_CASE("descent inequality") {
  const auto p = fixtures::lasso_1d();
  SolveResult r = lasso_run();
  CheckReport rep = check_descent_inequality(*p, r);
  CHECK(rep.pass);
  CHECK(rep.worst <= 0.0);
  // the last row is the fixed point: both sides vanish
  CHECK(rep.residuals.back() == 0.0);

  r.trace[0].y[0] += 0.5;  // corrupt the prox point
  rep = check_descent_inequality(*p, r);
  CHECK_FALSE(rep.pass);
  CHECK(rep.residuals[0] > 0.0);

  SolverConfig bare;
  const SolveResult no_iterates = solve(*p, Vector{0.0}, bare);
  CHECK_THROWS_AS(check_descent_inequality(*p, no_iterates), UsageError);
}

TEST_CASE("quasi-Fejer inequality") {
  const auto p = fixtures::lasso_1d();
  for (Rule rule : {Rule::LS1, Rule::LS2, Rule::LS3, Rule::LS4}) {
    const SolveResult r = lasso_run(rule);
    FejerParams fp;
    fp.delta = 0.5;
    const CheckReport rep = check_quasi_fejer(*p, r, Vector{2.0}, fp);
    CHECK(rep.pass);
    CHECK(rep.worst <= 0.0);
  }

  SUBCASE("exact steps on a quadratic give near-equality") {
    SolverConfig c;
    c.linesearch.rule = Rule::Fixed;
    c.linesearch.fixed_gamma = 0.5;
    c.max_iterations = 30;
    c.record_iterates = true;
    const auto q = fixtures::unit_square();
    const SolveResult r = solve(*q, Vector{1.0}, c);
    FejerParams fp;
    fp.delta = 0.25;  // L gamma lambda / (2 nu)
    const CheckReport rep = check_quasi_fejer(*q, r, Vector{0.0}, fp);
    CHECK(rep.pass);
    CHECK(rep.worst <= 0.0);
  }

  SUBCASE("a corrupted iterate trips the detector") {
    // The inequality holds for every reference point, so only a trace that
    // did not come from the iteration can violate it.
    SolveResult r = lasso_run();
    r.trace[0].x_next = Vector{-10.0};
    FejerParams fp;
    const CheckReport rep = check_quasi_fejer(*p, r, Vector{2.0}, fp);
    CHECK_FALSE(rep.pass);
    CHECK(rep.worst > 0.0);
  }

  SUBCASE("summable-spread branch with Euclidean norms") {
    SolverConfig c;
    c.metrics = fixtures::monotone_schedule();
    c.max_iterations = 50;
    c.record_iterates = true;
    const SolveResult r = solve(*p, Vector{-3.0}, c);
    FejerParams fp;
    fp.branch = FejerBranch::H5;
    fp.nu = 1.0;
    CHECK(check_quasi_fejer(*p, r, Vector{2.0}, fp).pass);
  }
}

TEST_CASE("stepsize floors") {
  FloorParams fp;
  fp.delta = 0.9;
  fp.theta = 0.5;
  fp.nu = 1.0;
  fp.lipschitz = 4.0;
  const Vector one{1.0};
  FloorReport r = check_stepsize_floor(Rule::LS1, Vector{0.25}, one, fp);
  CHECK(r.floor == doctest::Approx(0.225));
  CHECK(r.check.pass);
  r = check_stepsize_floor(Rule::LS3, Vector{0.125}, one, fp);
  CHECK(r.floor == doctest::Approx(0.1125));
  CHECK(r.check.pass);
  r = check_stepsize_floor(Rule::LS2, one, Vector{0.25}, fp);
  CHECK(r.floor == doctest::Approx(0.225));
  CHECK(r.observed_min == 0.25);
  CHECK(r.check.pass);
  // mutation: an accepted value below the floor
  CHECK_FALSE(check_stepsize_floor(Rule::LS1, Vector{0.2}, one, fp).check.pass);
  CHECK_THROWS_AS(check_stepsize_floor(Rule::TsengYun, one, one, fp), UsageError);
}

TEST_CASE("rate estimate") {
  SUBCASE("finite convergence gives zero ratios after the first step") {
    const SolveResult r = lasso_run();
    const RateReport rep = estimate_rate(r.objective_values(), 2.5);
    CHECK(rep.ratio[0] == 0.0);
    CHECK(rep.ratio[1] == 0.0);
  }
  SUBCASE("gradient descent on a quadratic contracts geometrically") {
    // f = x^2 / 2, gamma = 0.5: x_k = 0.5^k, F_k = 0.5^{2k+1}
    SolverConfig c;
    c.linesearch.rule = Rule::Fixed;
    c.linesearch.fixed_gamma = 0.5;
    c.linesearch.tol_fixed_point = 0.0;
    c.max_iterations = 40;
    const SolveResult r = solve(*fixtures::unit_square(), Vector{1.0}, c);
    const RateReport rep = estimate_rate(r.objective_values(), 0.0);
    for (std::size_t k = 2; k < 30; ++k) {
      CHECK(rep.ratio[k] == doctest::Approx(k * std::ldexp(1.0, -2 * static_cast<int>(k) - 1)));
      CHECK(rep.ratio[k + 1] < rep.ratio[k]);
    }
    CHECK(tail_sup(rep.ratio, 20) < tail_sup(rep.ratio, 10));
  }
  SUBCASE("inconsistent reference") {
    CHECK_THROWS_AS(estimate_rate(std::vector<double>{3.0, 2.0}, 2.5), UsageError);
  }
}

TEST_CASE("monotonicity and inline checks fire on corrupted traces") {
  CHECK(check_monotone(std::vector<double>{3, 2, 2, 1}).pass);
  CHECK_FALSE(check_monotone(std::vector<double>{3, 2, 2.0001, 1}).pass);
  SolveResult r = lasso_run();
  CHECK(check_inline(r).pass);
  r.trace[0].check_max_residual = 1e-6;
  CHECK_FALSE(check_inline(r).pass);
}
