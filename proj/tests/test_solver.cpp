#include <doctest.h>

#include <limits>

#include "epiprox/oracles.hpp"
#include "epiprox/solver.hpp"
#include "test_helpers.hpp"

using namespace epiprox;

namespace {

SmoothTerm quadratic_to(Vec z) {
  SmoothTerm t;
  t.value = [z](const Vec& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
      s += 0.5 * (x[i] - z[i]) * (x[i] - z[i]);
    return s;
  };
  t.gradient = [z](const Vec& x) { return x - z; };
  t.lipschitz = 1.0;
  return t;
}

}  // namespace

TEST_CASE("step_constant") {
  SolverProblem p;
  p.dim = 3;
  p.smooth = quadratic_to(Vec(3, 0.0));
  // no dual terms: theta = lipschitz + max(0, but floored at 1) = 2
  CHECK(step_constant(p) == doctest::Approx(2.0));

  p.smooth.lipschitz = 2.0;
  p.dual_terms.push_back({identity_op(3), [](const Vec& v) { return v; }});
  CHECK(step_constant(p) == doctest::Approx(3.0));

  // two stacked dual blocks with bounds 3 and 4: sqrt(9+16) = 5
  LinOp a = identity_op(3);
  a.norm_bound = 3.0;
  LinOp b = identity_op(3);
  b.norm_bound = 4.0;
  p.dual_terms = {{a, [](const Vec& v) { return v; }},
                  {b, [](const Vec& v) { return v; }}};
  CHECK(step_constant(p) == doctest::Approx(7.0));
}

TEST_CASE("unconstrained quadratic converges to its minimizer") {
  Rng rng(51);
  Vec z = random_uniform(rng, 5, -2.0, 2.0);
  SolverProblem p;
  p.dim = 5;
  p.smooth = quadratic_to(z);
  p.primal_project = [](Vec x) { return x; };
  SolverConfig cfg;
  cfg.stop_rel = 1e-10;
  auto r = solve(p, Vec(5, 0.0), cfg);
  CHECK(r.trace.converged);
  CHECK(norm2(r.x - z) <= 1e-6);
}

TEST_CASE("box-constrained quadratic") {
  SolverProblem p;
  p.dim = 2;
  p.smooth = quadratic_to({2.0, -1.0});
  p.primal_project = [](Vec x) { return project_box({0.0, 1.0}, std::move(x)); };
  SolverConfig cfg;
  cfg.stop_rel = 1e-10;
  auto r = solve(p, Vec(2, 0.5), cfg);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.x[1] == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("box plus l1 budget dual term") {
  // minimize ||x - (2,-1)||^2/2 over [0,1]^2 with |x|_1 <= 0.5.
  // Solution (0.5, 0): the budget binds on the first coordinate only.
  SolverProblem p;
  p.dim = 2;
  p.smooth = quadratic_to({2.0, -1.0});
  p.primal_project = [](Vec x) { return project_box({0.0, 1.0}, std::move(x)); };
  p.dual_terms.push_back(
      {identity_op(2), [](const Vec& v) { return project_l1_ball(0.5, v); }});
  SolverConfig cfg;
  cfg.stop_rel = 1e-12;
  cfg.max_iters = 200000;
  auto r = solve(p, Vec(2, 0.0), cfg);
  CHECK(r.x[0] == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(std::abs(r.x[1]) <= 1e-5);
  auto [obj, viol] = objective_and_violations(p, r.x);
  CHECK(viol[0] <= 1e-5);
}

TEST_CASE("random small problems against a brute-force oracle") {
  Rng rng(52);
  for (int t = 0; t < 20; ++t) {
    const int n = 2 + static_cast<int>(rng() % 3);
    Vec z = random_uniform(rng, n, -2.0, 2.0);
    const double radius = random_uniform(rng, 1, 0.2, 1.5)[0];
    SolverProblem p;
    p.dim = n;
    p.smooth = quadratic_to(z);
    p.primal_project = [](Vec x) {
      return project_box({-1.0, 1.0}, std::move(x));
    };
    p.dual_terms.push_back({identity_op(n), [radius](const Vec& v) {
                              return project_l1_ball(radius, v);
                            }});
    SolverConfig cfg;
    cfg.stop_rel = 1e-12;
    cfg.max_iters = 300000;
    cfg.trace_every = 0;
    auto r = solve(p, Vec(n, 0.0), cfg);
    // oracle: project z onto box ∩ l1-ball with Dykstra (exact for the
    // intersection of convex sets, and that projection is the minimizer)
    Vec ref = oracle::dykstra(
        {[](const Vec& v) { return project_box({-1.0, 1.0}, Vec(v)); },
         [radius](const Vec& v) { return project_l1_ball(radius, v); }},
        z, 20000, 1e-14);
    CHECK(norm2(r.x - ref) <= 1e-5 * (1.0 + norm2(ref)));
  }
}

TEST_CASE("determinism and trace") {
  SolverProblem p;
  p.dim = 2;
  p.smooth = quadratic_to({2.0, -1.0});
  p.primal_project = [](Vec x) { return project_box({0.0, 1.0}, std::move(x)); };
  p.dual_terms.push_back(
      {identity_op(2), [](const Vec& v) { return project_l1_ball(0.5, v); }});
  SolverConfig cfg;
  cfg.stop_rel = 1e-8;
  auto r1 = solve(p, Vec(2, 0.0), cfg);
  auto r2 = solve(p, Vec(2, 0.0), cfg);
  CHECK(r1.x == r2.x);  // bitwise
  REQUIRE(!r1.trace.rows.empty());
  CHECK(r1.trace.rows.size() == r2.trace.rows.size());
  for (std::size_t i = 0; i < r1.trace.rows.size(); ++i) {
    CHECK(r1.trace.rows[i].rel_change == r2.trace.rows[i].rel_change);
    CHECK(r1.trace.rows[i].objective == r2.trace.rows[i].objective);
  }
  CHECK(r1.trace.iters == static_cast<int>(r1.trace.rows.size()));
  // trace rows carry one violation per dual term
  CHECK(r1.trace.rows.back().violations.size() == 1);
}

TEST_CASE("non-finite data is rejected") {
  SolverProblem p;
  p.dim = 1;
  p.smooth = quadratic_to({1.0});
  p.smooth.gradient = [](const Vec&) {
    return Vec{std::numeric_limits<double>::quiet_NaN()};
  };
  p.primal_project = [](Vec x) { return x; };
  SolverConfig cfg;
  cfg.max_iters = 5;
  CHECK_THROWS_AS(solve(p, Vec(1, 0.0), cfg), std::runtime_error);
}
