#include <doctest.h>

#include <numeric>

#include "epiprox/constraints.hpp"
#include "epiprox/oracles.hpp"
#include "test_helpers.hpp"

using namespace epiprox;

namespace {

DecomposableConstraint random_constraint(Rng& rng, int max_blocks = 10) {
  DecomposableConstraint c;
  const int L = 1 + static_cast<int>(rng() % max_blocks);
  int base = 0;
  for (int l = 0; l < L; ++l) {
    const int family = static_cast<int>(rng() % 3);
    const int dim = family == 2 ? 1 : 1 + static_cast<int>(rng() % 4);
    std::uniform_real_distribution<double> dt(0.3, 2.0);
    if (family == 0)
      c.kinds.push_back(EuclideanNorm{dt(rng)});
    else if (family == 1)
      c.kinds.push_back(WeightedInfNorm{random_uniform(rng, dim, 0.3, 2.0)});
    else
      c.kinds.push_back(ScalarPower{dt(rng), 1.0 + (rng() % 2)});
    std::vector<int> idx(dim);
    std::iota(idx.begin(), idx.end(), base);
    base += dim;
    c.layout.blocks.push_back(idx);
    c.layout.weights.emplace_back(dim, 1.0);
  }
  c.eta = random_uniform(rng, 1, 0.0, 8.0)[0];
  return c;
}

// One alternating-projection sweep in (y, zeta) space: first the epigraph
// product, then the budget half-space (which only touches zeta).
EpiState sweep(const SplitConstraint& sc, EpiState s) {
  s = sc.epi_projector(std::move(s));
  s.zeta = sc.budget_projector(std::move(s.zeta));
  return s;
}

}  // namespace

TEST_CASE("split basics") {
  DecomposableConstraint c;
  c.layout.blocks = {{0, 1}};
  c.layout.weights = {Vec(2, 1.0)};
  c.kinds = {EuclideanNorm{1.0}};
  c.eta = 5.0;
  auto sc = split(c);
  CHECK(sc.halfspace.dim == 1);
  CHECK(sc.halfspace.eta == 5.0);

  // feasible pair: both projectors are the identity
  EpiState s{{1.0, 2.0}, {4.0}};
  EpiState r = sweep(sc, s);
  CHECK(r.y == s.y);
  CHECK(r.zeta == s.zeta);

  // equality budget variant projects onto the hyperplane
  auto sce = split(c, BudgetForm::Equality);
  Vec z = sce.budget_projector({1.0});
  CHECK(z[0] == doctest::Approx(5.0));
}

TEST_CASE("init_zeta") {
  DecomposableConstraint c;
  c.layout.blocks = {{0, 1}, {2, 3}};
  c.layout.weights = {Vec(2, 1.0), Vec(2, 1.0)};
  c.kinds = {EuclideanNorm{1.0}, EuclideanNorm{1.0}};
  c.eta = 2.0;
  // two blocks with h = 4 each, eta = 2: shift by 3
  Vec z = init_zeta(c, {4.0, 0.0, 0.0, 4.0});
  CHECK(z[0] == doctest::Approx(1.0));
  CHECK(z[1] == doctest::Approx(1.0));

  c.eta = 5.0;
  DecomposableConstraint single = c;
  single.layout.blocks = {{0, 1}};
  single.layout.weights = {Vec(2, 1.0)};
  single.kinds = {EuclideanNorm{1.0}};
  Vec zs = init_zeta(single, {3.0, 0.0});
  CHECK(zs[0] == doctest::Approx(3.0));

  Vec z0 = init_zeta(single, {0.0, 0.0});
  CHECK(z0[0] == 0.0);
}

TEST_CASE("check_membership") {
  DecomposableConstraint c;
  c.layout.blocks = {{0, 1}, {2, 3}};
  c.layout.weights = {Vec(2, 1.0), Vec(2, 1.0)};
  c.kinds = {EuclideanNorm{1.0}, EuclideanNorm{1.0}};
  c.eta = 4.0;
  auto m = check_membership(c, {3.0, 4.0, 0.0, 0.0}, 1e-12);
  CHECK_FALSE(m.member);
  CHECK(m.violation == doctest::Approx(1.0));

  c.eta = 0.0;
  auto m0 = check_membership(c, Vec(4, 0.0), 1e-12);
  CHECK(m0.member);
  CHECK(m0.violation == 0.0);
}

TEST_CASE("splitting equivalence, constructively") {
  Rng rng(31);
  int members = 0, nonmembers = 0;
  for (int t = 0; t < 200; ++t) {
    DecomposableConstraint c = random_constraint(rng);
    auto sc = split(c);
    Vec y = random_uniform(rng, c.layout.total_size(), -3.0, 3.0);
    const auto m = check_membership(c, y, 1e-12);
    EpiState s{y, init_zeta(c, y)};
    if (m.member) {
      ++members;
      // init_zeta certifies membership: both projectors act as identity
      EpiState r = sweep(sc, s);
      CHECK(norm2(r.y - s.y) <= 1e-12 * (1.0 + norm2(s.y)));
      CHECK(norm2(r.zeta - s.zeta) <= 1e-12 * (1.0 + norm2(s.zeta)));
    } else {
      ++nonmembers;
      // no feasible zeta exists: alternating projections must move y
      EpiState r = s;
      for (int it = 0; it < 2000; ++it) r = sweep(sc, r);
      CHECK(norm2(r.y - y) > 1e-8);
      // and the limit satisfies the level-set constraint
      CHECK(constraint_value(c, r.y) <= c.eta + 1e-6);
    }
  }
  CHECK(members > 10);
  CHECK(nonmembers > 10);
}

TEST_CASE("stack projection is the identity at zeta = h(y)") {
  Rng rng(32);
  for (int t = 0; t < 100; ++t) {
    DecomposableConstraint c = random_constraint(rng, 5);
    Vec y = random_uniform(rng, c.layout.total_size(), -3.0, 3.0);
    const auto off = c.layout.offsets();
    Vec zeta(c.layout.num_blocks());
    for (int l = 0; l < c.layout.num_blocks(); ++l)
      zeta[l] = kind_value(c.kinds[l],
                           std::span<const double>(y.data() + off[l],
                                                   off[l + 1] - off[l]));
    EpiState r = project_epi_stack(c.layout, c.kinds, EpiState{y, zeta});
    CHECK(norm2(r.y - y) <= 1e-12 * (1.0 + norm2(y)));
    CHECK(norm2(r.zeta - zeta) <= 1e-12 * (1.0 + norm2(zeta)));
  }
}
