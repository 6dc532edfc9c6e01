#include <doctest.h>

#include "epiprox/linop.hpp"
#include "epiprox/oracles.hpp"
#include "test_helpers.hpp"

using namespace epiprox;
using epiprox::testing::check_adjoint;
using epiprox::testing::check_norm_bound;

TEST_CASE("uniform blur preserves constants and spreads impulses") {
  auto op = make_uniform_blur(4, 4, 3);
  Vec c(16, 7.5);
  Vec bc = op.apply(c);
  for (double v : bc) CHECK(v == doctest::Approx(7.5).epsilon(1e-12));

  Vec e(16, 0.0);
  e[0] = 1.0;
  Vec r = op.apply(e);
  double sum = 0.0;
  for (double v : r) sum += v;
  CHECK(sum == doctest::Approx(1.0));
  // wrapped 3x3 neighborhood of (0,0)
  for (int i : {-1, 0, 1})
    for (int j : {-1, 0, 1}) {
      const int p = ((i + 4) % 4) * 4 + ((j + 4) % 4);
      CHECK(r[p] == doctest::Approx(1.0 / 9.0));
    }
}

TEST_CASE("uniform blur rejects even kernel") {
  CHECK_THROWS(make_uniform_blur(8, 8, 4));
  CHECK_THROWS(make_uniform_blur(2, 2, 3));
}

TEST_CASE("blur adjoint matches dense transpose") {
  auto op = make_uniform_blur(8, 8, 3);
  auto m = oracle::dense_matrix(op);
  Rng rng(1);
  for (int t = 0; t < 10; ++t) {
    Vec v = random_uniform(rng, op.out_dim);
    CHECK(norm2(op.adjoint(v) - oracle::dense_adjoint_apply(m, v)) <= 1e-10);
  }
  check_adjoint(op, rng);
  check_norm_bound(op, rng);
}

TEST_CASE("decimation selects and scatters") {
  auto op = make_decimation({1, 0, 1});
  CHECK(op.apply({1, 2, 3}) == Vec{1, 3});
  CHECK(op.adjoint({1, 3}) == Vec{1, 0, 3});
  CHECK_THROWS(make_decimation({0, 0, 0}));

  // D Dᵀ = identity on the kept coordinates
  Rng rng(2);
  std::vector<std::uint8_t> mask(50);
  for (auto& b : mask) b = rng() % 2;
  mask[0] = 1;
  auto d = make_decimation(mask);
  for (int t = 0; t < 20; ++t) {
    Vec v = random_uniform(rng, d.out_dim);
    CHECK(norm2(d.apply(d.adjoint(v)) - v) <= 1e-14);
  }
  check_adjoint(d, rng);
}

TEST_CASE("difference stack periodic differences") {
  auto op = make_difference_stack(1, 3, {{0, 1}});
  Vec r = op.apply({1.0, 2.0, 4.0});
  CHECK(r[0] == doctest::Approx(-1.0));
  CHECK(r[1] == doctest::Approx(-2.0));
  CHECK(r[2] == doctest::Approx(3.0));

  auto op2 = make_difference_stack(5, 5, {{0, 1}, {1, 0}, {2, -1}});
  Vec c(25, 3.0);
  CHECK(norm2(op2.apply(c)) == 0.0);
  CHECK_THROWS(make_difference_stack(4, 4, {{0, 0}}));
}

TEST_CASE("difference stack adjoint vs dense oracle") {
  auto op = make_difference_stack(6, 6, {{0, 1}, {1, 0}, {-1, 2}});
  auto m = oracle::dense_matrix(op);
  Rng rng(3);
  for (int t = 0; t < 10; ++t) {
    Vec v = random_uniform(rng, op.out_dim);
    CHECK(norm2(op.adjoint(v) - oracle::dense_adjoint_apply(m, v)) <= 1e-10);
  }
  check_adjoint(op, rng);
  check_norm_bound(op, rng);
}

TEST_CASE("block weighting gather and scatter-add") {
  BlockLayout lo;
  lo.blocks = {{0, 1, 2}};
  lo.weights = {{1.0, 1.0, 1.0}};
  auto id = make_block_weighting(lo, 3);
  Vec x{3, 1, 4};
  CHECK(id.apply(x) == x);

  BlockLayout overlap;
  overlap.blocks = {{0}, {0}};
  overlap.weights = {{1.0}, {1.0}};
  auto op = make_block_weighting(overlap, 2);
  Vec back = op.adjoint({2.0, 5.0});
  CHECK(back[0] == doctest::Approx(7.0));
  CHECK(back[1] == 0.0);
  CHECK(op.norm_bound == doctest::Approx(std::sqrt(2.0)));

  BlockLayout bad;
  bad.blocks = {{0}};
  bad.weights = {{-1.0}};
  CHECK_THROWS(make_block_weighting(bad, 1));
  bad.weights = {{1.0}};
  bad.blocks = {{5}};
  CHECK_THROWS(make_block_weighting(bad, 1));

  Rng rng(4);
  BlockLayout mixed;
  mixed.blocks = {{0, 3, 5}, {1, 3}, {2, 3, 4, 5}};
  mixed.weights = {{0.5, 2.0, 1.0}, {1.5, 1.0}, {1.0, 1.0, 3.0, 0.25}};
  auto w = make_block_weighting(mixed, 6);
  auto m = oracle::dense_matrix(w);
  for (int t = 0; t < 10; ++t) {
    Vec v = random_uniform(rng, w.out_dim);
    CHECK(norm2(w.adjoint(v) - oracle::dense_adjoint_apply(m, v)) <= 1e-10);
  }
  check_adjoint(w, rng);
  check_norm_bound(w, rng);
}

TEST_CASE("unitary dft impulse, Parseval, inverse") {
  const int n = 12;
  auto op = make_unitary_dft(n);
  Vec e(n, 0.0);
  e[0] = 1.0;
  Vec f = op.apply(e);
  for (int k = 0; k < n; ++k) {
    CHECK(f[2 * k] == doctest::Approx(1.0 / std::sqrt(12.0)));
    CHECK(std::abs(f[2 * k + 1]) <= 1e-12);
  }
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    Vec x = random_uniform(rng, n);
    Vec y = op.apply(x);
    CHECK(std::abs(norm2(y) - norm2(x)) <= 1e-10);
    CHECK(norm2(op.adjoint(y) - x) <= 1e-10);
  }
  check_adjoint(op, rng);

  auto op16 = make_unitary_dft(16);  // power-of-two path
  for (int t = 0; t < 20; ++t) {
    Vec x = random_uniform(rng, 16);
    CHECK(norm2(op16.adjoint(op16.apply(x)) - x) <= 1e-10);
  }
  check_adjoint(op16, rng);
}

TEST_CASE("estimate_norm") {
  CHECK(estimate_norm(identity_op(7)) == doctest::Approx(1.01).epsilon(1e-6));

  LinOp diag;
  diag.in_dim = diag.out_dim = 2;
  diag.apply = [](const Vec& x) { return Vec{3.0 * x[0], 1.0 * x[1]}; };
  diag.adjoint = diag.apply;
  diag.norm_bound = 3.0;
  CHECK(estimate_norm(diag, 2000) == doctest::Approx(3.03).epsilon(1e-4));

  auto blur = make_uniform_blur(16, 16, 3);
  const double n = estimate_norm(blur);
  CHECK(n <= 1.0101);
  CHECK(n >= 0.99);

  LinOp zero;
  zero.in_dim = zero.out_dim = 3;
  zero.apply = [](const Vec& x) { return Vec(x.size(), 0.0); };
  zero.adjoint = zero.apply;
  CHECK(estimate_norm(zero) == 0.0);
}

TEST_CASE("composition equals sequential application") {
  auto blur = make_uniform_blur(6, 6, 3);
  std::vector<std::uint8_t> mask(36, 0);
  for (int i = 0; i < 36; i += 2) mask[i] = 1;
  auto dec = make_decimation(mask);
  auto comp = compose(dec, blur);
  Rng rng(6);
  for (int t = 0; t < 20; ++t) {
    Vec x = random_uniform(rng, 36);
    CHECK(comp.apply(x) == dec.apply(blur.apply(x)));
    Vec v = random_uniform(rng, comp.out_dim);
    CHECK(comp.adjoint(v) == blur.adjoint(dec.adjoint(v)));
  }
  check_adjoint(comp, rng);
}
