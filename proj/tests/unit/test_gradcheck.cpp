#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "sopool/gradcheck.hpp"
#include "sopool/harness.hpp"

#include "../support/fixtures.hpp"

using namespace sopool;

TEST_CASE("central_diff_grad") {
  fixtures::Rng rng(1);
  const Matrix phi = fixtures::random_matrix(3, 4, rng);
  SUBCASE("constant loss") {
    const Matrix g = central_diff_grad([](const Matrix&) { return 2.5; }, phi);
    for (double v : g.flat()) CHECK(v == 0.0);
  }
  SUBCASE("sum of squares gives 2 phi") {
    const LossFn f = [](const Matrix& x) {
      double s = 0.0;
      for (double v : x.flat()) s += v * v;
      return s;
    };
    const Matrix g = central_diff_grad(f, phi);
    CHECK(max_abs(g - phi * 2.0) < 1e-9);
  }
  SUBCASE("non-finite loss names the entry") {
    const LossFn f = [](const Matrix& x) {
      return x(1, 2) > 100.0 ? std::numeric_limits<double>::infinity() : 0.0;
    };
    Matrix at = phi;
    at(1, 2) = 100.0;
    try {
      central_diff_grad(f, at);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Numeric);
      CHECK(std::string(e.what()).find("(1,2)") != std::string::npos);
    }
  }
  SUBCASE("step must be positive") { CHECK_THROWS_AS(central_diff_grad([](const Matrix&) { return 0.0; }, phi, 0.0), Error); }
}

TEST_CASE("central_diff_grad_sym recovers a symmetric gradient") {
  fixtures::Rng rng(2);
  const SymMatrix w = fixtures::random_symmetric(4, rng);
  const SymMatrix m = fixtures::random_symmetric(4, rng);
  const Matrix g = central_diff_grad_sym([&](const Matrix& x) { return inner(w, x); }, m);
  CHECK(max_abs(g - w.matrix()) < 1e-9);
}

TEST_CASE("compare") {
  SUBCASE("identical inputs") {
    const Matrix a{{1.0, -2.0}, {0.0, 3.0}};
    const GradReport r = compare(a, a);
    CHECK(r.max_rel_err == 0.0);
    CHECK(r.max_abs_err == 0.0);
    CHECK(r.passed);
  }
  SUBCASE("offset of 1e-3 on ones") {
    const Matrix n(2, 3, 1.0);
    const Matrix a(2, 3, 1.0 + 1e-3);
    const GradReport r = compare(a, n);
    CHECK(r.max_rel_err == doctest::Approx(1e-3).epsilon(1e-2));
    CHECK_FALSE(r.passed);
  }
  SUBCASE("near-zero entries use the absolute tolerance") {
    const Matrix n{{1e-9, 1.0}};
    const Matrix a{{5e-9, 1.0}};
    const GradReport r = compare(a, n);
    CHECK(r.passed);
    CHECK(r.max_rel_err == 0.0);
    const GradReport bad = compare(Matrix{{3e-8, 1.0}}, n);
    CHECK_FALSE(bad.passed);
    CHECK(bad.worst_index == std::pair<std::size_t, std::size_t>{0, 0});
  }
  SUBCASE("worst entry is reported") {
    const Matrix n{{1.0, 1.0}, {1.0, 1.0}};
    const Matrix a{{1.0, 1.0}, {1.0 + 1e-4, 1.0}};
    CHECK(compare(a, n).worst_index == std::pair<std::size_t, std::size_t>{1, 0});
  }
  SUBCASE("shape mismatch") {
    try {
      compare(Matrix(2, 2), Matrix(2, 3));
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Dimension);
    }
  }
}

TEST_CASE("SigmE pn_bwd matches the harness at d=4, N=7") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    harness::ElementwiseCase c;
    c.cfg.kind = PoolKind::SigmE;
    c.d = 4;
    c.n = 7;
    const GradReport r = harness::check_elementwise_grad(c, seed);
    CHECK(r.passed);
    CHECK(r.max_rel_err < 1e-5);
  }
}

TEST_CASE("halving the step keeps the error within the O(h^2) envelope") {
  fixtures::Rng rng(3);
  const Matrix phi = fixtures::random_matrix(3, 5, rng, 0.1, 1.0);
  const SymMatrix w = fixtures::random_symmetric(3, rng);
  PNConfig cfg;
  cfg.kind = PoolKind::AsinhE;
  cfg.gamma_prime = 2.0;
  auto make = [](const Matrix& x) { return AugmentedBatch{x, x.rows()}; };
  const LossFn f = [&](const Matrix& x) { return inner(w, pn_fwd(cooc_matrix(make(x)), cfg)); };
  const AugmentedBatch aug = make(phi);
  const Matrix analytic = pn_bwd(cooc_matrix(aug), aug, w, cfg).dphi;
  const double coarse = compare(analytic, central_diff_grad(f, phi, 1e-5)).max_rel_err;
  const double fine = compare(analytic, central_diff_grad(f, phi, 5e-6)).max_rel_err;
  CHECK(fine <= 4.0 * coarse);
}
