#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sopool/error.hpp"
#include "sopool/probmodel.hpp"

using namespace sopool;

TEST_CASE("binom_at_least_one") {
  CHECK(binom_at_least_one({5, 0.0, 0.0, 0.0}) == 0.0);
  CHECK(binom_at_least_one({5, 1.0, 0.0, 0.0}) == 1.0);
  CHECK(binom_at_least_one({2, 0.5, 0.0, 0.0}) == 0.75);
  for (unsigned n = 1; n <= 30; ++n) {
    for (int k = 0; k <= 100; ++k) {
      const double p = k / 100.0;
      CHECK(std::abs(binom_at_least_one({n, p, 0.0, 0.0}) - (1.0 - std::pow(1.0 - p, n))) <= 1e-12);
    }
  }
}

// The explicit sum is accurate to 1e-12, so strictness is asserted wherever the
// exact increment exceeds that and ordering within the tolerance elsewhere.
TEST_CASE("binom_at_least_one is increasing in p and N") {
  constexpr double kTol = 1e-12;
  auto exact = [](unsigned n, double p) { return -std::expm1(n * std::log1p(-p)); };
  for (unsigned n = 1; n <= 30; ++n) {
    for (int k = 1; k < 100; ++k) {
      const double p0 = (k - 1) / 100.0, p1 = k / 100.0;
      const double a = binom_at_least_one({n, p0, 0.0, 0.0});
      const double b = binom_at_least_one({n, p1, 0.0, 0.0});
      if (exact(n, p1) - exact(n, p0) > 2 * kTol) {
        CHECK(b > a);
      } else {
        CHECK(b >= a - kTol);
      }
    }
  }
  for (double p : {0.01, 0.2, 0.5}) {
    double prev = -1.0;
    for (unsigned n = 1; n <= 30; ++n) {
      const double v = binom_at_least_one({n, p, 0.0, 0.0});
      CHECK(v > prev);
      prev = v;
    }
  }
}

TEST_CASE("multinom_at_least_one") {
  SUBCASE("p=0.2, q=0.3, s=0.1, N=3") {
    CHECK(multinom_at_least_one({3, 0.2, 0.3, 0.1}) == doctest::Approx(0.488).epsilon(1e-14));
  }
  SUBCASE("q = s = 0 reduces to the binomial") {
    for (unsigned n = 1; n <= 12; ++n)
      for (double p : {0.0, 0.1, 0.35, 0.9, 1.0})
        CHECK(std::abs(multinom_at_least_one({n, p, 0.0, 0.0}) - binom_at_least_one({n, p, 0.0, 0.0})) <=
              1e-13);
  }
  SUBCASE("p = 0 gives 0") {
    CHECK(multinom_at_least_one({7, 0.0, 0.3, 0.4}) == 0.0);
  }
  SUBCASE("independent of q and s for fixed p") {
    for (unsigned n : {1u, 4u, 12u, 30u}) {
      for (double p : {0.05, 0.3, 0.6}) {
        const double base = multinom_at_least_one({n, p, 0.0, 0.0});
        for (int a = 0; a < 10; ++a) {
          for (int b = 0; b < 10; ++b) {
            const double q = (1.0 - p) * a / 10.0;
            const double s = (1.0 - p - q) * b / 10.0;
            CHECK(std::abs(multinom_at_least_one({n, p, q, s}) - base) < 1e-10);
          }
        }
      }
    }
  }
}

TEST_CASE("lgamma coefficients agree with exact integer ones") {
  for (unsigned n = 1; n <= 12; ++n) {
    for (unsigned a = 0; a <= n; ++a) {
      for (unsigned b = 0; a + b <= n; ++b) {
        for (unsigned c = 0; a + b + c <= n; ++c) {
          const unsigned r = n - a - b - c;
          const double log_coeff = std::lgamma(n + 1.0) - std::lgamma(a + 1.0) -
                                   std::lgamma(b + 1.0) - std::lgamma(c + 1.0) - std::lgamma(r + 1.0);
          const double exact = static_cast<double>(multinomial_coefficient(n, a, b, c));
          CHECK(std::abs(std::exp(log_coeff) - exact) <= 1e-12 * exact);
        }
      }
    }
  }
  CHECK(multinomial_coefficient(4, 1, 1, 1) == 24);
  CHECK(multinomial_coefficient(20, 5, 5, 5) == 11732745024ULL);
}

TEST_CASE("BernoulliPool validation") {
  CHECK_THROWS_AS(binom_at_least_one({0, 0.5, 0.0, 0.0}), Error);
  CHECK_THROWS_AS(binom_at_least_one({31, 0.5, 0.0, 0.0}), Error);
  CHECK_THROWS_AS(multinom_at_least_one({3, 0.5, 0.4, 0.2}), Error);
  CHECK_THROWS_AS(multinom_at_least_one({3, -0.1, 0.0, 0.0}), Error);
}

TEST_CASE("simulate_cooc") {
  CHECK(simulate_cooc({5, 1.0, 0.0, 0.0}, 1000, 1) == 1.0);
  CHECK(simulate_cooc({5, 0.0, 0.0, 0.0}, 1000, 1) == 0.0);
  SUBCASE("p=0.3, N=5, one million trials within 3 sigma") {
    const double expected = 1.0 - std::pow(0.7, 5);
    CHECK(expected == doctest::Approx(0.83193).epsilon(1e-5));
    const std::uint64_t trials = 1000000;
    const double freq = simulate_cooc({5, 0.3, 0.0, 0.0}, trials, 2024);
    const double sigma = std::sqrt(expected * (1.0 - expected) / double(trials));
    CHECK(std::abs(freq - expected) <= 3.0 * sigma);
  }
  SUBCASE("fixed seed is reproducible and different seeds differ") {
    const double a = simulate_cooc({6, 0.2, 0.1, 0.1}, 50000, 9);
    CHECK(simulate_cooc({6, 0.2, 0.1, 0.1}, 50000, 9) == a);
    CHECK(simulate_cooc({6, 0.2, 0.1, 0.1}, 50000, 10) != a);
  }
}
