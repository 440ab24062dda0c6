#include <doctest.h>

#include <cmath>

#include "froglab/params.hpp"

using namespace froglab;

TEST_CASE("pstar examples") {
  CHECK(pstar(2, 1.0 / 3.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(pstar(3, 1.0 / 3.0) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(pstar(5, 0.0) == 0.0);
  CHECK(pstar(2, 0.5) == 1.0);
  CHECK_THROWS_AS(pstar(1, 0.2), InvalidParameter);
  CHECK_THROWS_AS(pstar(2, 0.6), InvalidParameter);
  CHECK_THROWS_AS(pstar(2, -0.1), InvalidParameter);
}

TEST_CASE("pstar at 1/3 is (d-1)/(2d-1) exactly") {
  for (int d = 2; d <= 64; ++d) {
    CHECK(pstar_exact(d, Rational(1, 3)) == Rational(d - 1, 2 * d - 1));
    CHECK(std::abs(pstar(d, 1.0 / 3.0) - (d - 1.0) / (2.0 * d - 1.0)) < 1e-15);
  }
}

TEST_CASE("rho and alpha") {
  CHECK(rho(1.0 / 3.0) == doctest::Approx(0.5));
  CHECK(rho(0.0) == 0.0);
  CHECK(rho(0.45) == doctest::Approx(9.0 / 11.0));
  CHECK_THROWS_AS(rho(1.0), InvalidParameter);
  CHECK(alpha(3, 0.4) == doctest::Approx(0.5));
  CHECK(alpha(2, 1.0 / 3.0) == doctest::Approx(0.5));
  CHECK(alpha(4, 0.0) == 0.0);
}

TEST_CASE("alpha of pstar equals rho") {
  for (int d = 2; d <= 10; ++d) {
    for (double p : {0.05, 0.1, 1.0 / 3.0, 0.45}) {
      CHECK(std::abs(alpha(d, pstar(d, p)) - rho(p)) < 1e-12);
      const double r = rho(p);
      CHECK(std::abs((1 - r) / (1 - r / d) - (1 - pstar(d, p))) < 1e-12);
    }
  }
}

TEST_CASE("c_map examples and ordering") {
  CHECK(c_map(2, 1.0 / 3.0, 0)(0.5) == doctest::Approx(0.25));
  CHECK(c_map(3, 0.4, 1)(0.0) == doctest::Approx(0.25));
  for (int d = 2; d <= 8; ++d) {
    for (double p : {0.0, 0.1, 1.0 / 3.0, 0.5}) {
      CHECK(c_map(d, p, d - 1)(1.0) == doctest::Approx(1.0));
      for (int k = 0; k < d; ++k) {
        const auto c = c_map(d, p, k);
        CHECK(c(0.0) >= 0.0);
        CHECK(c(1.0) <= 1.0 + 1e-15);
        if (k + 1 < d) {
          for (double x : {0.0, 0.3, 0.99}) CHECK(c(x) < c_map(d, p, k + 1)(x));
        }
      }
    }
  }
  CHECK_THROWS_AS(c_map(3, 0.2, 3), InvalidParameter);
  CHECK_THROWS_AS(c_map(3, 0.2, -1), InvalidParameter);
}

TEST_CASE("c_map at the critical drift is x/2 + k/(2(d-1)) exactly") {
  for (int d = 2; d <= 12; ++d) {
    const Rational p = critical_drift(d);
    for (int k = 0; k < d; ++k) {
      const auto c = c_map_exact(d, p, k);
      CHECK(c.slope == Rational(1, 2));
      CHECK(c.intercept == Rational(k, 2 * (d - 1)));
    }
  }
}

TEST_CASE("q* and ModelParams validation") {
  CHECK(kQStar == doctest::Approx((2 - std::sqrt(2.0)) / 4).epsilon(1e-16));
  CHECK_THROWS_AS(ModelParams::make(2, 0.6), InvalidParameter);
  CHECK_NOTHROW(ModelParams::make(2, 0.6, true));
  CHECK_THROWS_AS(ModelParams::make(2, 1.0, true), InvalidParameter);
  const auto mp = ModelParams::make(3, 1.0 / 3.0);
  CHECK(mp.pstar() == doctest::Approx(0.4));
}

TEST_CASE("Rational arithmetic") {
  CHECK(Rational(2, 4) == Rational(1, 2));
  CHECK((Rational(1, 3) + Rational(1, 6)) == Rational(1, 2));
  CHECK(Rational(1, 3) < Rational(1, 2));
  CHECK(Rational(-3, -9).str() == "1/3");
  CHECK_THROWS_AS(Rational(1, 0), InvalidParameter);
}

TEST_CASE("q star") {
  CHECK(q_star() == doctest::Approx((2.0 - std::sqrt(2.0)) / 4.0).epsilon(1e-16));
  CHECK(q_star() == doctest::Approx(0.14644660940672624).epsilon(1e-15));
}
