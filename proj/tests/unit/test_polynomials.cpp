#include <doctest.h>

#include <thread>
#include <vector>

#include "froglab/polynomials.hpp"

using namespace froglab;

// Expected forms produced by tests/oracles/sympy_oracles.py.
TEST_CASE("P and Q printed forms") {
  CHECK(build_P(1).to_text() == "z1");
  CHECK(build_P(2) == MultiPoly::parse_text("z2^2 - z1*z2"));
  CHECK(build_P(3) == MultiPoly::parse_text("z3^3 - z1*z3^2 - 2*z2^2*z3 + 2*z1*z2*z3"));
  CHECK(build_P(4) == MultiPoly::parse_text("z4^4 - z1*z4^3 - 3*z2^2*z4^2 + 3*z1*z2*z4^2 - 3*z3^3*z4 + "
                                            "6*z2^2*z3*z4 + 3*z1*z3^2*z4 - 6*z1*z2*z3*z4"));
  CHECK(build_Q(2) == MultiPoly::parse_text("z2^2").embedded(2));
  CHECK(build_Q(3) == MultiPoly::parse_text("z3^3 - z2^2*z3"));
  CHECK(build_Q(4) == MultiPoly::parse_text("z4^4 - z2^2*z4^2 - 2*z3^3*z4 + 2*z2^2*z3*z4"));
  CHECK(build_P(3).to_text() == "z3^3 - z1*z3^2 - 2*z2^2*z3 + 2*z1*z2*z3");
}

TEST_CASE("degrees and arity") {
  for (int k = 1; k <= 12; ++k) {
    CHECK(build_P(k).total_degree() == k);
    CHECK(build_P(k).nvars() == k);
    if (k >= 2) {
      CHECK(build_Q(k).total_degree() == k);
      CHECK(build_Q(k).nvars() == k);
    }
  }
}

TEST_CASE("unit sums hold exactly") {
  for (int d = 2; d <= 12; ++d) {
    std::int64_t ps = 0, qs = 0;
    for (int k = 1; k <= d; ++k) {
      const std::vector<std::int64_t> ones(k, 1);
      ps += binomial(d - 1, k - 1) * build_P(k).eval_exact(ones);
      if (k >= 2) qs += binomial(d - 2, k - 2) * build_Q(k).eval_exact(ones);
    }
    CHECK(ps == 1);
    CHECK(qs == 1);
  }
}

TEST_CASE("evaluation examples") {
  const double a[] = {0.5, 0.5};
  CHECK(eval_poly(build_P(2), a) == 0.0);
  const double b[] = {1, 1, 1};
  CHECK(eval_poly(build_P(3), b) == 0.0);
  const double c[] = {0, 1, 1};
  CHECK(eval_poly(build_Q(3), c) == 0.0);
  const double short_z[] = {1, 1};
  CHECK_THROWS_AS(eval_poly(build_P(3), short_z), DimensionMismatch);
}

TEST_CASE("errors and cap") {
  CHECK_THROWS_AS(build_P(0), InvalidParameter);
  CHECK_THROWS_AS(build_Q(1), InvalidParameter);
  CHECK_THROWS_AS(build_P(17), ResourceLimit);
  CHECK_THROWS_AS(build_Q(5, 4), ResourceLimit);
  CHECK_NOTHROW(build_P(16));
  CHECK_NOTHROW(build_Q(16));
}

TEST_CASE("text and json round trips") {
  for (int k = 1; k <= 10; ++k) {
    const auto& p = build_P(k);
    CHECK(MultiPoly::parse_text(poly_name(PolyFamily::kP, k) + " = " + p.to_text()) == p);
    CHECK(MultiPoly::from_json(p.to_json()) == p);
    if (k >= 2) {
      const auto& q = build_Q(k);
      CHECK(MultiPoly::parse_text(q.to_text()).embedded(k) == q);
      CHECK(MultiPoly::from_json(q.to_json()) == q);
    }
  }
  CHECK(MultiPoly().to_text() == "0");
  CHECK_THROWS(MultiPoly::parse_text("z1 +"));
}

TEST_CASE("concurrent memo builds agree") {
  std::vector<std::thread> ts;
  std::vector<const MultiPoly*> seen(8);
  for (int t = 0; t < 8; ++t) ts.emplace_back([&, t] { seen[t] = &build_P(9 + (t % 2)); });
  for (auto& t : ts) t.join();
  for (int t = 2; t < 8; ++t) CHECK(seen[t] == seen[t % 2]);
}

TEST_CASE("perturbation bound dominates actual change") {
  const auto& p = build_P(4);
  const double z[] = {0.2, 0.4, 0.5, 0.9};
  const double eps = 0.01;
  const double bound = p.perturbation_bound(z, eps);
  for (int mask = 0; mask < 16; ++mask) {
    double w[4];
    for (int i = 0; i < 4; ++i) w[i] = z[i] + ((mask >> i) & 1 ? eps : -eps);
    CHECK(std::abs(p.eval(w) - p.eval(z)) <= bound);
  }
}
