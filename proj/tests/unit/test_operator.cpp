#include <doctest.h>

#include <cmath>
#include <random>

#include "froglab/gf_operator.hpp"
#include "froglab/rng.hpp"

using namespace froglab;

namespace {

GridFunction random_member(Rng& rng, std::size_t m) {
  std::vector<double> v(m);
  for (auto& x : v) x = rng.uniform();
  std::sort(v.begin(), v.end());
  return GridFunction(GridFunction::uniform_grid(m), v);
}

}  // namespace

TEST_CASE("A applied to 1 and 0") {
  for (int d = 2; d <= 8; ++d) {
    for (double p : {0.1, 1.0 / 3.0, 0.45}) {
      const ModelParams mp{d, p};
      const auto one = GridFunction::constant(64, 1.0);
      const auto zero = GridFunction::constant(64, 0.0);
      for (double x : one.grid()) {
        CHECK(std::abs(apply_A(mp, one, x) - (p * x + 1 - p)) < 1e-10);
        CHECK(apply_A(mp, zero, x) == 0.0);
      }
    }
  }
  CHECK(apply_A(ModelParams{2, 1.0 / 3.0}, GridFunction::constant(8, 1.0), 0.0) == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS_AS(apply_A(ModelParams{2, 0.3}, GridFunction::constant(8, 1.0), 1.0), DomainError);
}

TEST_CASE("closed form for d = 2 agrees with the general operator") {
  Rng rng(11);
  const ModelParams mp{2, 1.0 / 3.0};
  for (int rep = 0; rep < 5; ++rep) {
    const auto h = random_member(rng, 1024);
    for (double x : h.grid()) CHECK(std::abs(apply_A(mp, h, x) - apply_A2_closed(h, x)) < 1e-12);
  }
  CHECK(apply_A2_closed(GridFunction::constant(4, 1.0), 0.5) == doctest::Approx(5.0 / 6.0));
}

TEST_CASE("A2 is monotone and closed on random members") {
  Rng rng(5);
  const ModelParams mp{2, 1.0 / 3.0};
  for (int rep = 0; rep < 200; ++rep) {
    auto lo = random_member(rng, 64);
    std::vector<double> hv(lo.values().begin(), lo.values().end());
    double bump = 0.0;
    for (auto& v : hv) {
      bump = std::max(bump, rng.uniform() * (1.0 - v));
      v = std::min(1.0, v + bump);
    }
    GridFunction hi(GridFunction::uniform_grid(64), hv);
    double prev = 0.0;
    for (double x : lo.grid()) {
      const double a = apply_A2_closed(lo, x);
      CHECK(a <= apply_A2_closed(hi, x) + 1e-15);
      CHECK(a >= 0.0);
      CHECK(a <= 1.0);
      CHECK(a >= prev - 1e-15);
      prev = a;
    }
  }
}

TEST_CASE("iterate_A basics") {
  const ModelParams mp{2, 1.0 / 3.0};
  const auto tr = iterate_A(mp, GridFunction::constant(32, 1.0), 1);
  for (std::size_t i = 0; i < 32; ++i) {
    const double x = tr.functions[1].grid()[i];
    CHECK(tr.functions[1].values()[i] == doctest::Approx((x + 2) / 3));
  }
  const auto z = iterate_A(mp, GridFunction::constant(32, 0.0), 5);
  CHECK(z.sup_values.back() == 0.0);
  CHECK_THROWS_AS(iterate_A(mp, GridFunction::constant(4, 1.0), 0), InvalidParameter);
}

TEST_CASE("exact dyadic iterates") {
  CHECK(exact_iterate_A2(0, {3, 2}) == 1.0);
  CHECK(exact_iterate_A2(1, {0, 0}) == doctest::Approx(2.0 / 3.0));
  CHECK(exact_iterate_A2(1, {1, 1}) == doctest::Approx(5.0 / 6.0));
  CHECK(exact_iterate_A2(2, {0, 0}) == doctest::Approx(0.5));
  CHECK(exact_iterate_A2(2, {1, 1}) == doctest::Approx(79.0 / 108.0));
  CHECK(exact_iterate_A2(3, {0, 0}) == doctest::Approx(878.0 / 2187.0));
  CHECK(exact_iterate_A2(3, {1, 1}) == doctest::Approx(5135.0 / 7776.0));
  CHECK_THROWS_AS(exact_iterate_A2(20, {0, 7}), ResourceLimit);
  CHECK_THROWS_AS(exact_iterate_A2(2, {4, 2}), DomainError);
}

TEST_CASE("grid iterate tracks exact dyadic values") {
  const ModelParams mp{2, 1.0 / 3.0};
  const auto tr = iterate_A(mp, GridFunction::constant(1024, 1.0), 12);
  const auto bound = a2_interpolation_bound(tr);
  for (int n = 1; n <= 12; ++n) {
    for (std::uint64_t i : {0, 256, 512, 1000}) {
      const double exact = exact_iterate_A2(n, {i, 10});
      CHECK(std::abs(tr.functions[n].values()[i] - exact) <= 2 * bound[n]);
    }
  }
}

TEST_CASE("check_vanishing edge tolerances") {
  VanishingOptions o;
  o.n_max = 5;
  o.tol = 0.0;
  o.grid_size = 128;
  const auto r = check_vanishing(o);
  CHECK_FALSE(r.pass);
  CHECK(r.details["attained"] == false);
  CHECK(r.details["monotone_decrease"] == true);

  o.tol = 0.99;
  o.n_max = 1;
  const auto r1 = check_vanishing(o);
  const auto first = r1.details["interpolated_pointwise_first_n"];
  for (std::size_t i = 0; i < 128; ++i) {
    const double x = i / 128.0;
    if ((x + 2) / 3 <= 0.99) CHECK(first[i] == 1);
    else CHECK(first[i] == -1);
  }
}

TEST_CASE("A_d <= A_2 on simple members") {
  const std::vector<double> xs = GridFunction::uniform_grid(256);
  const auto two = check_Ad_le_A2(2, GridFunction::sample(256, [](double x) { return x * x; }), xs);
  CHECK(two.pass);
  CHECK(two.max_violation() < 1e-12);
  const auto zero = check_Ad_le_A2(3, GridFunction::constant(256, 0.0), xs);
  CHECK(zero.pass);
  CHECK(zero.max_violation() == 0.0);
}

TEST_CASE("certified bracket contains exact dyadic iterates") {
  const std::vector<double> xs = {0.0, 0.25, 0.5, 0.75, 1023.0 / 1024.0};
  const auto br = bracket_iterate_A2(16, xs, 256);
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const auto num = static_cast<std::uint64_t>(xs[k] * 1024);
    const double exact = exact_iterate_A2(16, {num, 10});
    CHECK(br.lower[k] <= exact + 1e-12);
    CHECK(exact <= br.upper[k] + 1e-12);
    CHECK(br.upper[k] - br.lower[k] < 1e-3);
  }
  const double one_x[] = {0.5};
  const auto b1 = bracket_iterate_A2(1, one_x, 8);
  CHECK(b1.lower[0] == doctest::Approx(5.0 / 6.0));
  CHECK(b1.upper[0] == doctest::Approx(5.0 / 6.0));
  CHECK_THROWS_AS(bracket_iterate_A2(1, one_x, 6), InvalidParameter);
}

TEST_CASE("interpolated grid iterate crossing is pinned") {
  VanishingOptions o;
  o.n_max = 40;
  const auto r = check_vanishing(o);
  CHECK(r.statistics.at("interpolated_first_n") == 29);
  CHECK(r.details["monotone_decrease"] == true);
  CHECK(r.statistics.at("sup_lower_at_n_max") > 0.99);
}
