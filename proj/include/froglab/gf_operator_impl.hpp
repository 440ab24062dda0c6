#pragma once

// Template definitions for gf_operator.hpp.

#include <algorithm>
#include <cmath>
#include <string>

#include "froglab/polynomials.hpp"

namespace froglab {

namespace detail {

struct SumBounds {
  double p_bound = 0.0;
  double q_bound = 0.0;
};

SumBounds operator_sum_perturbation(int d, std::span<const double> z, double eps);

// Perturbation of (x+2)/3 a^2 + (x+1)/3 b (1 - a) when |da|, |db| <= eps.
inline double a2_perturbation(double x, double a, double b, double eps) {
  a = std::abs(a);
  b = std::abs(b);
  return (x + 2.0) / 3.0 * ((a + eps) * (a + eps) - a * a) + (x + 1.0) / 3.0 * eps +
         (x + 1.0) / 3.0 * ((a + eps) * (b + eps) - a * b);
}

}  // namespace detail

template <UnitFunction G>
CheckReport check_Ad_le_A2(int d, const G& g, std::span<const double> xs, double input_halfwidth) {
  const Rational pr = critical_drift(d);
  const ModelParams params{d, pr.to_double()};
  constexpr double kFloor = 1e-12;

  CheckReport rep;
  rep.name = "ad-le-a2";
  rep.tolerance = input_halfwidth;

  double worst_main = -INFINITY, worst_p = -INFINITY, worst_q = -INFINITY;
  double excess_main = -INFINITY, excess_p = -INFINITY, excess_q = -INFINITY;
  nlohmann::json points = nlohmann::json::array();
  for (double x : xs) {
    const auto z = composition_values(params, g, x);
    const OperatorSums s = operator_sums(d, z);
    const double lhs = combine_operator(params, x, s);
    const double a = z[d - 1];
    const double b = z[0];
    const double rhs = (x + 2.0) / 3.0 * a * a + (x + 1.0) / 3.0 * b * (1.0 - a);

    const auto pb = detail::operator_sum_perturbation(d, z, input_halfwidth);
    const double w1 = ((d - 1) * x + 1.0) / (2 * d - 1);
    const double w2 = static_cast<double>(d - 1) / (2 * d - 1);
    const double e = input_halfwidth;
    const double margin_main = w1 * pb.p_bound + w2 * pb.q_bound + detail::a2_perturbation(x, a, b, e) + kFloor;

    const double p_bound_rhs = b + a * a - a * b;
    const double margin_p = pb.p_bound + e + ((a + e) * (a + e) - a * a) + ((a + e) * (b + e) - a * b) + kFloor;
    const double margin_q = pb.q_bound + ((a + e) * (a + e) - a * a) + kFloor;

    const double v_main = lhs - rhs;
    const double v_p = s.p_sum - p_bound_rhs;
    const double v_q = s.q_sum - a * a;
    worst_main = std::max(worst_main, v_main);
    worst_p = std::max(worst_p, v_p);
    worst_q = std::max(worst_q, v_q);
    excess_main = std::max(excess_main, v_main - margin_main);
    excess_p = std::max(excess_p, v_p - margin_p);
    excess_q = std::max(excess_q, v_q - margin_q);
    points.push_back({{"x", x}, {"Ad_g", lhs}, {"A2_g", rhs}, {"margin", margin_main}});
  }
  if (xs.empty()) worst_main = worst_p = worst_q = excess_main = excess_p = excess_q = 0.0;

  rep.statistics["d"] = d;
  rep.statistics["max_violation"] = std::max(0.0, worst_main);
  rep.statistics["max_violation_p_sum"] = std::max(0.0, worst_p);
  rep.statistics["max_violation_q_sum"] = std::max(0.0, worst_q);
  rep.statistics["max_excess_over_margin"] = std::max({excess_main, excess_p, excess_q});
  rep.pass = excess_main <= 0.0 && excess_p <= 0.0 && excess_q <= 0.0;
  rep.details["points"] = std::move(points);
  return rep;
}

}  // namespace froglab
