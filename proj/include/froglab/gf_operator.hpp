#pragma once

#include <concepts>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "froglab/params.hpp"
#include "froglab/report.hpp"

namespace froglab {

/// Anything that can be evaluated as a function [0,1) -> [0,1].
template <class F>
concept UnitFunction = requires(const F& f, double x) {
  { f(x) } -> std::convertible_to<double>;
};

/// Nondecreasing function on [0,1) sampled on a strictly increasing grid
/// x_0 = 0 < ... < x_{M-1} < 1, evaluated by piecewise-linear interpolation.
/// Beyond x_{M-1} the last segment is continued linearly and clamped to [0,1].
class GridFunction {
 public:
  GridFunction(std::vector<double> grid, std::vector<double> values);

  /// Uniform grid {i/M : i = 0..M-1}.
  static std::vector<double> uniform_grid(std::size_t m);
  static GridFunction constant(std::size_t m, double value);

  template <UnitFunction F>
  static GridFunction sample(std::size_t m, const F& f) {
    auto grid = uniform_grid(m);
    std::vector<double> values(m);
    for (std::size_t i = 0; i < m; ++i) values[i] = static_cast<double>(f(grid[i]));
    return GridFunction(std::move(grid), std::move(values));
  }

  double operator()(double x) const;

  std::size_t size() const { return grid_.size(); }
  std::span<const double> grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double sup() const;
  bool is_nondecreasing(double tol = 0.0) const;

 private:
  std::vector<double> grid_;
  std::vector<double> values_;
  bool uniform_ = false;
};

/// Clamp to [0,1] then project onto nondecreasing sequences by running maximum.
/// Returns the largest single-point change made.
double monotonize(std::vector<double>& values);

/// Sums of the P- and Q-parts of the operator at a point z = (z_1..z_d).
struct OperatorSums {
  double p_sum = 0.0;  // sum_{k=1}^{d} C(d-1,k-1) P_k(z_1..z_k)
  double q_sum = 0.0;  // sum_{k=2}^{d} C(d-2,k-2) Q_k(z_1..z_k)
};

OperatorSums operator_sums(int d, std::span<const double> z);

/// Combines the sums with the (p, d, x) weights.
double combine_operator(const ModelParams& params, double x, const OperatorSums& s);

/// z_k = h(c^{(k-1)}(x)), k = 1..d.
template <UnitFunction H>
std::vector<double> composition_values(const ModelParams& params, const H& h, double x) {
  std::vector<double> z(params.d);
  for (int k = 0; k < params.d; ++k) z[k] = static_cast<double>(h(c_map(params.d, params.p, k)(x)));
  return z;
}

void require_unit_interval_open(double x);

/// (A_{d,p} h)(x) for any h in I.
template <UnitFunction H>
double apply_A(const ModelParams& params, const H& h, double x) {
  require_unit_interval_open(x);
  const auto z = composition_values(params, h, x);
  return combine_operator(params, x, operator_sums(params.d, z));
}

/// d = 2, p = 1/3 closed form: ((x+2)/3) h((x+1)/2)^2 + ((x+1)/3) h(x/2) (1 - h((x+1)/2)).
template <UnitFunction H>
double apply_A2_closed(const H& h, double x) {
  require_unit_interval_open(x);
  const double a = h((x + 1.0) / 2.0);
  const double b = h(x / 2.0);
  return (x + 2.0) / 3.0 * a * a + (x + 1.0) / 3.0 * b * (1.0 - a);
}

struct IterateTrace {
  int n = 0;
  /// functions[i] = A^i h0 (functions[0] is the start function).
  std::vector<GridFunction> functions;
  std::vector<double> sup_values;
  /// Largest running-max / clamp repair applied after each application.
  std::vector<double> repair_magnitudes;
};

/// n Jacobi-style applications of A_{d,p} on the grid of h0. Each new iterate is
/// evaluated entirely from the previous snapshot, then clamped and monotonized.
IterateTrace iterate_A(const ModelParams& params, const GridFunction& h0, int n);

/// x = numerator / 2^log2_den in [0,1).
struct Dyadic {
  std::uint64_t numerator = 0;
  int log2_den = 0;
  double value() const;
};

inline constexpr int kDyadicCostCap = 26;

/// (A_2^n 1)(x) with no interpolation, by recursion through x/2 and (x+1)/2
/// memoized per level. Requires n + log2_den <= 26.
double exact_iterate_A2(int n, Dyadic x);

/// Per-iteration estimate of accumulated interpolation error of a d = 2 grid
/// trace: B_n = L B_{n-1} + E_n, with E_n = max |second difference| / 8 of the
/// interpolated snapshot and L = 8/3 the sup-norm Lipschitz constant of A_2 on
/// [0,1]-valued functions.
std::vector<double> a2_interpolation_bound(const IterateTrace& trace);

/// Rigorous two-sided bounds on (A_2^n 1)(x) for n = 1..n_max.
///
/// Works in y = 1 - x with the complement u = 1 - h, which stays accurate where h
/// is within rounding of 1. Nodes are y = 2^-j (1 + t/S), j = 1..J, t < S, plus
/// y = 1; y -> y/2 maps nodes onto nodes. Upper and lower step envelopes of a
/// nondecreasing function are members of I, so by monotonicity of A_2 their
/// iterates bracket the true iterate (up to floating-point rounding). Nodes below
/// 2^-J are bounded by u in [0, u(2^-J)].
struct A2Bracket {
  int n_max = 0;
  /// Query points and their final bounds.
  std::vector<double> xs;
  std::vector<double> lower;
  std::vector<double> upper;
  /// Per-iteration bounds on max over xs, index n-1.
  std::vector<double> sup_lower;
  std::vector<double> sup_upper;
  /// Largest increase of the upper envelope at any node between iterations.
  double max_increase = 0.0;
};

A2Bracket bracket_iterate_A2(int n_max, std::span<const double> xs, int octave_points = 512);

struct VanishingOptions {
  int n_max = 500;
  double tol = 0.05;
  std::size_t grid_size = 1024;
  /// Allowed pointwise increase between consecutive iterates.
  double monotone_slack = 1e-12;
  /// Nodes per octave of the certified bracket (power of two).
  int octave_points = 512;
};

/// Iterates A_2 from h = 1 and checks that the iterates decrease pointwise on the
/// uniform grid and that their supremum over the grid drops to tol. Pass/fail is
/// decided on the certified bracket; the piecewise-linear grid iterate is run
/// alongside and its first crossing reported as `interpolated_first_n`.
CheckReport check_vanishing(const VanishingOptions& options);

/// Compares A_d g and A_2 g at p = (d-1)/(2d-1) on xs, together with the two
/// intermediate P/Q-sum inequalities evaluated at z_k = g(x/2 + (k-1)/(2(d-1))).
/// `input_halfwidth` is a uniform error bound on g; each inequality is allowed
/// the propagated perturbation of both sides plus 1e-12.
template <UnitFunction G>
CheckReport check_Ad_le_A2(int d, const G& g, std::span<const double> xs, double input_halfwidth = 0.0);

}  // namespace froglab

#include "froglab/gf_operator_impl.hpp"
