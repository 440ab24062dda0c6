#pragma once

#include <cstdint>
#include <string>

#include "froglab/errors.hpp"

namespace froglab {

/// Threshold (2 - sqrt 2) / 4 below which the dominating branching random walk
/// is transient.
inline constexpr double kQStar = 0.14644660940672624;

/// Exact rational with 64-bit numerator and denominator, always normalized
/// (gcd 1, positive denominator).
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string str() const;

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  friend bool operator==(const Rational& a, const Rational& b) = default;
  friend bool operator<(const Rational& a, const Rational& b);
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// Branching degree d and upward drift p of a frog model on the d-ary tree.
struct ModelParams {
  int d = 2;
  double p = 1.0 / 3.0;

  /// Validates d >= 2 and 0 <= p <= 1/2. `force` lifts the 1/2 cap (p < 1 still
  /// required) for exploratory runs.
  static ModelParams make(int d, double p, bool force = false);

  double pstar() const;
  double rho() const;
  double alpha() const;
};

/// x -> slope * x + intercept, used for the contractions c^{(k)} of [0,1].
struct AffineMap {
  double slope = 1.0;
  double intercept = 0.0;

  double operator()(double x) const { return slope * x + intercept; }
};

/// Exact counterpart of AffineMap when (d, p) are rational.
struct ExactAffineMap {
  Rational slope;
  Rational intercept;

  Rational operator()(const Rational& x) const { return slope * x + intercept; }
  AffineMap to_double() const { return {slope.to_double(), intercept.to_double()}; }
};

/// Drift of the non-backtracking model that matches loop-erased p-biased walks:
/// p(d-1) / (d - (d+1) p).
double pstar(int d, double p);
Rational pstar_exact(int d, const Rational& p);

/// Probability that a one-dimensional p-biased walk ever climbs one level: p/(1-p).
double rho(double p);

/// Up-continuation probability of the non-backtracking walk,
/// p / (p + (1-p)(d-1)/d). Accepts any p in [0,1] because it is evaluated at
/// transformed drifts p* which may exceed 1/2.
double alpha(int d, double p);

/// c^{(k)}_{d,p}, k = 0..d-1.
AffineMap c_map(int d, double p, int k);
ExactAffineMap c_map_exact(int d, const Rational& p, int k);

/// Convenience: the p = (d-1)/(2d-1) drift at which pstar(d, 1/3) lands.
Rational critical_drift(int d);

/// (2 - sqrt 2)/4: below this drift the dominating branching random walk is transient.
double q_star();

}  // namespace froglab
