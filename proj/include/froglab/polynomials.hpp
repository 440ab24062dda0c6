#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "froglab/errors.hpp"

namespace froglab {

inline constexpr int kDefaultMaxPolyOrder = 16;

/// Sparse multivariate polynomial in z_1..z_n with exact integer coefficients.
///
/// Terms are kept in graded-lexicographic order (higher total degree first; ties
/// broken by the exponent of the highest-index variable, then the next, ...).
/// Zero coefficients never appear, so structural equality is polynomial equality.
class MultiPoly {
 public:
  using Coeff = std::int64_t;
  using Exponents = std::vector<std::uint8_t>;

  struct Term {
    Exponents exponents;
    Coeff coeff = 0;
    friend bool operator==(const Term&, const Term&) = default;
  };

  MultiPoly() = default;
  /// Canonicalizes: merges duplicate monomials, drops zeros, sorts.
  MultiPoly(int nvars, std::vector<Term> terms);

  static MultiPoly monomial(int nvars, Exponents exponents, Coeff coeff = 1);

  int nvars() const { return nvars_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int total_degree() const;

  /// Same polynomial viewed in a larger variable set.
  MultiPoly embedded(int nvars) const;
  MultiPoly scaled(Coeff c) const;
  /// Multiplies by z_{var+1}^{power} (var is 0-based).
  MultiPoly times_power(int var, int power) const;
  friend MultiPoly operator+(const MultiPoly& a, const MultiPoly& b);
  friend MultiPoly operator-(const MultiPoly& a, const MultiPoly& b);

  double eval(std::span<const double> z) const;
  Coeff eval_exact(std::span<const Coeff> z) const;

  /// Upper bound on |f(z + delta) - f(z)| over all |delta_i| <= eps, from
  /// |prod(a_i + delta_i) - prod(a_i)| <= prod(|a_i| + eps) - prod(|a_i|).
  double perturbation_bound(std::span<const double> z, double eps) const;

  /// e.g. "z3^3 - z1*z3^2 - 2*z2^2*z3 + 2*z1*z2*z3" (1-based variable names).
  std::string to_text() const;
  nlohmann::json to_json() const;

  /// Parses the right-hand side of to_text() output, optionally preceded by
  /// "NAME = ". The variable count is the largest of the index in NAME (if it
  /// ends in digits) and the largest variable index seen.
  static MultiPoly parse_text(std::string_view text);
  static MultiPoly from_json(const nlohmann::json& j);

  friend bool operator==(const MultiPoly&, const MultiPoly&) = default;

 private:
  int nvars_ = 0;
  std::vector<Term> terms_;
};

enum class PolyFamily { kP, kQ };

/// P_k from P_{k+1} = z_{k+1}^{k+1} - sum_{l=1}^{k} C(k, l-1) z_{k+1}^{k+1-l} P_l, P_1 = z_1.
/// Memoized; the returned reference stays valid for the life of the process.
const MultiPoly& build_P(int k, int max_k = kDefaultMaxPolyOrder);

/// Q_k from Q_{k+1} = z_{k+1}^{k+1} - sum_{l=2}^{k} C(k-1, l-2) z_{k+1}^{k+1-l} Q_l, Q_2 = z_2^2.
/// Q_l is taken in z_1..z_l (the only reading consistent with Q_3).
const MultiPoly& build_Q(int k, int max_k = kDefaultMaxPolyOrder);

const MultiPoly& build_poly(PolyFamily family, int k, int max_k = kDefaultMaxPolyOrder);

double eval_poly(const MultiPoly& poly, std::span<const double> z);

/// Exact binomial coefficient (throws ResourceLimit on overflow).
std::int64_t binomial(int n, int k);

/// Name used in text output, e.g. "P3".
std::string poly_name(PolyFamily family, int k);
PolyFamily parse_family(std::string_view s);

}  // namespace froglab
