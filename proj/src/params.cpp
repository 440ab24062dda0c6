#include "froglab/params.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace froglab {

namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) throw ResourceLimit("rational overflow");
  return out;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t out = 0;
  if (__builtin_add_overflow(a, b, &out)) throw ResourceLimit("rational overflow");
  return out;
}

void require_degree(int d) {
  if (d < 2) throw InvalidParameter("d must be >= 2 (got " + std::to_string(d) + ")");
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw InvalidParameter("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
  num_ = g ? num / g : 0;
  den_ = g ? den / g : 1;
}

std::string Rational::str() const {
  std::ostringstream os;
  os << num_;
  if (den_ != 1) os << '/' << den_;
  return os.str();
}

Rational operator+(const Rational& a, const Rational& b) {
  return {checked_add(checked_mul(a.num_, b.den_), checked_mul(b.num_, a.den_)),
          checked_mul(a.den_, b.den_)};
}

Rational operator-(const Rational& a, const Rational& b) { return a + Rational(-b.num_, b.den_); }

Rational operator*(const Rational& a, const Rational& b) {
  return {checked_mul(a.num_, b.num_), checked_mul(a.den_, b.den_)};
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.num_ == 0) throw InvalidParameter("rational division by zero");
  return {checked_mul(a.num_, b.den_), checked_mul(a.den_, b.num_)};
}

bool operator<(const Rational& a, const Rational& b) {
  return static_cast<__int128>(a.num_) * b.den_ < static_cast<__int128>(b.num_) * a.den_;
}

ModelParams ModelParams::make(int d, double p, bool force) {
  require_degree(d);
  if (!(p >= 0.0)) throw InvalidParameter("p must be >= 0");
  if (!force && p > 0.5) throw InvalidParameter("p must be <= 1/2 (pass force to explore beyond)");
  if (p >= 1.0) throw InvalidParameter("p must be < 1");
  return ModelParams{d, p};
}

double ModelParams::pstar() const { return froglab::pstar(d, p); }
double ModelParams::rho() const { return froglab::rho(p); }
double ModelParams::alpha() const { return froglab::alpha(d, p); }

double pstar(int d, double p) {
  require_degree(d);
  if (!(p >= 0.0 && p <= 0.5)) throw InvalidParameter("pstar requires 0 <= p <= 1/2");
  const double den = d - (d + 1) * p;
  if (!(den > 0.0)) throw InvalidParameter("pstar denominator d - (d+1)p must be positive");
  const double out = p * (d - 1) / den;
  if (!(out >= 0.0 && out <= 1.0 + 1e-15)) throw InvalidParameter("pstar left [0,1]");
  return std::min(out, 1.0);
}

Rational pstar_exact(int d, const Rational& p) {
  require_degree(d);
  if (p < Rational(0) || Rational(1, 2) < p) throw InvalidParameter("pstar requires 0 <= p <= 1/2");
  return p * Rational(d - 1) / (Rational(d) - Rational(d + 1) * p);
}

double rho(double p) {
  if (!(p >= 0.0 && p < 1.0)) throw InvalidParameter("rho requires 0 <= p < 1");
  return p / (1.0 - p);
}

double alpha(int d, double p) {
  require_degree(d);
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidParameter("alpha requires 0 <= p <= 1");
  // p d / (p d + (1-p)(d-1)) avoids the extra rounding of (d-1)/d.
  return p * d / (p * d + (1.0 - p) * (d - 1));
}

AffineMap c_map(int d, double p, int k) {
  require_degree(d);
  if (k < 0 || k > d - 1) throw InvalidParameter("c_map requires 0 <= k <= d-1");
  if (!(p >= 0.0 && p < 1.0)) throw InvalidParameter("c_map requires 0 <= p < 1");
  const double den = p * d + (1.0 - p) * (d - 1);
  return {p * d / den, (1.0 - p) * k / den};
}

ExactAffineMap c_map_exact(int d, const Rational& p, int k) {
  require_degree(d);
  if (k < 0 || k > d - 1) throw InvalidParameter("c_map requires 0 <= k <= d-1");
  const Rational one(1);
  const Rational den = p * Rational(d) + (one - p) * Rational(d - 1);
  return {p * Rational(d) / den, (one - p) * Rational(k) / den};
}

Rational critical_drift(int d) {
  require_degree(d);
  return Rational(d - 1, 2 * d - 1);
}

double q_star() { return (2.0 - std::sqrt(2.0)) / 4.0; }

}  // namespace froglab
