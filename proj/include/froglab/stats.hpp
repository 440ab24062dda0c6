#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace froglab {

/// Mean of a [0,1]-valued statistic with a distribution-free half-width.
struct EstimateWithCI {
  double mean = 0.0;
  double halfwidth = 0.0;
  std::uint64_t reps = 0;
  double delta = 1e-3;

  double lo() const { return mean - halfwidth; }
  double hi() const { return mean + halfwidth; }
};

/// sqrt(ln(2/delta) / (2 n)); also the DKW band for an empirical CDF.
double hoeffding_halfwidth(std::uint64_t n, double delta);

/// Accumulates a [0,1]-valued statistic.
class MeanAccumulator {
 public:
  void add(double v) {
    sum_ += v;
    ++n_;
  }
  std::uint64_t count() const { return n_; }
  double mean() const { return n_ ? sum_ / static_cast<double>(n_) : 0.0; }
  EstimateWithCI estimate(double delta) const;

 private:
  double sum_ = 0.0;
  std::uint64_t n_ = 0;
};

/// Empirical law of a nonnegative integer count, with its generating function.
class EmpiricalPgf {
 public:
  EmpiricalPgf() = default;
  explicit EmpiricalPgf(std::span<const std::uint64_t> samples);

  void add(std::uint64_t v);
  std::uint64_t n() const { return n_; }
  const std::vector<std::uint64_t>& counts() const { return counts_; }

  /// mean of y^V, with 0^0 = 1.
  double operator()(double y) const;
  /// P(V >= k).
  double tail(std::uint64_t k) const;
  double mean() const;
  double variance() const;

  /// Half-width valid uniformly in y in [0,1]: |ghat(y) - g(y)| <= sup |Fhat - F|,
  /// bounded by DKW.
  double uniform_halfwidth(double delta) const { return hoeffding_halfwidth(n_, delta); }

 private:
  std::vector<std::uint64_t> counts_;
  std::uint64_t n_ = 0;
};

/// One-sided comparison of two independent sample means: returns
/// (mean_b - mean_a) / se, so "a <= b" is rejected when it is < -threshold.
double mean_difference_z(const EmpiricalPgf& a, const EmpiricalPgf& b);

/// Largest amount by which the empirical CDF of `b` exceeds that of `a`
/// (zero when b is empirically stochastically larger than a).
double max_cdf_excess(const EmpiricalPgf& a, const EmpiricalPgf& b);

/// Total variation distance between an empirical histogram and a pmf.
double total_variation(std::span<const std::uint64_t> counts, std::span<const double> pmf);

/// Binomial z-scores per cell; +-inf where the pmf is 0 but the cell is not.
std::vector<double> cell_z_scores(std::span<const std::uint64_t> counts, std::span<const double> pmf);

/// Two-sample chi-square on pooled bins with expected count >= min_expected.
struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
  /// max |standardized residual| over bins.
  double max_abs_residual = 0.0;
};
ChiSquareResult two_sample_chi_square(const EmpiricalPgf& a, const EmpiricalPgf& b, double min_expected = 5.0);

/// Upper tail of the chi-square distribution.
double chi_square_sf(double x, int dof);

}  // namespace froglab
