#include "froglab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "froglab/errors.hpp"

namespace froglab {

double hoeffding_halfwidth(std::uint64_t n, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidParameter("delta must lie in (0,1)");
  if (n == 0) return std::numeric_limits<double>::infinity();
  return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(n)));
}

EstimateWithCI MeanAccumulator::estimate(double delta) const {
  return {mean(), hoeffding_halfwidth(n_, delta), n_, delta};
}

EmpiricalPgf::EmpiricalPgf(std::span<const std::uint64_t> samples) {
  for (auto v : samples) add(v);
}

void EmpiricalPgf::add(std::uint64_t v) {
  if (v >= counts_.size()) counts_.resize(v + 1, 0);
  ++counts_[v];
  ++n_;
}

double EmpiricalPgf::operator()(double y) const {
  if (!(y >= 0.0 && y <= 1.0)) throw DomainError("pgf argument outside [0,1]");
  if (n_ == 0) throw InsufficientEvents("empty sample");
  // Horner from the top keeps this exact for y = 0 (0^0 = 1).
  double s = 0.0;
  for (std::size_t k = counts_.size(); k-- > 0;) s = s * y + static_cast<double>(counts_[k]);
  return s / static_cast<double>(n_);
}

double EmpiricalPgf::tail(std::uint64_t k) const {
  if (n_ == 0) throw InsufficientEvents("empty sample");
  std::uint64_t c = 0;
  for (std::size_t v = k; v < counts_.size(); ++v) c += counts_[v];
  return static_cast<double>(c) / static_cast<double>(n_);
}

double EmpiricalPgf::mean() const {
  double s = 0.0;
  for (std::size_t v = 0; v < counts_.size(); ++v) s += static_cast<double>(v) * static_cast<double>(counts_[v]);
  return n_ ? s / static_cast<double>(n_) : 0.0;
}

double EmpiricalPgf::variance() const {
  if (n_ < 2) return 0.0;
  const double m = mean();
  double s = 0.0;
  for (std::size_t v = 0; v < counts_.size(); ++v) {
    const double dv = static_cast<double>(v) - m;
    s += dv * dv * static_cast<double>(counts_[v]);
  }
  return s / static_cast<double>(n_ - 1);
}

double mean_difference_z(const EmpiricalPgf& a, const EmpiricalPgf& b) {
  const double se = std::sqrt(a.variance() / static_cast<double>(a.n()) + b.variance() / static_cast<double>(b.n()));
  const double diff = b.mean() - a.mean();
  if (se == 0.0) return diff == 0.0 ? 0.0 : (diff > 0 ? INFINITY : -INFINITY);
  return diff / se;
}

double max_cdf_excess(const EmpiricalPgf& a, const EmpiricalPgf& b) {
  const std::size_t top = std::max(a.counts().size(), b.counts().size());
  double fa = 0.0, fb = 0.0, worst = 0.0;
  for (std::size_t v = 0; v < top; ++v) {
    if (v < a.counts().size()) fa += static_cast<double>(a.counts()[v]) / static_cast<double>(a.n());
    if (v < b.counts().size()) fb += static_cast<double>(b.counts()[v]) / static_cast<double>(b.n());
    worst = std::max(worst, fb - fa);
  }
  return worst;
}

double total_variation(std::span<const std::uint64_t> counts, std::span<const double> pmf) {
  if (counts.size() != pmf.size()) throw DimensionMismatch("histogram and pmf differ in length");
  std::uint64_t n = 0;
  for (auto c : counts) n += c;
  if (n == 0) throw InsufficientEvents("empty histogram");
  double tv = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) tv += std::abs(static_cast<double>(counts[i]) / n - pmf[i]);
  return tv / 2.0;
}

std::vector<double> cell_z_scores(std::span<const std::uint64_t> counts, std::span<const double> pmf) {
  if (counts.size() != pmf.size()) throw DimensionMismatch("histogram and pmf differ in length");
  std::uint64_t n = 0;
  for (auto c : counts) n += c;
  std::vector<double> z(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double expected = static_cast<double>(n) * pmf[i];
    const double var = static_cast<double>(n) * pmf[i] * (1.0 - pmf[i]);
    const double diff = static_cast<double>(counts[i]) - expected;
    if (var <= 0.0) {
      z[i] = std::abs(diff) < 0.5 ? 0.0 : (diff > 0 ? INFINITY : -INFINITY);
    } else {
      z[i] = diff / std::sqrt(var);
    }
  }
  return z;
}

namespace {

// Regularized upper incomplete gamma Q(a, x).
double gamma_q(double a, double x) {
  if (x <= 0.0) return 1.0;
  const double lg = std::lgamma(a);
  if (x < a + 1.0) {
    double sum = 1.0 / a, term = sum;
    for (int n = 1; n < 10000; ++n) {
      term *= x / (a + n);
      sum += term;
      if (std::abs(term) < std::abs(sum) * 1e-15) break;
    }
    return 1.0 - sum * std::exp(-x + a * std::log(x) - lg);
  }
  // Lentz continued fraction
  double b = x + 1.0 - a, c = 1.0 / 1e-300, dd = 1.0 / b, h = dd;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    dd = an * dd + b;
    if (std::abs(dd) < 1e-300) dd = 1e-300;
    c = b + an / c;
    if (std::abs(c) < 1e-300) c = 1e-300;
    dd = 1.0 / dd;
    const double del = dd * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - lg) * h;
}

}  // namespace

double chi_square_sf(double x, int dof) {
  if (dof <= 0) return 1.0;
  return gamma_q(dof / 2.0, x / 2.0);
}

ChiSquareResult two_sample_chi_square(const EmpiricalPgf& a, const EmpiricalPgf& b, double min_expected) {
  if (a.n() == 0 || b.n() == 0) throw InsufficientEvents("empty sample");
  const double na = static_cast<double>(a.n()), nb = static_cast<double>(b.n()), n = na + nb;
  const std::size_t top = std::max(a.counts().size(), b.counts().size());
  auto ca = [&](std::size_t v) { return v < a.counts().size() ? static_cast<double>(a.counts()[v]) : 0.0; };
  auto cb = [&](std::size_t v) { return v < b.counts().size() ? static_cast<double>(b.counts()[v]) : 0.0; };

  // Pool adjacent values until each bin's smaller expected count reaches min_expected;
  // the remainder is merged into the last bin.
  std::vector<std::pair<double, double>> bins;
  double acc_a = 0.0, acc_b = 0.0;
  for (std::size_t v = 0; v < top; ++v) {
    acc_a += ca(v);
    acc_b += cb(v);
    const double tot = acc_a + acc_b;
    if (std::min(tot * na / n, tot * nb / n) >= min_expected) {
      bins.emplace_back(acc_a, acc_b);
      acc_a = acc_b = 0.0;
    }
  }
  if (acc_a + acc_b > 0.0) {
    if (bins.empty()) bins.emplace_back(acc_a, acc_b);
    else {
      bins.back().first += acc_a;
      bins.back().second += acc_b;
    }
  }

  ChiSquareResult r;
  for (const auto& [oa, ob] : bins) {
    const double tot = oa + ob;
    const double ea = tot * na / n, eb = tot * nb / n;
    if (ea > 0) r.statistic += (oa - ea) * (oa - ea) / ea;
    if (eb > 0) r.statistic += (ob - eb) * (ob - eb) / eb;
    // standardized difference of proportions for this bin
    const double pooled = tot / n;
    const double se = std::sqrt(pooled * (1 - pooled) * (1 / na + 1 / nb));
    if (se > 0) r.max_abs_residual = std::max(r.max_abs_residual, std::abs(oa / na - ob / nb) / se);
  }
  r.dof = static_cast<int>(bins.size()) - 1;
  r.p_value = chi_square_sf(r.statistic, r.dof);
  return r;
}

}  // namespace froglab
