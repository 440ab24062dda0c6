#include "froglab/gf_operator.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace froglab {

GridFunction::GridFunction(std::vector<double> grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (grid_.empty() || grid_.size() != values_.size())
    throw DimensionMismatch("grid and values must be non-empty and of equal length");
  if (grid_.front() != 0.0) throw InvalidParameter("grid must start at 0");
  for (std::size_t i = 1; i < grid_.size(); ++i) {
    if (!(grid_[i] > grid_[i - 1])) throw InvalidParameter("grid must be strictly increasing");
  }
  if (!(grid_.back() < 1.0)) throw InvalidParameter("grid must lie in [0,1)");
  for (double v : values_) {
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidParameter("grid values must lie in [0,1]");
  }
  const double m = static_cast<double>(grid_.size());
  uniform_ = true;
  for (std::size_t i = 0; i < grid_.size() && uniform_; ++i) uniform_ = grid_[i] == static_cast<double>(i) / m;
}

std::vector<double> GridFunction::uniform_grid(std::size_t m) {
  if (m == 0) throw InvalidParameter("grid size must be positive");
  std::vector<double> g(m);
  for (std::size_t i = 0; i < m; ++i) g[i] = static_cast<double>(i) / static_cast<double>(m);
  return g;
}

GridFunction GridFunction::constant(std::size_t m, double value) {
  return GridFunction(uniform_grid(m), std::vector<double>(m, value));
}

double GridFunction::operator()(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("grid function evaluated outside [0,1]");
  const std::size_t m = grid_.size();
  if (m == 1) return values_[0];
  std::size_t i = 0;
  if (uniform_) {
    i = std::min(static_cast<std::size_t>(x * static_cast<double>(m)), m - 1);
  } else {
    i = static_cast<std::size_t>(std::upper_bound(grid_.begin(), grid_.end(), x) - grid_.begin()) - 1;
  }
  if (i + 1 < m) {
    const double t = (x - grid_[i]) / (grid_[i + 1] - grid_[i]);
    return values_[i] + t * (values_[i + 1] - values_[i]);
  }
  const double slope = (values_[m - 1] - values_[m - 2]) / (grid_[m - 1] - grid_[m - 2]);
  return std::clamp(values_[m - 1] + slope * (x - grid_[m - 1]), 0.0, 1.0);
}

double GridFunction::sup() const { return *std::max_element(values_.begin(), values_.end()); }

bool GridFunction::is_nondecreasing(double tol) const {
  for (std::size_t i = 1; i < values_.size(); ++i) {
    if (values_[i] < values_[i - 1] - tol) return false;
  }
  return true;
}

double monotonize(std::vector<double>& values) {
  double repair = 0.0;
  double running = 0.0;
  for (double& v : values) {
    double fixed = std::clamp(v, 0.0, 1.0);
    fixed = std::max(fixed, running);
    repair = std::max(repair, std::abs(fixed - v));
    v = fixed;
    running = fixed;
  }
  return repair;
}

void require_unit_interval_open(double x) {
  if (!(x >= 0.0 && x < 1.0)) throw DomainError("operator argument must lie in [0,1)");
}

OperatorSums operator_sums(int d, std::span<const double> z) {
  if (z.size() != static_cast<std::size_t>(d)) throw DimensionMismatch("operator_sums: need d values");
  OperatorSums s;
  for (int k = 1; k <= d; ++k) {
    s.p_sum += static_cast<double>(binomial(d - 1, k - 1)) * build_P(k).eval(z.first(k));
  }
  for (int k = 2; k <= d; ++k) {
    s.q_sum += static_cast<double>(binomial(d - 2, k - 2)) * build_Q(k).eval(z.first(k));
  }
  return s;
}

double combine_operator(const ModelParams& params, double x, const OperatorSums& s) {
  const double p = params.p;
  const int d = params.d;
  return (p * x + (1.0 - p) / d) * s.p_sum + (d - 1) * (1.0 - p) / d * s.q_sum;
}

namespace detail {

SumBounds operator_sum_perturbation(int d, std::span<const double> z, double eps) {
  SumBounds b;
  if (eps == 0.0) return b;
  for (int k = 1; k <= d; ++k)
    b.p_bound += static_cast<double>(binomial(d - 1, k - 1)) * build_P(k).perturbation_bound(z.first(k), eps);
  for (int k = 2; k <= d; ++k)
    b.q_bound += static_cast<double>(binomial(d - 2, k - 2)) * build_Q(k).perturbation_bound(z.first(k), eps);
  return b;
}

}  // namespace detail

IterateTrace iterate_A(const ModelParams& params, const GridFunction& h0, int n) {
  if (n < 1) throw InvalidParameter("iterate_A requires n >= 1");
  IterateTrace trace;
  trace.n = n;
  trace.functions.reserve(n + 1);
  trace.functions.push_back(h0);
  trace.sup_values.push_back(h0.sup());
  trace.repair_magnitudes.push_back(0.0);
  const auto grid = h0.grid();
  for (int it = 1; it <= n; ++it) {
    const GridFunction& prev = trace.functions.back();
    std::vector<double> next(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) next[i] = apply_A(params, prev, grid[i]);
    const double repair = monotonize(next);
    trace.functions.emplace_back(std::vector<double>(grid.begin(), grid.end()), std::move(next));
    trace.sup_values.push_back(trace.functions.back().sup());
    trace.repair_magnitudes.push_back(repair);
  }
  return trace;
}

double Dyadic::value() const { return std::ldexp(static_cast<double>(numerator), -log2_den); }

double exact_iterate_A2(int n, Dyadic x) {
  if (n < 0) throw InvalidParameter("exact_iterate_A2 requires n >= 0");
  if (x.log2_den < 0 || x.log2_den > 62) throw InvalidParameter("dyadic exponent out of range");
  if (x.numerator >= (std::uint64_t{1} << x.log2_den)) throw DomainError("dyadic argument must lie in [0,1)");
  if (n + x.log2_den > kDyadicCostCap)
    throw ResourceLimit("n + log2_den = " + std::to_string(n + x.log2_den) + " exceeds cost cap " +
                        std::to_string(kDyadicCostCap));
  if (n == 0) return 1.0;

  // levels[j] holds the numerators (over 2^{m+j}) reachable after j halvings
  std::vector<std::vector<std::uint64_t>> levels(n + 1);
  levels[0] = {x.numerator};
  for (int j = 0; j < n; ++j) {
    const std::uint64_t shift = std::uint64_t{1} << (x.log2_den + j);
    auto& nxt = levels[j + 1];
    nxt.reserve(levels[j].size() * 2);
    for (auto a : levels[j]) {
      nxt.push_back(a);
      nxt.push_back(a + shift);
    }
    std::sort(nxt.begin(), nxt.end());
    nxt.erase(std::unique(nxt.begin(), nxt.end()), nxt.end());
  }

  // values at level n are A^0 1 = 1; walk back up
  std::vector<double> below(levels[n].size(), 1.0);
  for (int j = n - 1; j >= 0; --j) {
    const auto& pts = levels[j];
    const auto& nxt = levels[j + 1];
    const int m = x.log2_den + j;
    const std::uint64_t shift = std::uint64_t{1} << m;
    auto lookup = [&](std::uint64_t a) {
      const auto it = std::lower_bound(nxt.begin(), nxt.end(), a);
      return below[static_cast<std::size_t>(it - nxt.begin())];
    };
    std::vector<double> here(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double t = std::ldexp(static_cast<double>(pts[i]), -m);
      const double a = lookup(pts[i] + shift);  // h((t+1)/2)
      const double b = lookup(pts[i]);          // h(t/2)
      here[i] = (t + 2.0) / 3.0 * a * a + (t + 1.0) / 3.0 * b * (1.0 - a);
    }
    below = std::move(here);
  }
  return below[0];
}

std::vector<double> a2_interpolation_bound(const IterateTrace& trace) {
  constexpr double kLipschitz = 8.0 / 3.0;
  std::vector<double> bound(trace.functions.size(), 0.0);
  for (std::size_t n = 1; n < trace.functions.size(); ++n) {
    const auto v = trace.functions[n - 1].values();
    double e = 0.0;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) e = std::max(e, std::abs(v[i + 1] - 2.0 * v[i] + v[i - 1]) / 8.0);
    bound[n] = kLipschitz * bound[n - 1] + e + 1e-15;
  }
  return bound;
}

namespace {

class OctaveGrid {
 public:
  OctaveGrid(int octaves, int per_octave) : J_(octaves), S_(per_octave) {}

  std::size_t size() const { return static_cast<std::size_t>(J_) * S_ + 1; }
  // index 0 is y = 1; (j, t) -> 1 + (j-1) S + t
  double node(std::size_t i) const {
    if (i == 0) return 1.0;
    const std::size_t j = (i - 1) / S_ + 1, t = (i - 1) % S_;
    return std::ldexp(1.0 + static_cast<double>(t) / S_, -static_cast<int>(j));
  }
  int octave(std::size_t i) const { return i == 0 ? 0 : static_cast<int>((i - 1) / S_) + 1; }

  // Largest node <= y, or npos when y lies below every node.
  std::size_t floor_node(double y) const {
    if (y >= 1.0) return 0;
    int e = 0;
    const double m = std::frexp(y, &e);
    const int j = 1 - e;
    if (j > J_) return npos;
    const auto t = static_cast<std::size_t>(std::floor((2.0 * m - 1.0) * S_));
    return 1 + static_cast<std::size_t>(j - 1) * S_ + t;
  }

  // Smallest node >= y.
  std::size_t ceil_node(double y) const {
    const std::size_t f = floor_node(y);
    if (f == npos) return 1 + static_cast<std::size_t>(J_ - 1) * S_;
    if (f == 0 || node(f) == y) return f;
    const std::size_t t = (f - 1) % S_;
    if (t + 1 < static_cast<std::size_t>(S_)) return f + 1;
    const int j = octave(f);
    return j == 1 ? 0 : 1 + static_cast<std::size_t>(j - 2) * S_;
  }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  int J_;
  int S_;
};

// Complement form of A_2: u = 1 - h, y = 1 - x.
inline double a2_complement(double y, double ua, double ub) {
  return y / 3.0 + ua * (4.0 - y) / 3.0 - (3.0 - y) / 3.0 * ua * ua + (2.0 - y) / 3.0 * ua * ub;
}

}  // namespace

A2Bracket bracket_iterate_A2(int n_max, std::span<const double> xs, int octave_points) {
  if (n_max < 1) throw InvalidParameter("bracket_iterate_A2 requires n_max >= 1");
  if (octave_points < 1 || (octave_points & (octave_points - 1)) != 0)
    throw InvalidParameter("octave_points must be a power of two");
  double y_min = 1.0;
  for (double x : xs) {
    require_unit_interval_open(x);
    y_min = std::min(y_min, 1.0 - x);
  }
  const int top = static_cast<int>(std::ceil(-std::log2(y_min))) + 1;
  const int J = top + n_max + 1;
  if (J > 1000) throw ResourceLimit("bracket needs more than 1000 octaves");
  const OctaveGrid grid(J, octave_points);
  const std::size_t N = grid.size();

  std::vector<double> ys(N);
  for (std::size_t i = 0; i < N; ++i) ys[i] = grid.node(i);
  const std::size_t deepest = 1 + static_cast<std::size_t>(J - 1) * octave_points;
  std::vector<std::size_t> half(N), half_hi(N), mid_lo(N), mid_hi(N);
  for (std::size_t i = 0; i < N; ++i) {
    half[i] = grid.floor_node(ys[i] / 2.0);
    half_hi[i] = half[i] == OctaveGrid::npos ? deepest : grid.ceil_node(ys[i] / 2.0);
    mid_lo[i] = grid.floor_node((1.0 + ys[i]) / 2.0);
    mid_hi[i] = grid.ceil_node((1.0 + ys[i]) / 2.0);
  }

  // ulo bounds u from below (h from above) and uhi from above; h = 1 at n = 0.
  std::vector<double> ulo(N, 0.0), uhi(N, 0.0), nlo(N), nhi(N);
  A2Bracket out;
  out.n_max = n_max;
  out.xs.assign(xs.begin(), xs.end());
  for (int n = 1; n <= n_max; ++n) {
    // nodes deeper than `reach` cannot influence the query points any more
    const int reach = std::min(J, top + (n_max - n) + 1);
    const std::size_t limit = std::min(N, 1 + static_cast<std::size_t>(reach) * octave_points);
    for (std::size_t i = 0; i < limit; ++i) {
      const double y = ys[i];
      const double a_lo = half[i] == OctaveGrid::npos ? 0.0 : ulo[half[i]];
      const double a_hi = uhi[half_hi[i]];
      nlo[i] = a2_complement(y, a_lo, ulo[mid_lo[i]]);
      nhi[i] = a2_complement(y, a_hi, uhi[mid_hi[i]]);
      out.max_increase = std::max(out.max_increase, ulo[i] - nlo[i]);
    }
    std::copy(nlo.begin(), nlo.begin() + static_cast<std::ptrdiff_t>(limit), ulo.begin());
    std::copy(nhi.begin(), nhi.begin() + static_cast<std::ptrdiff_t>(limit), uhi.begin());

    double s_lo = 0.0, s_hi = 0.0;
    for (double x : xs) {
      const double y = 1.0 - x;
      const std::size_t f = grid.floor_node(y);
      s_hi = std::max(s_hi, 1.0 - (f == OctaveGrid::npos ? 0.0 : ulo[f]));
      s_lo = std::max(s_lo, 1.0 - uhi[grid.ceil_node(y)]);
    }
    out.sup_lower.push_back(std::clamp(s_lo, 0.0, 1.0));
    out.sup_upper.push_back(std::clamp(s_hi, 0.0, 1.0));
  }
  for (double x : xs) {
    const double y = 1.0 - x;
    const std::size_t f = grid.floor_node(y);
    out.upper.push_back(std::clamp(1.0 - (f == OctaveGrid::npos ? 0.0 : ulo[f]), 0.0, 1.0));
    out.lower.push_back(std::clamp(1.0 - uhi[grid.ceil_node(y)], 0.0, 1.0));
  }
  return out;
}

CheckReport check_vanishing(const VanishingOptions& opt) {
  if (opt.n_max < 1) throw InvalidParameter("n_max must be >= 1");
  const ModelParams params{2, 1.0 / 3.0};
  CheckReport rep;
  rep.name = "vanishing";
  rep.tolerance = opt.tol;

  const std::size_t m = opt.grid_size;
  const GridFunction one = GridFunction::constant(m, 1.0);
  const auto grid = one.grid();

  // Piecewise-linear grid iterate.
  std::vector<int> first_n(m, -1);
  std::optional<int> interp_first;
  double max_increase = 0.0;
  double max_repair = 0.0;
  std::vector<double> interp_sups;
  GridFunction cur = one;
  for (int n = 1; n <= opt.n_max; ++n) {
    std::vector<double> next(m);
    for (std::size_t i = 0; i < m; ++i) next[i] = apply_A(params, cur, grid[i]);
    max_repair = std::max(max_repair, monotonize(next));
    for (std::size_t i = 0; i < m; ++i) {
      max_increase = std::max(max_increase, next[i] - cur.values()[i]);
      if (first_n[i] < 0 && next[i] <= opt.tol) first_n[i] = n;
    }
    cur = GridFunction(std::vector<double>(grid.begin(), grid.end()), std::move(next));
    interp_sups.push_back(cur.sup());
    if (!interp_first && cur.sup() <= opt.tol) interp_first = n;
    if (interp_first) break;
  }

  // Certified bracket at the grid points.
  const A2Bracket br = bracket_iterate_A2(opt.n_max, grid, opt.octave_points);
  std::optional<int> first_sup;
  double max_sup_increase = 0.0;
  for (int n = 1; n <= opt.n_max; ++n) {
    if (!first_sup && br.sup_upper[n - 1] <= opt.tol) first_sup = n;
    if (n > 1) max_sup_increase = std::max(max_sup_increase, br.sup_upper[n - 1] - br.sup_upper[n - 2]);
  }

  const double violation = std::max({0.0, max_increase, br.max_increase});
  const bool monotone = violation <= opt.monotone_slack;
  rep.pass = monotone && first_sup.has_value();
  rep.statistics["max_violation"] = violation;
  rep.statistics["max_repair"] = max_repair;
  rep.statistics["first_n_sup_below_tol"] = first_sup ? *first_sup : -1;
  rep.statistics["sup_lower_at_n_max"] = br.sup_lower.back();
  rep.statistics["sup_upper_at_n_max"] = br.sup_upper.back();
  rep.statistics["interpolated_first_n"] = interp_first ? *interp_first : -1;
  rep.statistics["n_max"] = opt.n_max;
  rep.details["monotone_decrease"] = monotone;
  rep.details["attained"] = first_sup.has_value();
  if (!first_sup) {
    rep.details["message"] = "certified sup over the grid stays above tol through n_max = " + std::to_string(opt.n_max);
  }
  rep.details["certified_sup_upper"] = br.sup_upper;
  rep.details["certified_sup_lower"] = br.sup_lower;
  rep.details["interpolated_sup_values"] = interp_sups;
  rep.details["interpolated_pointwise_first_n"] = first_n;
  return rep;
}

}  // namespace froglab
