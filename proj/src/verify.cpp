#include "froglab/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "froglab/errors.hpp"
#include "froglab/frogsim.hpp"
#include "froglab/gf_operator.hpp"
#include "froglab/parallel.hpp"
#include "froglab/polynomials.hpp"
#include "froglab/walks.hpp"

namespace froglab {

namespace {

// Non-finite values would serialize as null.
constexpr double kCap = 1e12;
double capped(double v) { return std::isfinite(v) ? v : (v > 0 ? kCap : -kCap); }

std::uint64_t derived_seed(std::uint64_t seed, std::uint64_t k) { return mix64(seed ^ mix64(k + 0x5bd1e995ULL)); }

class Stopwatch {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count(); }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

SimConfig sim(const VerifyConfig& cfg, Model m, double p, int depth, std::uint64_t seed) {
  SimConfig s;
  s.params = ModelParams::make(cfg.d, p);
  s.model = m;
  s.depth = depth;
  s.reps = cfg.reps;
  s.seed = seed;
  s.threads = cfg.threads;
  return s;
}

void require_depth(const VerifyConfig& cfg, int min_depth) {
  if (cfg.depth < min_depth) throw InvalidParameter("this suite needs depth >= " + std::to_string(min_depth));
}

void require_events(std::uint64_t n, const char* what) {
  if (n < 1000) throw InsufficientEvents(std::string("fewer than 1000 ") + what);
}

void require_points(const VerifyConfig& cfg) {
  if (cfg.xs.empty()) throw InvalidParameter("no evaluation points");
  for (double x : cfg.xs) require_unit_interval_open(x);
}

void count_aborted(const std::vector<VisitRecord>& recs) {
  for (const auto& r : recs)
    if (r.aborted) throw ResourceLimit("a replicate exceeded the activation bound");
}

nlohmann::json config_json(const VerifyConfig& cfg) {
  return {{"d", cfg.d},         {"p", cfg.p},           {"reps", cfg.reps},   {"depth", cfg.depth},
          {"start_depth", cfg.start_depth}, {"j_size", cfg.j_size}, {"xs", cfg.xs}, {"delta", cfg.delta}};
}

struct PmfComparison {
  double max_abs_z = 0.0;
  double tv = 0.0;
  std::vector<double> z;
};

PmfComparison compare(const std::vector<std::uint64_t>& counts, const std::vector<double>& pmf) {
  PmfComparison c;
  c.z = cell_z_scores(counts, pmf);
  for (double& v : c.z) {
    v = capped(v);
    c.max_abs_z = std::max(c.max_abs_z, std::abs(v));
  }
  c.tv = total_variation(counts, pmf);
  return c;
}

}  // namespace

CheckReport verify_lemma_coupling(const VerifyConfig& cfg) {
  Stopwatch sw;
  const ModelParams params = ModelParams::make(cfg.d, cfg.p);
  if (params.p >= 0.5) throw InvalidParameter("coupling needs p < 1/2");
  if (cfg.start_depth < 1) throw InvalidParameter("start_depth must be >= 1");
  if (cfg.reps == 0) throw InvalidParameter("reps must be positive");
  const int h = cfg.start_depth;
  const TreeVertex start = TreeVertex::from_path(std::vector<std::uint8_t>(h, 0));
  const int margin = default_escape_margin(params.p);

  std::vector<int> cell(cfg.reps);
  parallel_for(cfg.reps, resolve_threads(cfg.threads, cfg.reps), [&](unsigned, std::uint64_t r) {
    Rng rng = Rng::stream(cfg.seed, r, 0, StreamTag::kWalk);
    const auto s = sample_pattern(params, start, margin, rng);
    cell[r] = s.truncated ? -1 : s.outcome.hit_root ? h : s.outcome.k1;
  });
  std::vector<std::uint64_t> counts(h + 1, 0);
  std::uint64_t truncated = 0;
  for (int c : cell) {
    if (c < 0) ++truncated;
    else ++counts[c];
  }

  const double ps = params.pstar();
  const auto law = nbfm_pattern_pmf(cfg.d, ps, h);
  const double control_ps = std::min(1.0, ps + 0.1);
  const auto control_law = nbfm_pattern_pmf(cfg.d, control_ps, h);
  const auto main = compare(counts, law.pmf);
  const auto control = compare(counts, control_law.pmf);

  const bool main_ok = main.max_abs_z <= 4.0 && main.tv < 0.01 && truncated == 0;
  const bool control_rejected = control.max_abs_z > 4.0 || control.tv >= 0.01;

  CheckReport rep;
  rep.name = "coupling";
  rep.tolerance = 4.0;
  rep.seeds = {cfg.seed};
  rep.pass = main_ok && control_rejected;
  rep.statistics = {{"max_abs_z", main.max_abs_z},
                    {"tv", main.tv},
                    {"truncated", static_cast<double>(truncated)},
                    {"control_max_abs_z", control.max_abs_z},
                    {"control_tv", control.tv},
                    {"control_rejected", control_rejected ? 1.0 : 0.0},
                    {"pstar", ps},
                    {"escape_margin", static_cast<double>(margin)},
                    {"max_violation", std::max(0.0, main.max_abs_z - 4.0)}};
  rep.details = {{"config", config_json(cfg)},
                 {"counts", counts},
                 {"pmf", law.pmf},
                 {"z", main.z},
                 {"control_pstar", control_ps},
                 {"control_z", control.z},
                 {"tv_tolerance", 0.01}};
  rep.runtime_seconds = sw.seconds();
  return rep;
}

CheckReport verify_lemma_binomial(const VerifyConfig& cfg) {
  Stopwatch sw;
  require_depth(cfg, 3);
  require_points(cfg);
  if (cfg.j_size < 0 || cfg.j_size > cfg.d - 1) throw InvalidParameter("j_size must lie in [0, d-1]");
  require_events(cfg.reps, "conditioning events");
  const std::uint64_t s_main = derived_seed(cfg.seed, 1), s_ref = derived_seed(cfg.seed, 2);
  const auto recs = run_replicates(sim(cfg, Model::kSfm, cfg.p, cfg.depth, s_main));
  const auto ref = run_replicates(sim(cfg, Model::kSfm, cfg.p, cfg.depth - 1, s_ref));
  count_aborted(recs);
  count_aborted(ref);
  const EmpiricalPgf g = root_visit_law(ref);

  const double cell_delta = cfg.delta / static_cast<double>(cfg.xs.size() + 1);
  const double band = g.uniform_halfwidth(cell_delta);
  const int d = cfg.d;
  const AffineMap c = c_map(d, cfg.p, d - 1 - cfg.j_size);

  double worst_diff = 0.0, worst_excess = -INFINITY;
  nlohmann::json points = nlohmann::json::array();
  for (double x : cfg.xs) {
    MeanAccumulator lhs;
    for (const auto& r : recs) {
      const int j = r.first_child;
      std::uint64_t J = 0;
      for (int k = 1; k <= cfg.j_size; ++k) J |= std::uint64_t{1} << ((j + k) % d);
      lhs.add(r.b_event(j, J) ? std::pow(x, r.to_root[j]) : 0.0);
    }
    const auto est = lhs.estimate(cell_delta);
    const double rhs = g(c(x));
    const double diff = std::abs(est.mean - rhs);
    const double margin = est.halfwidth + band;
    worst_diff = std::max(worst_diff, diff);
    worst_excess = std::max(worst_excess, diff - margin);
    points.push_back({{"x", x}, {"lhs", est.mean}, {"rhs", rhs}, {"margin", margin}});
  }

  CheckReport rep;
  rep.name = "binomial";
  rep.seeds = {cfg.seed, s_main, s_ref};
  rep.pass = worst_excess <= 0.0;
  rep.tolerance = 0.0;
  rep.statistics = {{"max_abs_diff", worst_diff},
                    {"max_excess_over_margin", worst_excess},
                    {"activations", static_cast<double>(recs.size())},
                    {"max_violation", std::max(0.0, worst_excess)}};
  rep.details = {{"config", config_json(cfg)}, {"points", points}, {"reference_depth", cfg.depth - 1}};
  rep.runtime_seconds = sw.seconds();
  return rep;
}

CheckReport verify_self_consistency(const VerifyConfig& cfg) {
  Stopwatch sw;
  require_depth(cfg, 3);
  require_points(cfg);
  const std::uint64_t s_main = derived_seed(cfg.seed, 1);
  const auto recs = run_replicates(sim(cfg, Model::kSfm, cfg.p, cfg.depth, s_main));
  count_aborted(recs);
  EmpiricalPgf top, sub;
  for (const auto& r : recs) {
    top.add(r.root_visits);
    sub.add(r.to_hub[r.first_child]);
  }
  const ModelParams params{cfg.d, cfg.p};
  const double e_top = top.uniform_halfwidth(cfg.delta / 2), e_sub = sub.uniform_halfwidth(cfg.delta / 2);
  const double wp_slope = cfg.p, wp_icpt = (1.0 - cfg.p) / cfg.d, wq = (cfg.d - 1) * (1.0 - cfg.p) / cfg.d;

  double worst_diff = 0.0, worst_excess = -INFINITY;
  nlohmann::json points = nlohmann::json::array();
  for (double x : cfg.xs) {
    const auto z = composition_values(params, sub, x);
    const double rhs = combine_operator(params, x, operator_sums(cfg.d, z));
    const double lhs = top(x);
    const auto pb = detail::operator_sum_perturbation(cfg.d, z, e_sub);
    const double margin = e_top + (wp_slope * x + wp_icpt) * pb.p_bound + wq * pb.q_bound + 1e-12;
    const double diff = std::abs(lhs - rhs);
    worst_diff = std::max(worst_diff, diff);
    worst_excess = std::max(worst_excess, diff - margin);
    points.push_back({{"x", x}, {"g", lhs}, {"Ag", rhs}, {"margin", margin}});
  }

  CheckReport rep;
  rep.name = "self-consistency";
  rep.seeds = {cfg.seed, s_main};
  rep.pass = worst_excess <= 0.0;
  rep.statistics = {{"max_abs_diff", worst_diff},
                    {"max_excess_over_margin", worst_excess},
                    {"band_top", e_top},
                    {"band_subtree", e_sub},
                    {"mean_root_visits", top.mean()},
                    {"max_violation", std::max(0.0, worst_excess)}};
  rep.details = {{"config", config_json(cfg)}, {"points", points}};
  rep.runtime_seconds = sw.seconds();
  return rep;
}

CheckReport verify_rsfm_identity(const VerifyConfig& cfg) {
  Stopwatch sw;
  require_depth(cfg, 3);
  require_points(cfg);
  const int d = cfg.d;
  const std::uint64_t s_main = derived_seed(cfg.seed, 1);
  const auto recs = run_replicates(sim(cfg, Model::kRsfm, cfg.p, cfg.depth, s_main));
  count_aborted(recs);

  EmpiricalPgf tilde, hub;
  std::uint64_t n_d1 = 0;
  for (const auto& r : recs) {
    n_d1 += r.d1();
    for (int i = 0; i < d; ++i) {
      tilde.add(r.to_root[i]);
      hub.add(r.to_hub[i]);
    }
  }
  require_events(n_d1, "replicates in which the hub frog climbs or follows the root frog");

  const double cell_delta = cfg.delta / static_cast<double>(cfg.xs.size() * (d + 1) + 1);
  const double h_tilde = hoeffding_halfwidth(tilde.n(), cell_delta);
  const double e_hub = hub.uniform_halfwidth(cell_delta);
  const double h_d1 = hoeffding_halfwidth(n_d1, cell_delta);

  double worst_id = 0.0, excess_id = -INFINITY, worst_poly = 0.0, excess_poly = -INFINITY;
  nlohmann::json points = nlohmann::json::array();
  for (double x : cfg.xs) {
    std::vector<double> sum(d + 1, 0.0);
    for (const auto& r : recs) {
      if (!r.d1()) continue;
      std::uint64_t s = 0;
      for (int i = 0; i < d; ++i)
        if (r.stage1 >> i & 1) s += r.to_root[i];
      sum[r.stage1_count()] += std::pow(x, static_cast<double>(s));
    }
    std::vector<double> P(d + 1), hP(d + 1);
    for (int l = 1; l <= d; ++l) {
      const double cnk = static_cast<double>(binomial(d - 1, l - 1));
      P[l] = sum[l] / static_cast<double>(n_d1) / cnk;
      hP[l] = h_d1 / cnk;
    }
    const double z = tilde(x);
    double rhs = std::pow(z, d);
    double bound = std::pow(z + h_tilde, d) - std::pow(z, d);
    for (int l = 1; l <= d - 1; ++l) {
      const double cnk = static_cast<double>(binomial(d - 1, l - 1));
      rhs -= cnk * std::pow(z, d - l) * P[l];
      bound += cnk * (std::pow(z + h_tilde, d - l) * (P[l] + hP[l]) - std::pow(z, d - l) * P[l]);
    }
    const double diff = std::abs(P[d] - rhs);
    worst_id = std::max(worst_id, diff);
    excess_id = std::max(excess_id, diff - (hP[d] + bound + 1e-12));

    const ModelParams params{d, cfg.p};
    const auto zs = composition_values(params, hub, x);
    nlohmann::json poly_pts = nlohmann::json::array();
    for (int l = 1; l <= d; ++l) {
      const auto& poly = build_P(l);
      const std::span<const double> zl(zs.data(), l);
      const double val = poly.eval(zl);
      const double margin = hP[l] + poly.perturbation_bound(zl, e_hub) + 1e-12;
      const double dv = std::abs(P[l] - val);
      worst_poly = std::max(worst_poly, dv);
      excess_poly = std::max(excess_poly, dv - margin);
      poly_pts.push_back({{"l", l}, {"simulated", P[l]}, {"polynomial", val}, {"margin", margin}});
    }
    points.push_back({{"x", x},
                      {"top", P[d]},
                      {"identity_rhs", rhs},
                      {"identity_margin", hP[d] + bound},
                      {"z", z},
                      {"by_size", poly_pts}});
  }

  CheckReport rep;
  rep.name = "rsfm";
  rep.seeds = {cfg.seed, s_main};
  rep.pass = excess_id <= 0.0 && excess_poly <= 0.0;
  rep.statistics = {{"identity_max_abs_diff", worst_id},
                    {"identity_max_excess", excess_id},
                    {"polynomial_max_abs_diff", worst_poly},
                    {"polynomial_max_excess", excess_poly},
                    {"d1_events", static_cast<double>(n_d1)},
                    {"max_violation", std::max({0.0, excess_id, excess_poly})}};
  rep.details = {{"config", config_json(cfg)}, {"points", points}};
  rep.runtime_seconds = sw.seconds();
  return rep;
}

CheckReport verify_domination(const VerifyConfig& cfg) {
  Stopwatch sw;
  require_depth(cfg, 2);
  const double ps = pstar(cfg.d, cfg.p);
  if (!(ps < 0.5)) throw InvalidParameter("p* must be below 1/2 for the non-backtracking models");
  const std::uint64_t s1 = derived_seed(cfg.seed, 1), s2 = derived_seed(cfg.seed, 2), s3 = derived_seed(cfg.seed, 3);
  const auto sfm = root_visit_law(run_replicates(sim(cfg, Model::kSfm, ps, cfg.depth, s1)));
  const auto nbfm = root_visit_law(run_replicates(sim(cfg, Model::kNbfm, ps, cfg.depth, s2)));
  const auto fmr = run_replicates(sim(cfg, Model::kFm, cfg.p, cfg.depth, s3));
  std::uint64_t exhausted = 0;
  for (const auto& r : fmr) exhausted += r.horizon_exhausted;
  const auto fm = root_visit_law(fmr);

  const double band = hoeffding_halfwidth(cfg.reps, cfg.delta / 3);
  const double z1 = capped(mean_difference_z(sfm, nbfm)), z2 = capped(mean_difference_z(nbfm, fm));
  const double cdf1 = max_cdf_excess(sfm, nbfm), cdf2 = max_cdf_excess(nbfm, fm);
  const double zc = capped(mean_difference_z(fm, sfm));
  const bool degenerate = sfm.mean() == 0.0 && nbfm.mean() == 0.0 && fm.mean() == 0.0;
  const bool chain = z1 >= -3.0 && z2 >= -3.0 && cdf1 <= 2 * band && cdf2 <= 2 * band;
  const bool control_rejected = zc < -3.0;

  CheckReport rep;
  rep.name = "domination";
  rep.tolerance = 3.0;
  rep.seeds = {cfg.seed, s1, s2, s3};
  rep.pass = chain && (control_rejected || degenerate);
  rep.statistics = {{"mean_sfm", sfm.mean()},
                    {"mean_nbfm", nbfm.mean()},
                    {"mean_fm", fm.mean()},
                    {"z_sfm_nbfm", z1},
                    {"z_nbfm_fm", z2},
                    {"cdf_excess_sfm_nbfm", cdf1},
                    {"cdf_excess_nbfm_fm", cdf2},
                    {"cdf_slack", 2 * band},
                    {"control_z_fm_sfm", zc},
                    {"control_rejected", control_rejected ? 1.0 : 0.0},
                    {"fm_horizon_exhausted", static_cast<double>(exhausted)},
                    {"pstar", ps},
                    {"max_violation", std::max({0.0, -3.0 - z1, -3.0 - z2})}};
  rep.details = {{"config", config_json(cfg)},
                 {"truncation", "all three counts only lose visits as depth decreases"}};
  rep.runtime_seconds = sw.seconds();
  return rep;
}

CheckReport verify_self_similarity(const VerifyConfig& cfg) {
  Stopwatch sw;
  require_depth(cfg, 3);
  require_events(cfg.reps, "activated subtrees");
  const std::uint64_t s1 = derived_seed(cfg.seed, 1), s2 = derived_seed(cfg.seed, 2);
  const auto top = root_visit_law(run_replicates(sim(cfg, Model::kSfm, cfg.p, cfg.depth - 1, s1)));
  EmpiricalPgf sub;
  for (const auto& r : run_replicates(sim(cfg, Model::kSfm, cfg.p, cfg.depth, s2))) sub.add(r.to_hub[r.first_child]);
  const auto chi = two_sample_chi_square(top, sub);

  CheckReport rep;
  rep.name = "self-similarity";
  rep.tolerance = 4.0;
  rep.seeds = {cfg.seed, s1, s2};
  rep.pass = chi.max_abs_residual <= 4.0;
  rep.statistics = {{"chi_square", chi.statistic},
                    {"dof", static_cast<double>(chi.dof)},
                    {"p_value", chi.p_value},
                    {"max_abs_residual", chi.max_abs_residual},
                    {"mean_top", top.mean()},
                    {"mean_subtree", sub.mean()},
                    {"max_violation", std::max(0.0, chi.max_abs_residual - 4.0)}};
  rep.details = {{"config", config_json(cfg)}, {"top_depth", cfg.depth - 1}, {"subtree_model_depth", cfg.depth}};
  rep.runtime_seconds = sw.seconds();
  return rep;
}

CheckReport verify_inequality(const VerifyConfig& cfg) {
  Stopwatch sw;
  require_depth(cfg, 2);
  require_points(cfg);
  if (cfg.d < 2) throw InvalidParameter("d must be >= 2");
  const double p = critical_drift(cfg.d).to_double();
  const std::uint64_t s1 = derived_seed(cfg.seed, 1);
  const auto recs = run_replicates(sim(cfg, Model::kSfm, p, cfg.depth, s1));
  count_aborted(recs);
  const auto g = root_visit_law(recs);
  const double band = g.uniform_halfwidth(cfg.delta);
  CheckReport rep = check_Ad_le_A2(cfg.d, g, cfg.xs, band);
  const CheckReport sharp = check_Ad_le_A2(cfg.d, g, cfg.xs, 0.0);
  rep.name = "inequality";
  rep.seeds = {cfg.seed, s1};
  rep.statistics["band"] = band;
  rep.statistics["zero_band_max_excess"] = sharp.statistics.at("max_excess_over_margin");
  rep.statistics["mean_root_visits"] = g.mean();
  rep.statistics["drift"] = p;
  rep.details["config"] = config_json(cfg);
  rep.runtime_seconds = sw.seconds();
  return rep;
}

std::vector<CheckReport> run_suite(std::string_view name, const VerifyConfig& cfg) {
  using Fn = CheckReport (*)(const VerifyConfig&);
  const std::pair<std::string_view, Fn> table[] = {
      {"coupling", verify_lemma_coupling},     {"binomial", verify_lemma_binomial},
      {"self-consistency", verify_self_consistency}, {"rsfm", verify_rsfm_identity},
      {"domination", verify_domination},       {"self-similarity", verify_self_similarity},
      {"inequality", verify_inequality}};
  std::vector<CheckReport> out;
  for (const auto& [n, fn] : table)
    if (name == "all" || name == n) out.push_back(fn(cfg));
  if (out.empty()) throw InvalidParameter("unknown suite '" + std::string(name) + "'");
  return out;
}

}  // namespace froglab
