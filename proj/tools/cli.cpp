#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "froglab/errors.hpp"
#include "froglab/frogsim.hpp"
#include "froglab/gf_operator.hpp"
#include "froglab/parallel.hpp"
#include "froglab/params.hpp"
#include "froglab/polynomials.hpp"
#include "froglab/stats.hpp"
#include "froglab/verify.hpp"
#include "froglab/walks.hpp"

#ifndef FROGLAB_VERSION
#define FROGLAB_VERSION "unknown"
#endif

namespace froglab::cli {

namespace {

using nlohmann::json;

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Options {
  int d = 3;
  std::string p = "1/3";
  bool force = false;

  std::string family = "P";
  int k = 3;
  std::string format = "text";
  std::string pgf_format = "json";

  int n = 10;
  std::size_t grid_size = 1024;
  std::string h0 = "one";

  std::string name;
  int n_max = 500;
  double tol = 0.05;
  int octave_points = 512;

  std::string model = "sfm";
  int depth = 8;
  std::uint64_t reps = 1000;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  std::string x_grid = "0,0.25,0.5,0.75";
  double delta = 1e-3;
  std::uint64_t step_horizon = 1'000'000;
  std::uint64_t max_vertices = 50'000'000;
  bool fm_no_sleepers = false;

  std::string suite = "all";
  std::uint64_t verify_reps = 100000;
  int verify_depth = 10;
  int coupling_depth = 4;
  int start_depth = 4;
  int j_size = 0;

  std::string out;
};

struct Probability {
  double value = 0.0;
  std::optional<Rational> exact;
};

template <class T>
bool parse_number(std::string_view s, T& v) {
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  return ec == std::errc() && ptr == end;
}

Probability parse_probability(const std::string& s) {
  Probability p;
  const auto slash = s.find('/');
  if (slash != std::string::npos) {
    std::int64_t a = 0, b = 0;
    if (!parse_number(std::string_view(s).substr(0, slash), a) ||
        !parse_number(std::string_view(s).substr(slash + 1), b) || b <= 0)
      throw UsageError("--p: expected a decimal or a fraction a/b with b > 0, got '" + s + "'");
    p.exact = Rational(a, b);
    p.value = p.exact->to_double();
  } else if (!parse_number(std::string_view(s), p.value)) {
    throw UsageError("--p: expected a decimal or a fraction a/b, got '" + s + "'");
  }
  return p;
}

std::vector<double> parse_grid(const std::string& s) {
  std::vector<double> xs;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double x = 0.0;
    if (!parse_number(std::string_view(item), x) || !(x >= 0.0 && x < 1.0))
      throw UsageError("--x-grid: every point must be a number in [0,1), got '" + item + "'");
    xs.push_back(x);
  }
  if (xs.empty()) throw UsageError("--x-grid: at least one point is required");
  return xs;
}

struct Seed {
  std::uint64_t value = 0;
  std::string source = "default";
};

Seed resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return {*flag, "flag"};
  if (const char* env = std::getenv("FROGLAB_SEED"); env != nullptr && *env != '\0') {
    std::uint64_t v = 0;
    if (!parse_number(std::string_view(env), v))
      throw UsageError(std::string("FROGLAB_SEED: expected an unsigned 64-bit integer, got '") + env + "'");
    return {v, "FROGLAB_SEED"};
  }
  return {};
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm g{};
  gmtime_r(&t, &g);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &g);
  return buf;
}

json document(const json& config, json body, const json& extra_header = json::object()) {
  json header = {{"tool", "froglab"}, {"version", FROGLAB_VERSION}, {"timestamp", timestamp()}, {"config", config}};
  header.update(extra_header);
  return {{"schema_version", kSchemaVersion}, {"header", std::move(header)}, {"body", std::move(body)}};
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << content;
  if (!f) throw std::runtime_error("failed writing '" + path + "'");
}

void emit(const std::string& path, const json& doc, std::ostream& out) {
  const std::string text = doc.dump(2) + "\n";
  if (path.empty()) out << text;
  else write_file(path, text);
}

ModelParams model_params(const Options& o) { return ModelParams::make(o.d, parse_probability(o.p).value, o.force); }

json params_config(const Options& o) { return {{"d", o.d}, {"p", o.p}, {"force", o.force}}; }

json sim_config_json(const SimConfig& c, const Seed& seed) {
  return {{"model", to_string(c.model)},
          {"d", c.params.d},
          {"p", c.params.p},
          {"depth", c.depth},
          {"reps", c.reps},
          {"seed", seed.value},
          {"seed_source", seed.source},
          {"threads", c.threads},
          {"step_horizon", c.step_horizon},
          {"max_vertices", c.max_vertices},
          {"fm_no_sleepers", c.fm_no_sleepers}};
}

SimConfig sim_config(const Options& o, const Seed& seed) {
  SimConfig c;
  c.params = model_params(o);
  c.model = parse_model(o.model);
  c.depth = o.depth;
  c.reps = o.reps;
  c.seed = seed.value;
  c.threads = o.threads;
  c.step_horizon = o.step_horizon;
  c.max_vertices = o.max_vertices;
  c.fm_no_sleepers = o.fm_no_sleepers;
  c.validate();
  return c;
}

int cmd_params(const Options& o, std::ostream& out) {
  const Probability prob = parse_probability(o.p);
  const ModelParams mp = ModelParams::make(o.d, prob.value, o.force);
  json maps = json::array();
  for (int k = 0; k < mp.d; ++k) {
    const AffineMap c = c_map(mp.d, mp.p, k);
    maps.push_back({{"k", k}, {"slope", c.slope}, {"intercept", c.intercept}});
  }
  const Rational crit = critical_drift(mp.d);
  json body = {{"d", mp.d},
               {"p", mp.p},
               {"pstar", mp.pstar()},
               {"rho", mp.rho()},
               {"alpha", mp.alpha()},
               {"c_maps", maps},
               {"critical_drift", {{"value", crit.to_double()}, {"exact", crit.str()}}},
               {"q_star", q_star()},
               {"escape_margin", default_escape_margin(mp.p)}};
  if (prob.exact) {
    json exact_maps = json::array();
    for (int k = 0; k < mp.d; ++k) {
      const ExactAffineMap c = c_map_exact(mp.d, *prob.exact, k);
      exact_maps.push_back({{"k", k}, {"slope", c.slope.str()}, {"intercept", c.intercept.str()}});
    }
    body["exact"] = {{"p", prob.exact->str()}, {"pstar", pstar_exact(mp.d, *prob.exact).str()}, {"c_maps", exact_maps}};
  }
  emit(o.out, document(params_config(o), body), out);
  return kExitOk;
}

int cmd_poly(const Options& o, std::ostream& out) {
  const PolyFamily family = parse_family(o.family);
  const MultiPoly& poly = build_poly(family, o.k);
  const std::string name = poly_name(family, o.k);
  if (o.format == "text") {
    const std::string line = name + " = " + poly.to_text() + "\n";
    if (o.out.empty()) out << line;
    else write_file(o.out, line);
    return kExitOk;
  }
  const json config = {{"family", o.family}, {"k", o.k}, {"format", o.format}};
  json body = {{"name", name},
               {"nvars", poly.nvars()},
               {"total_degree", poly.total_degree()},
               {"text", poly.to_text()},
               {"polynomial", poly.to_json()}};
  emit(o.out, document(config, body), out);
  return kExitOk;
}

int cmd_iterate(const Options& o, std::ostream& out) {
  const ModelParams mp = model_params(o);
  const auto h0 = GridFunction::constant(o.grid_size, o.h0 == "one" ? 1.0 : 0.0);
  const auto trace = iterate_A(mp, h0, o.n);
  std::string csv = "n,x,value\n";
  for (std::size_t i = 0; i < trace.functions.size(); ++i) {
    const auto& f = trace.functions[i];
    for (std::size_t j = 0; j < f.size(); ++j)
      csv += std::to_string(i) + "," + num(f.grid()[j]) + "," + num(f.values()[j]) + "\n";
  }
  write_file(o.out, csv);
  json config = params_config(o);
  config.update({{"n", o.n}, {"grid_size", o.grid_size}, {"h0", o.h0}, {"out", o.out}, {"format", "csv"}});
  json body = {{"csv", o.out},
               {"columns", {"n", "x", "value"}},
               {"rows", trace.functions.size() * o.grid_size},
               {"sup_values", trace.sup_values},
               {"repair_magnitudes", trace.repair_magnitudes},
               {"exploratory", mp.d >= 3}};
  const json doc = document(config, body);
  write_file(o.out + ".meta.json", doc.dump(2) + "\n");
  out << doc.dump(2) << "\n";
  return kExitOk;
}

int cmd_check(const Options& o, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  CheckReport rep;
  json config = {{"name", o.name}};
  if (o.name == "vanishing") {
    VanishingOptions v;
    v.n_max = o.n_max;
    v.tol = o.tol;
    v.grid_size = o.grid_size;
    v.octave_points = o.octave_points;
    config.update({{"n_max", o.n_max}, {"tol", o.tol}, {"grid_size", o.grid_size}, {"octave_points", o.octave_points}});
    rep = check_vanishing(v);
  } else {
    const auto trace = iterate_A(ModelParams::make(2, 1.0 / 3.0), GridFunction::constant(o.grid_size, 1.0), o.n);
    const GridFunction& g = trace.functions.back();
    const std::vector<double> xs =
        o.x_grid.empty() ? std::vector<double>(g.grid().begin(), g.grid().end()) : parse_grid(o.x_grid);
    config.update({{"d", o.d}, {"n", o.n}, {"grid_size", o.grid_size}, {"x_grid", o.x_grid}, {"input", "A_2^n 1"}});
    rep = check_Ad_le_A2(o.d, g, xs, 0.0);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  emit(o.out, document(config, rep.to_json(), {{"runtime_seconds", secs}}), out);
  return rep.pass ? kExitOk : kExitFailed;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  const Seed seed = resolve_seed(o.seed);
  const SimConfig cfg = sim_config(o, seed);
  const auto xs = parse_grid(o.x_grid);
  if (!(o.delta > 0.0 && o.delta < 1.0)) throw UsageError("--delta must lie in (0,1)");
  const auto recs = run_replicates(cfg);
  const EmpiricalPgf law = root_visit_law(recs);
  const double hw = hoeffding_halfwidth(law.n(), o.delta / static_cast<double>(xs.size()));
  json per_x = json::array();
  for (double x : xs) per_x.push_back({{"x", x}, {"estimate", law(x)}, {"ci_halfwidth", hw}});

  MeanAccumulator activated, killed, vertices, stage1;
  std::uint64_t d1 = 0, exhausted = 0, aborted = 0;
  for (const auto& r : recs) {
    activated.add(r.activated_count());
    killed.add(static_cast<double>(r.frogs_killed));
    vertices.add(static_cast<double>(r.vertices_visited));
    stage1.add(r.stage1_count());
    d1 += r.d1();
    exhausted += r.horizon_exhausted;
    aborted += r.aborted;
  }
  const double n = static_cast<double>(recs.size());
  json rates = {{"mean_root_visits", law.mean()},
                {"var_root_visits", law.variance()},
                {"mean_activated_subtrees", activated.mean()},
                {"mean_frogs_killed", killed.mean()},
                {"mean_vertices_visited", vertices.mean()},
                {"horizon_exhausted", static_cast<double>(exhausted) / n},
                {"aborted", static_cast<double>(aborted) / n}};
  if (cfg.model == Model::kSfm || cfg.model == Model::kRsfm) rates["d1"] = static_cast<double>(d1) / n;
  if (cfg.model == Model::kRsfm) rates["mean_stage1_subtrees"] = stage1.mean();

  json config = sim_config_json(cfg, seed);
  config.update({{"x_grid", xs}, {"delta", o.delta}});
  json body = {{"config", config},
               {"per_x", per_x},
               {"root_visit_counts", law.counts()},
               {"event_rates", rates},
               {"flags",
                {{"horizon_exhausted", exhausted > 0},
                 {"aborted", aborted > 0},
                 {"ci", "simultaneous Hoeffding over the x grid"},
                 {"truncation_bias", "depth and step cuts only remove visits, so estimates of E[x^V] are biased upward"}}}};
  emit(o.out, document(config, body), out);
  return aborted > 0 ? kExitFailed : kExitOk;
}

int cmd_estimate_pgf(const Options& o, std::ostream& out) {
  const Seed seed = resolve_seed(o.seed);
  const SimConfig cfg = sim_config(o, seed);
  const auto xs = parse_grid(o.x_grid);
  if (!(o.delta > 0.0 && o.delta < 1.0)) throw UsageError("--delta must lie in (0,1)");
  const auto est = estimate_pgf(cfg, xs, o.delta / static_cast<double>(xs.size()));
  json config = sim_config_json(cfg, seed);
  config.update({{"x_grid", xs}, {"delta", o.delta}, {"format", o.pgf_format}});
  if (o.pgf_format == "csv") {
    std::string csv = "x,estimate,ci_halfwidth,lo,hi\n";
    for (std::size_t i = 0; i < xs.size(); ++i)
      csv += num(xs[i]) + "," + num(est[i].mean) + "," + num(est[i].halfwidth) + "," + num(est[i].lo()) + "," +
             num(est[i].hi()) + "\n";
    if (o.out.empty()) {
      out << csv;
    } else {
      write_file(o.out, csv);
      write_file(o.out + ".meta.json", document(config, {{"csv", o.out}}).dump(2) + "\n");
    }
    return kExitOk;
  }
  json per_x = json::array();
  for (std::size_t i = 0; i < xs.size(); ++i)
    per_x.push_back({{"x", xs[i]}, {"estimate", est[i].mean}, {"ci_halfwidth", est[i].halfwidth},
                     {"lo", est[i].lo()}, {"hi", est[i].hi()}});
  emit(o.out, document(config, {{"per_x", per_x}, {"simultaneous_delta", o.delta}}), out);
  return kExitOk;
}

int cmd_coupling(const Options& o, std::ostream& out) {
  const Seed seed = resolve_seed(o.seed);
  const ModelParams mp = model_params(o);
  if (mp.p >= 0.5) throw UsageError("--p must be below 1/2 for the coupling sampler");
  const int h = o.coupling_depth;
  const TreeVertex start = TreeVertex::from_path(std::vector<std::uint8_t>(h, 0));
  const int margin = default_escape_margin(mp.p);
  std::vector<PatternSample> samples(o.reps);
  parallel_for(o.reps, resolve_threads(o.threads, o.reps), [&](unsigned, std::uint64_t r) {
    Rng rng = Rng::stream(seed.value, r, 0, StreamTag::kWalk);
    samples[r] = sample_pattern(mp, start, margin, rng);
  });

  std::string csv = "replicate,k1_or_root,steps_used\n";
  std::vector<std::uint64_t> counts(h + 1, 0);
  std::uint64_t truncated = 0;
  for (std::uint64_t r = 0; r < o.reps; ++r) {
    const auto& s = samples[r];
    std::string cell;
    if (s.truncated) {
      cell = "truncated";
      ++truncated;
    } else if (s.outcome.hit_root) {
      cell = "root";
      ++counts[h];
    } else {
      cell = std::to_string(s.outcome.k1);
      ++counts[s.outcome.k1];
    }
    csv += std::to_string(r) + "," + cell + "," + std::to_string(s.steps) + "\n";
  }
  write_file(o.out, csv);

  const auto law = nbfm_pattern_pmf(mp.d, mp.pstar(), h);
  const auto z = cell_z_scores(counts, law.pmf);
  double max_z = 0.0;
  for (double v : z) max_z = std::max(max_z, std::isfinite(v) ? std::abs(v) : 1e12);
  json config = params_config(o);
  config.update({{"depth", h}, {"reps", o.reps}, {"seed", seed.value}, {"seed_source", seed.source},
                 {"threads", o.threads}, {"out", o.out}, {"format", "csv"}});
  json body = {{"csv", o.out},
               {"columns", {"replicate", "k1_or_root", "steps_used"}},
               {"escape_margin", margin},
               {"pstar", mp.pstar()},
               {"counts", counts},
               {"truncated", truncated},
               {"nbfm_pmf", law.pmf},
               {"max_abs_z", max_z},
               {"tv", total_variation(counts, law.pmf)}};
  const json doc = document(config, body);
  write_file(o.out + ".meta.json", doc.dump(2) + "\n");
  out << doc.dump(2) << "\n";
  return kExitOk;
}

int cmd_verify(const Options& o, std::ostream& out) {
  const Seed seed = resolve_seed(o.seed);
  VerifyConfig cfg;
  cfg.d = o.d;
  cfg.p = model_params(o).p;
  cfg.reps = o.verify_reps;
  cfg.depth = o.verify_depth;
  cfg.start_depth = o.start_depth;
  cfg.j_size = o.j_size;
  cfg.xs = parse_grid(o.x_grid);
  cfg.seed = seed.value;
  cfg.threads = o.threads;
  cfg.delta = o.delta;
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw UsageError("--delta must lie in (0,1)");
  const auto reports = run_suite(o.suite, cfg);
  bool all = true;
  json suites = json::array(), runtimes = json::object();
  for (const auto& r : reports) {
    all = all && r.pass;
    suites.push_back(r.to_json());
    runtimes[r.name] = r.runtime_seconds;
  }
  json config = params_config(o);
  config.update({{"suite", o.suite}, {"reps", o.verify_reps}, {"depth", o.verify_depth}, {"start_depth", o.start_depth},
                 {"j_size", o.j_size}, {"x_grid", cfg.xs}, {"delta", o.delta}, {"seed", seed.value},
                 {"seed_source", seed.source}, {"threads", o.threads}});
  emit(o.out, document(config, {{"pass", all}, {"suites", suites}}, {{"runtime_seconds", runtimes}}), out);
  return all ? kExitOk : kExitFailed;
}

void add_params(CLI::App* s, Options& o) {
  s->add_option("--d", o.d, "branching degree")->check(CLI::Range(2, kMaxSimDegree))->capture_default_str();
  s->add_option("--p", o.p, "drift toward the root, decimal or a/b, in [0,1/2]")->capture_default_str();
  s->add_flag("--force", o.force, "allow 1/2 < p < 1 for exploration");
}

void add_sim(CLI::App* s, Options& o, bool with_model) {
  add_params(s, o);
  if (with_model)
    s->add_option("--model", o.model, "fm|nbfm|sfm|rsfm")
        ->check(CLI::IsMember({"fm", "nbfm", "sfm", "rsfm"}))
        ->capture_default_str();
  s->add_option("--depth", o.depth, "truncation depth")->check(CLI::Range(1, 60))->capture_default_str();
  s->add_option("--reps", o.reps, "replicates")->check(CLI::Range(std::uint64_t{1}, std::uint64_t{1} << 40))
      ->capture_default_str();
  s->add_option("--seed", o.seed, "master seed (overrides FROGLAB_SEED)");
  s->add_option("--threads", o.threads, "worker threads, 0 = auto")->capture_default_str();
  s->add_option("--x-grid", o.x_grid, "comma-separated points in [0,1)")->capture_default_str();
  s->add_option("--delta", o.delta, "error probability of the simultaneous intervals")->capture_default_str();
  s->add_option("--step-horizon", o.step_horizon, "FM step budget per replicate")
      ->check(CLI::PositiveNumber)->capture_default_str();
  s->add_option("--max-vertices", o.max_vertices, "activation bound per replicate")
      ->check(CLI::PositiveNumber)->capture_default_str();
  s->add_flag("--fm-no-sleepers", o.fm_no_sleepers, "FM with only the root frog");
  s->add_option("--out", o.out, "output path (default stdout)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"froglab: frog models on d-ary trees", "froglab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", FROGLAB_VERSION);

  auto* params = app.add_subcommand("params", "print the derived constants of (d, p) as JSON");
  add_params(params, o);
  params->add_option("--out", o.out, "output path (default stdout)");

  auto* poly = app.add_subcommand("poly", "print the polynomial P_k or Q_k");
  poly->add_option("--family", o.family, "P|Q")->check(CLI::IsMember({"P", "Q"}))->capture_default_str();
  poly->add_option("--k", o.k, "order")->check(CLI::Range(1, kDefaultMaxPolyOrder))->capture_default_str();
  poly->add_option("--format", o.format, "text|json")->check(CLI::IsMember({"text", "json"}))->capture_default_str();
  poly->add_option("--out", o.out, "output path (default stdout)");

  auto* iterate = app.add_subcommand("iterate", "iterate the operator on a grid and write n,x,value CSV");
  add_params(iterate, o);
  iterate->add_option("--n", o.n, "iterations")->check(CLI::Range(0, 100000))->capture_default_str();
  iterate->add_option("--grid-size", o.grid_size, "grid points")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 22))->capture_default_str();
  iterate->add_option("--h0", o.h0, "one|zero")->check(CLI::IsMember({"one", "zero"}))->capture_default_str();
  iterate->add_option("--out", o.out, "CSV path; a .meta.json header is written next to it")->required();

  auto* check = app.add_subcommand("check", "deterministic operator checks");
  check->add_option("--name", o.name, "vanishing|ad-le-a2")
      ->check(CLI::IsMember({"vanishing", "ad-le-a2"}))->required();
  check->add_option("--d", o.d, "degree for ad-le-a2")->check(CLI::Range(2, kMaxSimDegree))->capture_default_str();
  check->add_option("--n", o.n, "A_2 iterations producing the ad-le-a2 input")
      ->check(CLI::Range(0, 100000))->capture_default_str();
  check->add_option("--n-max", o.n_max, "vanishing: largest n")->check(CLI::Range(1, 100000))->capture_default_str();
  check->add_option("--tol", o.tol, "vanishing: sup threshold")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  check->add_option("--grid-size", o.grid_size, "grid points")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 22))->capture_default_str();
  check->add_option("--octave-points", o.octave_points, "vanishing: bracket nodes per octave")
      ->check(CLI::Range(2, 1 << 16))->capture_default_str();
  check->add_option("--x-grid", o.x_grid, "ad-le-a2: points (default the whole grid)");
  check->add_option("--out", o.out, "output path (default stdout)");

  auto* simulate = app.add_subcommand("simulate", "simulate a frog model and summarize root visits");
  add_sim(simulate, o, true);

  auto* estimate = app.add_subcommand("estimate-pgf", "estimate E[x^V] with confidence intervals");
  add_sim(estimate, o, true);
  estimate->add_option("--format", o.pgf_format, "json|csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

  auto* coupling = app.add_subcommand("coupling", "sample loop-erased biased walk patterns");
  add_params(coupling, o);
  coupling->add_option("--depth", o.coupling_depth, "start depth")->check(CLI::Range(1, 60))->capture_default_str();
  coupling->add_option("--reps", o.reps, "walks")->check(CLI::Range(std::uint64_t{1}, std::uint64_t{1} << 40))
      ->capture_default_str();
  coupling->add_option("--seed", o.seed, "master seed (overrides FROGLAB_SEED)");
  coupling->add_option("--threads", o.threads, "worker threads, 0 = auto")->capture_default_str();
  coupling->add_option("--out", o.out, "CSV path; a .meta.json header is written next to it")->required();

  auto* verify = app.add_subcommand("verify", "run statistical verification suites");
  add_params(verify, o);
  verify->add_option("--suite", o.suite, "suite name or all")
      ->check(CLI::IsMember({"coupling", "binomial", "self-consistency", "rsfm", "domination", "self-similarity",
                             "inequality", "all"}))
      ->capture_default_str();
  verify->add_option("--reps", o.verify_reps, "replicates per run")
      ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{1} << 40))->capture_default_str();
  verify->add_option("--depth", o.verify_depth, "truncation depth")->check(CLI::Range(2, 60))->capture_default_str();
  verify->add_option("--start-depth", o.start_depth, "coupling start depth")->check(CLI::Range(1, 60))
      ->capture_default_str();
  verify->add_option("--j-size", o.j_size, "binomial: size of J")->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  verify->add_option("--seed", o.seed, "master seed (overrides FROGLAB_SEED)");
  verify->add_option("--threads", o.threads, "worker threads, 0 = auto")->capture_default_str();
  verify->add_option("--x-grid", o.x_grid, "comma-separated points in [0,1)")->capture_default_str();
  verify->add_option("--delta", o.delta, "per-suite error probability")->capture_default_str();
  verify->add_option("--out", o.out, "output path (default stdout)");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (params->parsed()) return cmd_params(o, out);
    if (poly->parsed()) return cmd_poly(o, out);
    if (iterate->parsed()) return cmd_iterate(o, out);
    if (check->parsed()) return cmd_check(o, out);
    if (simulate->parsed()) return cmd_simulate(o, out);
    if (estimate->parsed()) return cmd_estimate_pgf(o, out);
    if (coupling->parsed()) return cmd_coupling(o, out);
    if (verify->parsed()) return cmd_verify(o, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidParameter& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailed;
  }
  return kExitUsage;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace froglab::cli
