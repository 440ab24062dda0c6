#include "froglab/frogsim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "froglab/errors.hpp"
#include "froglab/parallel.hpp"

namespace froglab {

std::string to_string(Model m) {
  switch (m) {
    case Model::kFm: return "fm";
    case Model::kNbfm: return "nbfm";
    case Model::kSfm: return "sfm";
    case Model::kRsfm: return "rsfm";
  }
  return "?";
}

Model parse_model(std::string_view name) {
  if (name == "fm") return Model::kFm;
  if (name == "nbfm") return Model::kNbfm;
  if (name == "sfm") return Model::kSfm;
  if (name == "rsfm") return Model::kRsfm;
  throw InvalidParameter("unknown model '" + std::string(name) + "' (expected fm, nbfm, sfm or rsfm)");
}

namespace {

// Number of vertices on levels 0..depth, or 0 on overflow past 2^62.
std::uint64_t tree_size(int d, int depth) {
  std::uint64_t level = 1, total = 1;
  for (int l = 1; l <= depth; ++l) {
    if (level > (std::uint64_t{1} << 62) / static_cast<std::uint64_t>(d)) return 0;
    level *= static_cast<std::uint64_t>(d);
    total += level;
    if (total > (std::uint64_t{1} << 62)) return 0;
  }
  return total;
}

}  // namespace

void SimConfig::validate() const {
  if (params.d < 2 || params.d > kMaxSimDegree)
    throw InvalidParameter("simulation needs 2 <= d <= " + std::to_string(kMaxSimDegree));
  if (!(params.p >= 0.0 && params.p < 0.5) && model != Model::kFm)
    throw InvalidParameter("non-backtracking models need 0 <= p < 1/2");
  if (model == Model::kFm && !(params.p >= 0.0 && params.p < 0.5))
    throw InvalidParameter("fm needs 0 <= p < 1/2 so that escapes below the cut are certain");
  if (depth < 1) throw InvalidParameter("depth must be >= 1");
  if ((model == Model::kSfm || model == Model::kRsfm) && depth < 2)
    throw InvalidParameter("sfm and rsfm need depth >= 2");
  // one extra level: rays look one step past the cut
  if (tree_size(params.d, depth + 1) == 0) throw ResourceLimit("d^depth overflows 64-bit vertex ids");
  if (model == Model::kFm && step_horizon == 0) throw InvalidParameter("step_horizon must be positive");
  if (max_vertices == 0) throw InvalidParameter("max_vertices must be positive");
}

FrogPathSpec sample_frog_path(int d, double p, double alpha, std::uint64_t vertex, int depth, Rng& rng) {
  FrogPathSpec f{vertex, depth, 0, -1};
  if (depth > 0 && rng.bernoulli(p)) {
    f.up_steps = 1;
    while (f.up_steps < depth && rng.bernoulli(alpha)) ++f.up_steps;
  }
  if (f.hits_root()) return f;
  if (f.up_steps == 0) {
    f.turn_child = static_cast<int>(rng.below(static_cast<std::uint32_t>(d)));
  } else {
    std::uint64_t below_turn = vertex;
    for (int s = 1; s < f.up_steps; ++s) below_turn = tree_parent(d, below_turn);
    const int came = tree_child_index(d, below_turn);
    const int r = static_cast<int>(rng.below(static_cast<std::uint32_t>(d - 1)));
    f.turn_child = r < came ? r : r + 1;
  }
  return f;
}

int VisitRecord::activated_count() const { return std::popcount(activated); }
int VisitRecord::stage1_count() const { return std::popcount(stage1); }

std::uint64_t VisitRecord::decomposition_sum() const {
  std::uint64_t s = hub_to_root() ? 1 : 0;
  for (auto v : to_root) s += v;
  return s;
}

std::uint64_t VisitRecord::flow_closure(std::uint64_t seed) const {
  std::uint64_t set = seed;
  for (;;) {
    std::uint64_t next = set;
    for (std::size_t i = 0; i < flow.size(); ++i)
      if (set >> i & 1) next |= flow[i];
    if (next == set) return set;
    set = next;
  }
}

namespace {

constexpr std::uint64_t kRoot = 0;
constexpr std::uint64_t kHub = 1;

// Membership over heap indices: a bitset for small trees, a hash set otherwise.
class VisitedSet {
 public:
  void reset(std::uint64_t universe) {
    dense_ = universe <= kDenseLimit;
    if (!dense_) {
      sparse_.clear();
      return;
    }
    const std::uint64_t words = (universe + 63) / 64;
    if (words_.size() < words) words_.assign(words, 0);
    for (std::uint64_t w : touched_) words_[w] = 0;
    touched_.clear();
  }
  bool contains(std::uint64_t v) const {
    return dense_ ? (words_[v >> 6] >> (v & 63) & 1) != 0 : sparse_.count(v) != 0;
  }
  // Returns false when already present.
  bool insert(std::uint64_t v) {
    if (!dense_) return sparse_.insert(v).second;
    std::uint64_t& w = words_[v >> 6];
    const std::uint64_t bit = std::uint64_t{1} << (v & 63);
    if (w & bit) return false;
    if (w == 0) touched_.push_back(v >> 6);
    w |= bit;
    return true;
  }
 private:
  static constexpr std::uint64_t kDenseLimit = std::uint64_t{1} << 26;
  bool dense_ = true;
  std::vector<std::uint64_t> words_;
  std::vector<std::uint64_t> touched_;
  std::unordered_set<std::uint64_t> sparse_;
};

// Exact floor(n / d) for n < 2^62 by multiply-shift.
class Divider {
 public:
  explicit Divider(int d = 2) {
    shift_ = 0;
    while ((std::uint64_t{1} << shift_) < static_cast<std::uint64_t>(d)) ++shift_;
    magic_ = static_cast<std::uint64_t>(((static_cast<unsigned __int128>(1) << (62 + shift_)) / d) + 1);
  }
  std::uint64_t operator()(std::uint64_t n) const {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(n) * magic_) >> (62 + shift_));
  }

 private:
  std::uint64_t magic_ = 0;
  int shift_ = 0;
};

struct Item {
  std::uint64_t v;
  int depth;
  int sub;  // subtree index, -1 on levels 0 and 1
};

struct FmItem {
  std::uint64_t v;
  int depth;
};

constexpr std::uint64_t kFmDenseLimit = std::uint64_t{1} << 24;

class Engine {
 public:
  VisitRecord run(const SimConfig& cfg, std::uint64_t replicate) {
    cfg_ = &cfg;
    d_ = cfg.params.d;
    div_ = Divider(d_);
    p_ = cfg.params.p;
    alpha_ = cfg.params.alpha();
    depth_ = cfg.depth;
    rep_ = replicate;
    frogs_ = StreamFamily(cfg.seed, replicate, StreamTag::kFrog);
    entries_ = StreamFamily(cfg.seed, replicate, StreamTag::kEntry);
    rec_ = VisitRecord{};
    rec_.to_root.assign(d_, 0);
    rec_.to_hub.assign(d_, 0);
    rec_.flow.assign(d_, 0);
    stack_.clear();
    visited_.reset(tree_size(d_, depth_));
    if (cfg.check_edges) crossed_.clear();
    switch (cfg.model) {
      case Model::kSfm: run_sfm(false); break;
      case Model::kRsfm: run_sfm(true); break;
      case Model::kNbfm: run_nbfm(); break;
      case Model::kFm: run_fm(); break;
    }
    return std::move(rec_);
  }

 private:
  Rng frog_stream(std::uint64_t v) const { return frogs_.at(v); }
  Rng entry_stream(std::uint64_t v) const { return entries_.at(v); }

  std::uint64_t parent(std::uint64_t v) const { return div_(v - 1); }

  static int child_sub(int parent_depth, int parent_sub, int c) { return parent_depth == 1 ? c : parent_sub; }

  bool mark(std::uint64_t v, int depth, int sub) {
    if (!visited_.insert(v)) return false;
    ++rec_.vertices_visited;
    if (depth == 2 && sub >= 0) rec_.activated |= std::uint64_t{1} << sub;
    return true;
  }

  bool over_budget() {
    if (rec_.vertices_visited > cfg_->max_vertices) {
      rec_.aborted = true;
      return true;
    }
    return false;
  }

  // --- self-similar model: one crossing per downward edge ---

  void attempt(std::uint64_t w, int wdepth, int wsub, int c) {
    if (wdepth >= depth_) return;  // the ray leaves the simulated levels
    const std::uint64_t u = tree_child(d_, w, c);
    const int usub = child_sub(wdepth, wsub, c);
    if (!mark(u, wdepth + 1, usub)) {
      ++rec_.frogs_killed;
      return;
    }
    if (cfg_->check_edges && !crossed_.insert(u).second) throw std::logic_error("edge crossed twice");
    stack_.push_back({u, wdepth + 1, usub});
  }

  void enter(const Item& it) {
    // the entering frog keeps going down
    if (it.depth < depth_) {
      Rng er = entry_stream(it.v);
      const int c = static_cast<int>(er.below(static_cast<std::uint32_t>(d_)));
      if (it.v == kHub) rec_.first_child = c;
      attempt(it.v, it.depth, it.sub, c);
    }
    // the sleeper wakes
    Rng fr = frog_stream(it.v);
    const FrogPathSpec f = sample_frog_path(d_, p_, alpha_, it.v, it.depth, fr);
    if (it.sub >= 0) {
      if (f.up_steps >= it.depth - 1) ++rec_.to_hub[it.sub];
      if (f.hits_root()) ++rec_.to_root[it.sub];
      else if (f.up_steps == it.depth - 1) rec_.flow[it.sub] |= std::uint64_t{1} << f.turn_child;
    } else {
      rec_.hub_choice = f.hits_root() ? -1 : f.turn_child;
    }
    if (f.hits_root()) {
      ++rec_.root_visits;
      return;
    }
    std::uint64_t w = it.v;
    for (int s = 0; s < f.up_steps; ++s) w = parent(w);
    const int wdepth = it.depth - f.up_steps;
    attempt(w, wdepth, wdepth >= 2 ? it.sub : -1, f.turn_child);
  }

  void close() {
    while (!stack_.empty()) {
      if (over_budget()) return;
      const Item it = stack_.back();
      stack_.pop_back();
      enter(it);
    }
  }

  void run_sfm(bool restart) {
    mark(kRoot, 0, -1);
    mark(kHub, 1, -1);
    if (cfg_->check_edges) crossed_.insert(kHub);
    stack_.push_back({kHub, 1, -1});
    close();
    rec_.stage1 = rec_.activated;
    if (!restart || rec_.aborted) return;
    for (int i = 0; i < d_; ++i) {
      if (rec_.activated >> i & 1) continue;
      const std::uint64_t u = tree_child(d_, kHub, i);
      mark(u, 2, i);
      if (cfg_->check_edges && !crossed_.insert(u).second) throw std::logic_error("edge crossed twice");
      stack_.push_back({u, 2, i});
      close();
      if (rec_.aborted) return;
    }
  }

  // --- non-backtracking model: rays pass through visited vertices ---

  // Walks a uniform ray from child c of w down to the cut, waking sleepers.
  void ray(std::uint64_t w, int wdepth, int wsub, int c, Rng& rng) {
    while (wdepth < depth_) {
      const std::uint64_t u = tree_child(d_, w, c);
      const int usub = child_sub(wdepth, wsub, c);
      if (mark(u, wdepth + 1, usub)) stack_.push_back({u, wdepth + 1, usub});
      w = u;
      wsub = usub;
      ++wdepth;
      if (wdepth < depth_) c = static_cast<int>(rng.below(static_cast<std::uint32_t>(d_)));
    }
  }

  void run_nbfm() {
    mark(kRoot, 0, -1);
    {
      Rng fr = frog_stream(kRoot);
      mark(kHub, 1, -1);
      stack_.push_back({kHub, 1, -1});
      rec_.first_child = static_cast<int>(fr.below(static_cast<std::uint32_t>(d_)));
      ray(kHub, 1, -1, rec_.first_child, fr);
    }
    while (!stack_.empty()) {
      if (over_budget()) return;
      const Item it = stack_.back();
      stack_.pop_back();
      Rng fr = frog_stream(it.v);
      const FrogPathSpec f = sample_frog_path(d_, p_, alpha_, it.v, it.depth, fr);
      if (it.sub >= 0) {
        if (f.up_steps >= it.depth - 1) ++rec_.to_hub[it.sub];
        if (f.hits_root()) ++rec_.to_root[it.sub];
        else if (f.up_steps == it.depth - 1) rec_.flow[it.sub] |= std::uint64_t{1} << f.turn_child;
      } else {
        rec_.hub_choice = f.hits_root() ? -1 : f.turn_child;
      }
      if (f.hits_root()) {
        ++rec_.root_visits;
        continue;
      }
      std::uint64_t w = it.v;
      for (int s = 0; s < f.up_steps; ++s) w = parent(w);
      const int wdepth = it.depth - f.up_steps;
      ray(w, wdepth, wdepth >= 2 ? it.sub : -1, f.turn_child, fr);
    }
  }

  // --- original model: backtracking walks, reflecting root ---

  void run_fm() {
    const std::uint64_t universe = tree_size(d_, depth_);
    if (universe <= kFmDenseLimit) {
      fm_bits_.assign((universe + 63) / 64, 0);
      std::uint64_t* bits = fm_bits_.data();
      // ids are below 2^24 here, so one high multiply gives floor(n / d)
      const std::uint64_t magic = ~std::uint64_t{0} / static_cast<std::uint64_t>(d_) + 1;
      walk_fm(
          [bits](std::uint64_t v) {
            const std::uint64_t bit = std::uint64_t{1} << (v & 63), word = bits[v >> 6];
            bits[v >> 6] = word | bit;
            return (word & bit) == 0;
          },
          [magic](std::uint64_t n) {
            return static_cast<std::uint64_t>((static_cast<unsigned __int128>(n) * magic) >> 64);
          });
    } else {
      walk_fm([this](std::uint64_t v) { return visited_.insert(v); }, div_);
    }
  }

  // A frog's walk depends only on its own stream, so the woken frogs can be
  // processed in any order; pushes are unconditional writes so waking stays branch-free.
  template <class TryMark, class Div>
  void walk_fm(TryMark try_mark, Div div) {
    // A step is decided by one 64-bit draw x: up when x < thr, otherwise child
    // floor((x - thr) * d / (2^64 - thr)), with the scale held to 56 fractional bits.
    auto threshold = [](double prob) {
      return prob <= 0.0 ? std::uint64_t{0} : static_cast<std::uint64_t>(std::ldexp(prob, 64));
    };
    auto multiplier = [&](std::uint64_t thr) {
      const long double rest = 1.0L - std::ldexp(static_cast<long double>(thr), -64);
      return static_cast<std::uint64_t>(std::ldexp(static_cast<long double>(d_) / rest, 56));
    };
    const std::uint64_t up_thr = threshold(p_), up_mult = multiplier(up_thr), root_mult = multiplier(0);
    // Below the cut there is nobody to wake, so excursions that come back are
    // invisible; the next visible move is up with probability
    // p / (p + (1-p)(1-rho)) = rho, and otherwise the frog never returns.
    const std::uint64_t cut_thr = threshold(cfg_->params.rho());
    // per-depth step rule: the root reflects, the cut settles
    std::vector<std::uint64_t> thr_at(depth_ + 1, up_thr), mult_at(depth_ + 1, up_mult);
    thr_at[0] = 0;
    mult_at[0] = root_mult;
    thr_at[depth_] = cut_thr;

    const int d = d_, cut = depth_;
    const std::uint64_t horizon = cfg_->step_horizon, max_vertices = cfg_->max_vertices;
    const bool wake = !cfg_->fm_no_sleepers;
    std::size_t capacity = 1024;
    std::vector<FmItem>& stack = fm_stack_;
    stack.resize(capacity);
    try_mark(kRoot);
    stack[0] = {kRoot, 0};
    std::size_t top = 1, woken = 1;
    std::uint64_t root_visits = 0, exhausted = 0;

    // Two walkers advance in turn so that their dependency chains overlap.
    struct Lane {
      std::uint64_t v = 0;
      int depth = 0;
      bool busy = false;
      std::uint64_t steps = 0;
      Rng fr{0};
    };
    Lane lanes[2];
    const auto load = [&](Lane& l) {
      if (top == 0 || woken > max_vertices) return;
      --top;
      l.v = stack[top].v;
      l.depth = stack[top].depth;
      l.fr = frog_stream(l.v);
      l.steps = 0;
      l.busy = true;
    };
    // Advances a lane by one step; false when its frog is done.
    const auto step = [&](Lane& l) {
      if (l.steps++ == horizon) {
        ++exhausted;
        return false;
      }
      const std::uint64_t x = l.fr();
      const std::uint64_t thr = thr_at[l.depth];
      const bool go_up = x < thr;
      const unsigned stop = static_cast<unsigned>(l.depth == cut) & static_cast<unsigned>(!go_up);
      if (stop != 0) return false;
      const auto scaled = static_cast<unsigned __int128>(x - thr) * mult_at[l.depth];
      const std::uint64_t child = tree_child(d, l.v, std::min(static_cast<int>(scaled >> 120), d - 1));
      // unused at the root, where the subtraction wraps harmlessly
      const std::uint64_t par = div(l.v - 1);
      // masks rather than conditionals, which the compiler turns into unpredictable branches
      const std::uint64_t up = -static_cast<std::uint64_t>(go_up);
      l.v = (par & up) | (child & ~up);
      l.depth += 1 - 2 * static_cast<int>(go_up);
      root_visits += (l.depth == 0);
      if (wake) {
        stack[top] = {l.v, l.depth};
        const bool fresh = try_mark(l.v);
        top += fresh;
        woken += fresh;
        if (top == capacity) {
          capacity *= 2;
          stack.resize(capacity);
        }
      }
      return true;
    };
    load(lanes[0]);
    for (;;) {
      for (Lane& l : lanes)
        if (!l.busy) load(l);
      if (!lanes[0].busy && !lanes[1].busy) break;
      if (lanes[0].busy && lanes[1].busy) {
        for (;;) {
          const bool a = step(lanes[0]);
          const bool b = step(lanes[1]);
          if (!(a && b)) {
            lanes[0].busy = a;
            lanes[1].busy = b;
            break;
          }
        }
      } else {
        Lane& l = lanes[0].busy ? lanes[0] : lanes[1];
        l.busy = step(l);
      }
    }
    if (woken > max_vertices) rec_.aborted = true;
    rec_.vertices_visited += woken;
    rec_.root_visits += root_visits;
    rec_.horizon_exhausted += exhausted;
  }

  const SimConfig* cfg_ = nullptr;
  int d_ = 2;
  Divider div_;
  double p_ = 0.0;
  double alpha_ = 0.0;
  int depth_ = 1;
  std::uint64_t rep_ = 0;
  StreamFamily frogs_{0, 0, StreamTag::kFrog};
  StreamFamily entries_{0, 0, StreamTag::kEntry};
  VisitRecord rec_;
  std::vector<Item> stack_;
  std::vector<FmItem> fm_stack_;
  std::vector<std::uint64_t> fm_bits_;
  VisitedSet visited_;
  std::unordered_set<std::uint64_t> crossed_;
};

Engine& thread_engine() {
  thread_local Engine engine;
  return engine;
}

VisitRecord simulate_checked(const SimConfig& cfg, std::uint64_t replicate, Model expected) {
  if (cfg.model != expected) throw InvalidParameter("config model is " + to_string(cfg.model) + ", expected " + to_string(expected));
  return simulate(cfg, replicate);
}

}  // namespace

VisitRecord simulate(const SimConfig& cfg, std::uint64_t replicate) {
  cfg.validate();
  return thread_engine().run(cfg, replicate);
}

VisitRecord simulate_sfm(const SimConfig& cfg, std::uint64_t r) { return simulate_checked(cfg, r, Model::kSfm); }
VisitRecord simulate_nbfm(const SimConfig& cfg, std::uint64_t r) { return simulate_checked(cfg, r, Model::kNbfm); }
VisitRecord simulate_fm(const SimConfig& cfg, std::uint64_t r) { return simulate_checked(cfg, r, Model::kFm); }
VisitRecord simulate_rsfm(const SimConfig& cfg, std::uint64_t r) { return simulate_checked(cfg, r, Model::kRsfm); }

std::vector<VisitRecord> run_replicates(const SimConfig& cfg) {
  cfg.validate();
  std::vector<VisitRecord> out(cfg.reps);
  parallel_for(cfg.reps, resolve_threads(cfg.threads, cfg.reps),
               [&](unsigned, std::uint64_t r) { out[r] = thread_engine().run(cfg, r); });
  return out;
}

EmpiricalPgf root_visit_law(std::span<const VisitRecord> records) {
  EmpiricalPgf law;
  for (const auto& r : records) law.add(r.root_visits);
  return law;
}

std::vector<EstimateWithCI> estimate_pgf(const SimConfig& cfg, std::span<const double> xs, double delta) {
  for (double x : xs)
    if (!(x >= 0.0 && x < 1.0)) throw DomainError("pgf points must lie in [0,1)");
  const auto records = run_replicates(cfg);
  const EmpiricalPgf law = root_visit_law(records);
  std::vector<EstimateWithCI> out;
  for (double x : xs) out.push_back({law(x), hoeffding_halfwidth(law.n(), delta), law.n(), delta});
  return out;
}

}  // namespace froglab
