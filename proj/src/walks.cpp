#include "froglab/walks.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace froglab {

TreeVertex TreeVertex::from_path(std::vector<std::uint8_t> path) { return TreeVertex{0, std::move(path)}; }

void TreeVertex::move_up() {
  if (path.empty()) {
    ++height;
  } else {
    path.pop_back();
  }
}

void TreeVertex::move_down(int c) {
  if (path.empty() && height > 0 && c == 0) {
    --height;
  } else {
    path.push_back(static_cast<std::uint8_t>(c));
  }
}

TreeVertex TreeVertex::parent() const {
  TreeVertex v = *this;
  v.move_up();
  return v;
}

TreeVertex TreeVertex::child(int c) const {
  TreeVertex v = *this;
  v.move_down(c);
  return v;
}

std::string TreeVertex::str() const {
  std::ostringstream os;
  os << "^" << height << ":";
  for (auto c : path) os << static_cast<int>(c);
  return os.str();
}

int tree_distance(const TreeVertex& a, const TreeVertex& b) {
  // both hang below the ancestor at height max(ha, hb); lift the lower anchor
  const int h = std::max(a.height, b.height);
  auto lifted = [h](const TreeVertex& v) {
    std::vector<std::uint8_t> p(static_cast<std::size_t>(h - v.height), 0);
    p.insert(p.end(), v.path.begin(), v.path.end());
    return p;
  };
  const auto pa = lifted(a), pb = lifted(b);
  std::size_t common = 0;
  while (common < pa.size() && common < pb.size() && pa[common] == pb[common]) ++common;
  return static_cast<int>(pa.size() + pb.size() - 2 * common);
}

std::string to_string(Terminal t) {
  switch (t) {
    case Terminal::kEscaped: return "escaped";
    case Terminal::kHitRoot: return "hit-root";
    case Terminal::kTruncated: return "truncated";
  }
  return "?";
}

std::vector<TreeVertex> WalkPath::vertices() const {
  std::vector<TreeVertex> out;
  out.reserve(moves.size() + 1);
  TreeVertex v = start;
  out.push_back(v);
  for (auto m : moves) {
    if (m == kUp) v.move_up();
    else v.move_down(m);
    out.push_back(v);
  }
  return out;
}

TreeVertex WalkPath::end() const {
  TreeVertex v = start;
  for (auto m : moves) {
    if (m == kUp) v.move_up();
    else v.move_down(m);
  }
  return v;
}

int default_escape_margin(double p) {
  const double r = rho(p);
  if (r <= 0.0) return 1;
  return std::max(1, static_cast<int>(std::ceil(9.0 / std::log10(1.0 / r))));
}

namespace {

void require_walk_params(const ModelParams& params, int escape_margin) {
  if (params.d < 2) throw InvalidParameter("d must be >= 2");
  if (!(params.p >= 0.0 && params.p < 0.5)) throw InvalidParameter("biased walk requires 0 <= p < 1/2");
  if (escape_margin < 1) throw InvalidParameter("escape_margin must be >= 1");
}

// Loop-erased move stack of a walk on a tree. A new step either undoes the top
// move (returning to the previous vertex) or extends the geodesic.
class ErasureStack {
 public:
  // came_from is the child index of the vertex left by an upward move
  void push(std::int8_t move, int came_from) {
    if (!moves_.empty()) {
      const auto top = moves_.back();
      const bool undo = (move == kUp && top != kUp) || (move != kUp && top == kUp && move == came_.back());
      if (undo) {
        if (top != kUp) --downs_;
        moves_.pop_back();
        came_.pop_back();
        return;
      }
    }
    if (move != kUp) ++downs_;
    moves_.push_back(move);
    came_.push_back(static_cast<std::int8_t>(came_from));
  }

  // Downward steps after the highest vertex (all downs come after all ups).
  int downs() const { return downs_; }
  const std::vector<std::int8_t>& moves() const { return moves_; }

 private:
  std::vector<std::int8_t> moves_;
  std::vector<std::int8_t> came_;
  int downs_ = 0;
};

template <class OnStep>
Terminal run_walk(const ModelParams& params, const TreeVertex& start, int margin, Rng& rng,
                  std::uint64_t budget, ErasureStack& erased, OnStep&& on_step) {
  TreeVertex v = start;
  const auto d = static_cast<std::uint32_t>(params.d);
  for (std::uint64_t step = 0; step < budget; ++step) {
    std::int8_t move;
    int came_from = 0;
    if (rng.bernoulli(params.p)) {
      move = kUp;
      came_from = v.child_index();
      v.move_up();
    } else {
      move = static_cast<std::int8_t>(rng.below(d));
      v.move_down(move);
    }
    erased.push(move, came_from);
    on_step(move);
    if (erased.downs() >= margin) return Terminal::kEscaped;
  }
  return Terminal::kTruncated;
}

}  // namespace

WalkPath sample_biased_walk(const ModelParams& params, const TreeVertex& start, int escape_margin, Rng& rng,
                            std::uint64_t step_budget) {
  require_walk_params(params, escape_margin);
  WalkPath out;
  out.d = params.d;
  out.start = start;
  ErasureStack erased;
  out.terminal = run_walk(params, start, escape_margin, rng, step_budget, erased,
                          [&](std::int8_t m) { out.moves.push_back(m); });
  return out;
}

WalkPath loop_erase(const WalkPath& path) {
  if (path.terminal == Terminal::kTruncated) throw InvalidParameter("cannot loop-erase a truncated walk");
  ErasureStack erased;
  TreeVertex v = path.start;
  for (auto m : path.moves) {
    int came_from = 0;
    if (m == kUp) {
      came_from = v.child_index();
      v.move_up();
    } else {
      v.move_down(m);
    }
    erased.push(m, came_from);
  }
  WalkPath out;
  out.d = path.d;
  out.start = path.start;
  out.terminal = path.terminal;
  // cut at the first root visit; on a geodesic that is the end of the up-run
  TreeVertex w = path.start;
  if (w.is_root()) {
    out.terminal = Terminal::kHitRoot;
    return out;
  }
  for (auto m : erased.moves()) {
    out.moves.push_back(m);
    if (m == kUp) w.move_up();
    else w.move_down(m);
    if (w.is_root()) {
      out.terminal = Terminal::kHitRoot;
      break;
    }
  }
  return out;
}

PatternOutcome pattern_of(const WalkPath& path, int start_depth) {
  if (start_depth < 1) throw InvalidParameter("start_depth must be >= 1");
  if (path.start.level() != start_depth) throw InvalidParameter("path does not start at the given depth");
  int ups = 0;
  bool descending = false;
  for (std::size_t i = 0; i < path.moves.size(); ++i) {
    const auto m = path.moves[i];
    if (m == kUp) {
      if (descending) throw InvalidParameter("malformed path: upward step after a downward one");
      ++ups;
    } else {
      descending = true;
    }
  }
  if (ups > start_depth) throw InvalidParameter("malformed path: climbs past the root");
  if (ups == start_depth) {
    if (descending) throw InvalidParameter("malformed path: continues past the root");
    return {true, start_depth};
  }
  if (path.terminal == Terminal::kHitRoot) throw InvalidParameter("malformed path: marked hit-root but stops short");
  if (!descending && path.terminal == Terminal::kEscaped)
    throw InvalidParameter("malformed path: escaped path never descends");
  return {false, ups};
}

PatternSample sample_pattern(const ModelParams& params, const TreeVertex& start, int escape_margin, Rng& rng,
                             std::uint64_t step_budget) {
  require_walk_params(params, escape_margin);
  ErasureStack erased;
  PatternSample out;
  const Terminal t = run_walk(params, start, escape_margin, rng, step_budget, erased,
                              [&](std::int8_t) { ++out.steps; });
  if (t == Terminal::kTruncated) {
    out.truncated = true;
    return out;
  }
  const int depth = start.level();
  int ups = 0;
  for (auto m : erased.moves()) {
    if (m != kUp) break;
    ++ups;
  }
  out.outcome = ups >= depth ? PatternOutcome{true, depth} : PatternOutcome{false, ups};
  return out;
}

double PatternLaw::total() const {
  double s = 0.0;
  for (double v : pmf) s += v;
  return s;
}

double PatternLaw::at(const PatternOutcome& o) const {
  if (o.hit_root) return pmf.back();
  if (o.k1 < 0 || o.k1 >= start_depth) return 0.0;
  return pmf[static_cast<std::size_t>(o.k1)];
}

PatternLaw nbfm_pattern_pmf(int d, double ps, int start_depth) {
  if (d < 2) throw InvalidParameter("d must be >= 2");
  if (!(ps >= 0.0 && ps <= 1.0)) throw InvalidParameter("pstar must lie in [0,1]");
  if (start_depth < 1) throw InvalidParameter("start_depth must be >= 1");
  const double a = alpha(d, ps);
  PatternLaw law{d, ps, start_depth, std::vector<double>(static_cast<std::size_t>(start_depth) + 1, 0.0)};
  law.pmf[0] = 1.0 - ps;
  for (int k = 1; k < start_depth; ++k) law.pmf[k] = ps * std::pow(a, k - 1) * (1.0 - a);
  law.pmf[start_depth] = ps * std::pow(a, start_depth - 1);
  return law;
}

namespace {

// Sums term(l) for l = 0,1,... until tail_bound(l) (bound on the sum of all
// terms after l) drops below tol.
template <class Term, class Tail>
double sum_series(Term term, Tail tail_bound, double tol) {
  double s = 0.0;
  for (int l = 0; l < 100000; ++l) {
    s += term(l);
    if (tail_bound(l) < tol) return s;
  }
  throw ResourceLimit("series did not reach its tail tolerance");
}

}  // namespace

CheckReport verify_series_identities(int d, double p, int k1_max, double tail_tol, double tolerance) {
  if (d < 2) throw InvalidParameter("d must be >= 2");
  if (!(p >= 0.0 && p < 0.5)) throw InvalidParameter("series identities require 0 <= p < 1/2");
  if (k1_max < 1) throw InvalidParameter("k1_max must be >= 1");
  const double r = rho(p);
  const double ps = pstar(d, p);
  const double a = alpha(d, ps);
  const double dd = d;

  CheckReport rep;
  rep.name = "series-identities";
  rep.tolerance = tolerance;
  nlohmann::json rows = nlohmann::json::array();
  double worst = 0.0;
  auto record = [&](const std::string& c, int k, double series, double closed) {
    const double diff = std::abs(series - closed);
    worst = std::max(worst, diff);
    rows.push_back({{"case", c}, {"k", k}, {"series", series}, {"closed_form", closed}, {"discrepancy", diff}});
  };

  // (a) sum rho^l (1-rho) d^-l = 1 - p*
  record("a", 0,
         sum_series([&](int l) { return std::pow(r, l) * (1 - r) * std::pow(1 / dd, l); },
                    [&](int l) { return std::pow(r / dd, l + 1) / (1 - r / dd); }, tail_tol),
         1 - ps);
  for (int k = 1; k <= k1_max; ++k) {
    // (b) sum rho^{k+l} (1-rho) d^-l (d-1)/d = p* alpha^{k-1} (1-alpha)
    record("b", k,
           sum_series([&](int l) { return std::pow(r, k + l) * (1 - r) * std::pow(1 / dd, l) * (dd - 1) / dd; },
                      [&](int l) { return std::pow(r, k) * std::pow(r / dd, l + 1) / (1 - r / dd); }, tail_tol),
           ps * std::pow(a, k - 1) * (1 - a));
    // (c) sum rho^{|v|+l} (1-rho) sum_{m<=l} d^-m (d-1)/d = p* alpha^{|v|-1}
    record("c", k,
           sum_series(
               [&](int l) {
                 double inner = 0.0;
                 for (int m = 0; m <= l; ++m) inner += std::pow(1 / dd, m) * (dd - 1) / dd;
                 return std::pow(r, k + l) * (1 - r) * inner;
               },
               [&](int l) { return std::pow(r, k + l + 1); }, tail_tol),
           ps * std::pow(a, k - 1));
  }
  rep.statistics["max_violation"] = worst;
  rep.statistics["d"] = d;
  rep.statistics["p"] = p;
  rep.pass = worst <= tolerance;
  rep.details["rows"] = std::move(rows);
  return rep;
}

}  // namespace froglab
