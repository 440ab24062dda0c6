#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "froglab/params.hpp"
#include "froglab/report.hpp"
#include "froglab/rng.hpp"

namespace froglab {

/// Vertex of the homogeneous tree in which the rooted d-ary tree sits: every
/// vertex has d children and one parent, the root included. A vertex is "go up
/// `height` levels from the root, then follow `path` down". The root is child 0
/// of its parent, so canonical form never has height > 0 with path[0] == 0.
struct TreeVertex {
  int height = 0;
  std::vector<std::uint8_t> path;

  static TreeVertex root() { return {}; }
  /// Vertex of the rooted tree reached from the root by `path`.
  static TreeVertex from_path(std::vector<std::uint8_t> path);

  /// Depth below the root; negative above it.
  int level() const { return static_cast<int>(path.size()) - height; }
  bool is_root() const { return height == 0 && path.empty(); }
  bool in_rooted_tree() const { return height == 0; }
  /// Index of this vertex among its parent's children.
  int child_index() const { return path.empty() ? 0 : path.back(); }

  TreeVertex parent() const;
  TreeVertex child(int c) const;
  void move_up();
  void move_down(int c);

  std::string str() const;
  friend bool operator==(const TreeVertex&, const TreeVertex&) = default;
};

/// Graph distance between two vertices.
int tree_distance(const TreeVertex& a, const TreeVertex& b);

/// Moves are kUp or a child index 0..d-1.
inline constexpr std::int8_t kUp = -1;

enum class Terminal { kEscaped, kHitRoot, kTruncated };
std::string to_string(Terminal t);

/// A walk given by its start vertex and the sequence of moves from it.
struct WalkPath {
  int d = 2;
  TreeVertex start;
  std::vector<std::int8_t> moves;
  Terminal terminal = Terminal::kEscaped;

  std::vector<TreeVertex> vertices() const;
  TreeVertex end() const;
  std::size_t steps() const { return moves.size(); }
};

/// Default escape margin: smallest m >= 1 with rho^m < 1e-9.
int default_escape_margin(double p);

inline constexpr std::uint64_t kDefaultStepBudget = 10'000'000;

/// p-biased walk on the homogeneous tree (up w.p. p, otherwise a uniform child),
/// no reflection or absorption. It stops as escaped once the loop erasure of the
/// path so far has `escape_margin` downward steps after its highest vertex:
/// the erased prefix can only change again if the walk climbs back that far,
/// which happens with probability rho^margin. Stops as truncated after
/// `step_budget` steps.
WalkPath sample_biased_walk(const ModelParams& params, const TreeVertex& start, int escape_margin, Rng& rng,
                            std::uint64_t step_budget = kDefaultStepBudget);

/// Chronological loop erasure, cut after the first visit to the root.
/// The result is self-avoiding; terminal becomes kHitRoot if it was cut.
WalkPath loop_erase(const WalkPath& path);

struct PatternOutcome {
  bool hit_root = false;
  /// Number of initial upward steps; equals the start depth on hit_root.
  int k1 = 0;
  friend bool operator==(const PatternOutcome&, const PatternOutcome&) = default;
};

/// Reads k1 off a loop-erased path. Throws InvalidParameter on paths that still
/// contain a backtrack, climb past the root, or do not start at `start_depth`.
PatternOutcome pattern_of(const WalkPath& loop_erased, int start_depth);

struct PatternSample {
  PatternOutcome outcome;
  std::uint64_t steps = 0;
  bool truncated = false;
};

/// sample_biased_walk + loop_erase + pattern_of in one pass without storing the
/// path. Uses the random stream exactly as sample_biased_walk does, so both give
/// the same outcome from the same Rng state.
PatternSample sample_pattern(const ModelParams& params, const TreeVertex& start, int escape_margin, Rng& rng,
                             std::uint64_t step_budget = kDefaultStepBudget);

/// Law of k1 for a non-backtracking walk with drift pstar started at depth |v|.
struct PatternLaw {
  int d = 2;
  double pstar = 0.0;
  int start_depth = 1;
  /// pmf[k] = P(k1 = k) for k < start_depth; pmf[start_depth] = P(hit root).
  std::vector<double> pmf;

  double total() const;
  double at(const PatternOutcome& o) const;
};

PatternLaw nbfm_pattern_pmf(int d, double pstar, int start_depth);

/// Compares the three rho-series from the loop-erasure argument with the
/// non-backtracking closed forms at p* = pstar(d, p), for k1 = 1..k1_max and
/// start depths 1..k1_max. Series are summed until a geometric tail bound drops
/// below tail_tol.
CheckReport verify_series_identities(int d, double p, int k1_max = 6, double tail_tol = 1e-12,
                                     double tolerance = 1e-10);

}  // namespace froglab
