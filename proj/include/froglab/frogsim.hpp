#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "froglab/params.hpp"
#include "froglab/rng.hpp"
#include "froglab/stats.hpp"

namespace froglab {

enum class Model { kFm, kNbfm, kSfm, kRsfm };

std::string to_string(Model m);
Model parse_model(std::string_view name);

/// Largest branching degree the simulators accept (subtree sets are bitmasks).
inline constexpr int kMaxSimDegree = 64;

struct SimConfig {
  ModelParams params;
  Model model = Model::kSfm;
  /// Sleeping frogs live on levels 1..depth; rays stop below it.
  int depth = 8;
  /// Per-frog step cap, fm only. Steps below `depth` are collapsed and not counted.
  std::uint64_t step_horizon = 1'000'000;
  std::uint64_t reps = 1000;
  std::uint64_t seed = 0;
  /// 0 = hardware concurrency.
  unsigned threads = 0;
  /// Replicates that wake more frogs than this are aborted and flagged.
  std::uint64_t max_vertices = 50'000'000;
  /// fm diagnostic: the root frog walks alone.
  bool fm_no_sleepers = false;
  /// Track crossed edges and throw std::logic_error if one is crossed twice (sfm, rsfm).
  bool check_edges = false;

  void validate() const;
};

/// Whole trajectory of a woken non-backtracking frog: K up-steps, then (unless
/// it reached the root) a turn into `turn_child` of the vertex K levels up,
/// followed by a uniform downward ray.
struct FrogPathSpec {
  std::uint64_t wake_vertex = 0;
  int wake_depth = 0;
  int up_steps = 0;
  /// Child index taken at the turning vertex; -1 for root hitters.
  int turn_child = -1;

  bool hits_root() const { return up_steps >= wake_depth; }
};

/// Samples K (P(K=0) = 1-p, then up-continuation with probability alpha,
/// absorbed at the root) and the turning child, which avoids the child the
/// frog came up from when K >= 1. Vertices are heap indices in the d-ary tree.
FrogPathSpec sample_frog_path(int d, double p, double alpha, std::uint64_t vertex, int depth, Rng& rng);

/// Heap-index helpers: root 0, children d*v+1+c.
inline std::uint64_t tree_child(int d, std::uint64_t v, int c) { return static_cast<std::uint64_t>(d) * v + 1 + c; }
inline std::uint64_t tree_parent(int d, std::uint64_t v) { return (v - 1) / static_cast<std::uint64_t>(d); }
inline int tree_child_index(int d, std::uint64_t v) { return static_cast<int>((v - 1) % static_cast<std::uint64_t>(d)); }

/// Per-replicate event bookkeeping. The hub is the root's only visited child;
/// subtree i is the one rooted at the hub's child i.
struct VisitRecord {
  std::uint64_t root_visits = 0;
  /// Frogs started in subtree i that reached the root.
  std::vector<std::uint32_t> to_root;
  /// Frogs started in subtree i that reached the hub.
  std::vector<std::uint32_t> to_hub;
  /// Bit i: subtree i was entered.
  std::uint64_t activated = 0;
  /// Bit j of flow[i]: a frog from subtree i tried to step from the hub into child j.
  std::vector<std::uint64_t> flow;
  /// Child of the hub chosen by the root frog.
  int first_child = -1;
  /// The hub's own frog: -1 if it stepped to the root, else the child it tried.
  int hub_choice = -2;

  /// rsfm: bit i set when subtree i was entered before the forced injections.
  std::uint64_t stage1 = 0;

  std::uint64_t vertices_visited = 0;
  std::uint64_t frogs_killed = 0;
  std::uint64_t horizon_exhausted = 0;
  bool aborted = false;

  bool hub_to_root() const { return hub_choice == -1; }
  /// Hub frog stepped to the root or tried the root frog's child.
  bool d1() const { return hub_choice == -1 || hub_choice == first_child; }
  int activated_count() const;
  int stage1_count() const;
  /// No frog from subtree j tried to enter any subtree in mask J.
  bool b_event(int j, std::uint64_t J) const { return (flow.at(j) & J) == 0; }
  /// 1{hub frog to root} + sum_i to_root[i].
  std::uint64_t decomposition_sum() const;
  /// Closure of `seed` under the flow sets.
  std::uint64_t flow_closure(std::uint64_t seed) const;
};

/// Replicate `replicate` of the configured model. Every vertex owns its random
/// streams (seed, replicate, vertex), so the result does not depend on the order
/// in which frogs are processed and depth-coupled runs share randomness.
VisitRecord simulate(const SimConfig& cfg, std::uint64_t replicate);

/// Thin wrappers that check cfg.model.
VisitRecord simulate_sfm(const SimConfig& cfg, std::uint64_t replicate);
VisitRecord simulate_nbfm(const SimConfig& cfg, std::uint64_t replicate);
VisitRecord simulate_fm(const SimConfig& cfg, std::uint64_t replicate);
VisitRecord simulate_rsfm(const SimConfig& cfg, std::uint64_t replicate);

/// Replicates 0..reps-1 in order, computed on cfg.threads workers.
std::vector<VisitRecord> run_replicates(const SimConfig& cfg);

/// Root-visit distribution of a batch.
EmpiricalPgf root_visit_law(std::span<const VisitRecord> records);

/// Mean of x^{root visits} per x with Hoeffding half-widths. Truncation only
/// removes visits, so each value overestimates the untruncated one.
std::vector<EstimateWithCI> estimate_pgf(const SimConfig& cfg, std::span<const double> xs, double delta = 1e-3);

}  // namespace froglab
