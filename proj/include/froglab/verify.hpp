#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "froglab/report.hpp"

namespace froglab {

/// Shared knobs for the statistical suites. Each suite reads the fields it needs.
struct VerifyConfig {
  int d = 3;
  double p = 1.0 / 3.0;
  std::uint64_t reps = 100000;
  /// Truncation depth of the frog simulations.
  int depth = 10;
  /// Start depth of the loop-erased walks.
  int start_depth = 4;
  /// |J| for the avoidance identity.
  int j_size = 0;
  std::vector<double> xs{0.0, 0.25, 0.5, 0.75};
  std::uint64_t seed = 0;
  unsigned threads = 0;
  /// Family-wise error budget of a suite, split by Bonferroni across its cells.
  double delta = 1e-3;
};

/// Loop-erased p-biased walks from depth start_depth against the
/// non-backtracking law at p*: every cell |z| <= 4 and TV < 0.01. The same
/// samples are also compared with the law at p* + 0.1, which must fail.
CheckReport verify_lemma_coupling(const VerifyConfig& cfg);

/// E(x^{V_{j->root}} 1{no frog of subtree j tries the subtrees in J} | j entered)
/// against g_{D-1}(c^{(d-1-|J|)}(x)), with g_{D-1} from an independent run one
/// level shallower (an entered subtree is an exact copy of the model one level
/// shallower).
CheckReport verify_lemma_binomial(const VerifyConfig& cfg);

/// g_D(x) against (A_{d,p} g_{D-1})(x); g_{D-1} is read from the root frog's
/// subtree in the same replicates. Margin: uniform DKW bands pushed through the
/// operator's polynomial perturbation bound.
CheckReport verify_self_consistency(const VerifyConfig& cfg);

/// Restarted-model identity for the top polynomial, plus each conditional
/// generating function against P_l at the simulated z-vector.
CheckReport verify_rsfm_identity(const VerifyConfig& cfg);

/// Mean root visits: SFM(d, p*) <= nbFM(d, p*) <= FM(d, p) one-sided at 3 sigma,
/// empirical CDFs ordered up to DKW slack; the reversed claim FM <= SFM must fail.
CheckReport verify_domination(const VerifyConfig& cfg);

/// Root-level law at depth D-1 against the law of visits to the hub from the
/// root frog's subtree at depth D (two-sample chi-square, every bin within 4 sigma).
CheckReport verify_self_similarity(const VerifyConfig& cfg);

/// A_d g <= A_2 g at p = (d-1)/(2d-1) with g simulated at that drift, on xs,
/// including the intermediate P/Q-sum inequalities.
CheckReport verify_inequality(const VerifyConfig& cfg);

inline const std::vector<std::string> kSuiteNames{"coupling",    "binomial",        "self-consistency", "rsfm",
                                                  "domination",  "self-similarity", "inequality"};

/// Runs one suite by name, or all of them for "all".
std::vector<CheckReport> run_suite(std::string_view name, const VerifyConfig& cfg);

}  // namespace froglab
