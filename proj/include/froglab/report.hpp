#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace froglab {

/// Outcome of one verification check. `pass` is decided from `statistics` and
/// `tolerance` only; `details` carries per-point diagnostics for humans.
struct CheckReport {
  std::string name;
  bool pass = false;
  std::map<std::string, double> statistics;
  double tolerance = 0.0;
  std::vector<std::uint64_t> seeds;
  nlohmann::json details = nlohmann::json::object();
  /// Wall time; kept out of to_json() so report bodies stay byte-comparable.
  double runtime_seconds = 0.0;

  double max_violation() const;
  nlohmann::json to_json() const;
};

}  // namespace froglab
