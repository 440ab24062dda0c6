#include "froglab/report.hpp"

namespace froglab {

double CheckReport::max_violation() const {
  auto it = statistics.find("max_violation");
  return it == statistics.end() ? 0.0 : it->second;
}

nlohmann::json CheckReport::to_json() const {
  nlohmann::json stats = nlohmann::json::object();
  for (const auto& [k, v] : statistics) stats[k] = v;
  return {{"name", name},           {"pass", pass},   {"max_violation", max_violation()},
          {"tolerance", tolerance}, {"seeds", seeds}, {"statistics", stats},
          {"details", details}};
}

}  // namespace froglab
