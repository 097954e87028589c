#pragma once

// JSON scenario files.
//
//   {
//     "meta":     {"name": str, "description": str, "seed": uint},
//     "horizon":  T,
//     "demand":   [T numbers],
//     "storages": [{"id": str,
//                   "bid":  {"E": [...], "cC": [...], "cD": [...], "etaC": x, "etaD": x},
//                   "spec": {"gCmax", "gDmax", "rCup", "rCdown", "rDup", "rDdown",
//                            "eMin", "eMax", "s", "g0C", "g0D"},
//                   "gamma": k}],            // optional, 1-based
//     "options":  {"window": W, "gamma": k, "gamma_final_window_only": bool,
//                  "tol": {"feas": x, "comp": x, "gap": x}}   // all optional
//   }

#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"
#include "socdispatch/dispatch.hpp"

namespace socdispatch::io {

struct ScenarioDocument {
  Scenario scenario;
  std::optional<std::uint64_t> seed;
};

/// Throws ValidationError naming the line/column of a syntax error or the
/// path of the offending field (e.g. "storages[0].spec.gCmax"). With
/// `check` the scenario must also pass Scenario::validate().
ScenarioDocument parse_scenario(const std::string& text, const std::string& source = "<input>",
                                bool check = true);
ScenarioDocument load_scenario(const std::string& path, bool check = true);

nlohmann::json to_json(const ScenarioDocument& doc);
std::string dump_scenario(const ScenarioDocument& doc);

}  // namespace socdispatch::io
