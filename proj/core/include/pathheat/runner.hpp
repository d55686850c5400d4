#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace pathheat {

struct CheckRecord {
  std::string name;
  std::string reference;  // short statement of the property being checked
  double value = 0.0;
  double tolerance = 0.0;
  std::optional<double> std_error;
  bool pass = false;
  std::string error;  // non-empty when the check aborted with an exception

  nlohmann::ordered_json to_json() const;
};

struct RunnerReport {
  std::string suite;
  std::uint64_t seed = 0;
  nlohmann::json params;
  std::vector<CheckRecord> checks;
  bool overall = true;
  double wall_ms = 0.0;

  nlohmann::ordered_json to_json() const;
};

// Known suites: integrate, cylindrical, flow-check, smooth, clark-ocone, all.
bool is_known_suite(const std::string& suite);

RunnerReport run_suite(const std::string& suite, const nlohmann::json& params,
                       std::uint64_t seed);

// Runs the suite, writes report.json and any CSV tables under out_dir.
// Returns 0 when every check passes, 1 otherwise.  PATHHEAT_SEED overrides
// the seed argument when set.
int run_scenario(const std::string& suite, const nlohmann::json& params,
                 std::uint64_t seed, const std::string& out_dir);

}  // namespace pathheat
