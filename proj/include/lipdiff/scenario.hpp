#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace lipdiff::cli {

// Exit-code contract: 0 certified/pass, 2 refuted, 3 inconclusive,
// 1 execution error (the envelope then carries a structured error object).
struct RunResult {
  nlohmann::json envelope;
  int exit_code = 1;
};

RunResult run_scenario_file(const std::string& path);
// base_dir resolves relative file references inside the scenario.
RunResult run_scenario_json(const nlohmann::json& scenario, const std::string& base_dir);

// One CSV per profile-bearing sub-report, with stable filenames derived
// from the scenario name. Returns the paths written.
std::vector<std::string> emit_profiles(const nlohmann::json& envelope, const std::string& dir);

std::string catalog_text();

// Strips fields excluded from the byte-identical determinism contract.
nlohmann::json strip_volatile(nlohmann::json envelope);

}  // namespace lipdiff::cli
