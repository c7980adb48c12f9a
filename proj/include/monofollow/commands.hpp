#pragma once

#include "monofollow/run_config.hpp"

#include <filesystem>

#include "json.hpp"

namespace monofollow {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int solver_failure = 1;
inline constexpr int hypothesis_failure = 2;
inline constexpr int bad_config = 64;
}  // namespace exit_code

/// Full solve report; never throws for solver failures (they are recorded
/// under "status" and "error").
nlohmann::json solve_report(const RunConfig& cfg);

/// Exit code matching a report produced by solve_report.
int exit_code_of(const nlohmann::json& report);

/// Each writes its JSON or CSV files into `out` and returns the exit code.
int cmd_solve(const RunConfig& cfg, const std::filesystem::path& out);
int cmd_curves(const RunConfig& cfg, const std::filesystem::path& out);
int cmd_simulate(const RunConfig& cfg, const std::filesystem::path& out);
/// Re-solves and compares every number with out/solution.json.
int cmd_verify(const RunConfig& cfg, const std::filesystem::path& out);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace monofollow
