#pragma once

// Scenario execution: estimate constants, build certificates, run, fit,
// compare, then evaluate the requested checks and expectations.

#include "projlab/config.hpp"
#include "projlab/runner.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace projlab {

/// Exit-code contract of the command line.
enum ExitCode : int { kExitPass = 0, kExitFail = 1, kExitUsage = 2 };

struct ScenarioOutcome {
    std::string name;
    json report; ///< keys: scenario, constants, certificates, fit, comparisons, checks
    std::optional<Trajectory> trajectory;
    std::vector<Vec> shadow;
    std::vector<double> gap_norms;
    std::vector<std::string> failures; ///< names of failed assertions

    bool passed() const noexcept { return failures.empty(); }
};

/// Stream-specific seed derived from the scenario seed (splitmix64).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

ScenarioOutcome execute_scenario(const ScenarioConfig& config);

/// RFC-4180 CSV, 17 significant digits: n, op_index, x_1..x_d, dC_1..dC_m, dC.
std::string trajectory_csv(const Trajectory& traj);

/// Same row layout for y_n = P_L x_n, followed by the shadow column group
/// shadow_1..shadow_d and gap = |x_n - y_n|.
std::string shadow_csv(const Trajectory& traj, const std::vector<Vec>& shadow);

/// Writes <root>/<name>/{trajectory.csv, report.json, shadow.csv}. Refuses a
/// non-empty existing directory unless force is set (Error(Config)); force
/// replaces those three files and leaves anything else alone.
std::filesystem::path write_artifacts(const ScenarioOutcome& outcome, const std::filesystem::path& root, bool force);

/// Copy of j without any "wall_seconds" members, at any depth.
json strip_wall_time(const json& j);

/// Human-readable per-check table.
std::string format_outcome(const ScenarioOutcome& outcome);

} // namespace projlab
