#pragma once

// The shipped regression suite (bundled scenarios plus built-in property
// suites) and the static catalog of sets, operators and rate theorems.

#include "projlab/scenario.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace projlab {

struct SuiteOptions {
    std::filesystem::path scenario_dir;  ///< empty: default_scenario_dir()
    std::optional<std::uint64_t> seed;   ///< overrides every scenario seed
    int workers = 1;
};

struct SuiteEntry {
    std::string name;
    std::string kind; ///< "scenario", "property" or "config"
    bool passed = false;
    std::vector<std::string> failures;
    json report;
    double wall_seconds = 0.0;
};

struct SuiteResult {
    std::vector<SuiteEntry> entries;      ///< bundled scenarios in file-name order, then property suites
    std::vector<ScenarioOutcome> outcomes; ///< scenario outcomes, same order

    bool passed() const noexcept;
    json to_json() const;
    std::string table() const;
};

/// $PROJLAB_SCENARIOS when set, else the scenarios/ directory of the source tree.
std::filesystem::path default_scenario_dir();

/// *.json files of a directory, sorted by name.
std::vector<std::filesystem::path> bundled_scenarios(const std::filesystem::path& dir);

/// Runs every bundled scenario (concurrently, up to the worker cap) and the
/// built-in property suites. Failures are reported, not thrown.
SuiteResult verify_suite(const SuiteOptions& opt);

/// Over-relaxed (m - 1 step) per-iterate rate never exceeds the plain cyclic
/// relaxed rate over random (lambda, eps, kappa, m) draws where both apply.
SuiteEntry refinement_dominance(std::uint64_t seed, int draws = 10000);

std::string catalog_text();
json catalog_json();

} // namespace projlab
