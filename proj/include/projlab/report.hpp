#pragma once

#include "projlab/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace projlab {

/// Outcome of a sampled inequality check. A sample's margin is
/// (right-hand side - left-hand side); it is a violation when it falls below
/// -check_tol.
struct PropertyReport {
    std::string property;
    int samples = 0;
    int violations = 0;
    double worst_margin = 0.0;
    double max_abs_margin = 0.0;
    std::vector<Vec> witness; ///< points realizing the worst margin
    std::uint64_t seed = 0;
    double check_tol = 1e-9;
    std::vector<std::string> flags;

    bool passed() const noexcept { return violations == 0; }

    void record(double margin, const std::vector<Vec>& points)
    {
        if (samples == 0 || margin < worst_margin) {
            worst_margin = margin;
            witness = points;
        }
        max_abs_margin = std::max(max_abs_margin, std::abs(margin));
        if (margin < -check_tol) ++violations;
        ++samples;
    }
};

enum class EstimateKind { EpsDelta, LinearRegularity, StrongRegularity, ThetaBar, Injectability };

inline const char* to_string(EstimateKind k)
{
    switch (k) {
    case EstimateKind::EpsDelta: return "EpsDelta";
    case EstimateKind::LinearRegularity: return "LinearRegularity";
    case EstimateKind::StrongRegularity: return "StrongRegularity";
    case EstimateKind::ThetaBar: return "ThetaBar";
    case EstimateKind::Injectability: return "Injectability";
    }
    return "Unknown";
}

/// A sampled estimate. eps and kappa values are lower bounds on the true
/// constants (a supremum over finitely many samples); zeta is an upper bound on
/// the true transversality constant.
struct RegularityEstimate {
    EstimateKind kind = EstimateKind::EpsDelta;
    double value = 0.0;
    double delta = 0.0;
    Vec anchor;
    int samples = 0;
    std::uint64_t seed = 0;
    bool holds = true; ///< strong regularity verdict; true for the other kinds
    std::vector<std::string> flags;
    std::vector<Vec> witness;
};

} // namespace projlab
