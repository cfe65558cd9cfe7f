#pragma once

// Affine hulls of catalog sets and the shadow of a generalized DR sequence on
// the hull of its two sets.

#include "projlab/operators.hpp"
#include "projlab/report.hpp"
#include "projlab/runner.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace projlab {

using AffineHull = shapes::AffineSubspace<double>;

inline Vec project_affine(const AffineHull& L, const Vec& x)
{
    return L.anchor + L.basis * (L.basis.transpose() * (x - L.anchor));
}

inline double affine_distance(const AffineHull& L, const Vec& x) { return (x - project_affine(L, x)).norm(); }

/// aff of the union of the sets, from closed forms for every catalog variant.
AffineHull affine_hull(const std::vector<SetPtr<double>>& sets);

/// Hull spanned by differences of probe_count sampled members (rank tol 1e-9).
AffineHull affine_hull_sampled(const std::vector<SetPtr<double>>& sets, int probe_count, std::uint64_t seed);

/// (Id - P_L) P_s^lambda = (1 - lambda)(Id - P_L) and P_L P_s^lambda = P_s^lambda P_L
/// at sampled points, to 1e-10. Throws ContainmentViolated if a sampled member of
/// s leaves L.
PropertyReport verify_affine_identities(const SetDescriptor<double>& s, const AffineHull& L, double lambda, int samples,
                                        std::uint64_t seed);

/// (1 - alpha) + alpha (1 - lambda)(1 - mu), for alpha in (0, 1).
double eta(double lambda, double mu, double alpha);

enum class ShadowClass { FixedPointShadow, Intersection, Undetermined };

const char* to_string(ShadowClass c);

inline constexpr double kShadowTol = 1e-10;
inline constexpr double kLimitTol = 1e-10;

struct AffineReductionReport {
    double eta = 1.0;
    std::vector<double> gap_norms;  ///< |x_n - y_n|
    std::vector<double> gap_ratios; ///< |x_{n+1} - y_{n+1}| / |x_n - y_n|, when defined
    double max_recursion_residual = 0.0;
    double max_gap_residual = 0.0;
    ShadowClass classification = ShadowClass::Undetermined;
    bool limit_detected = false;
    Vec shadow_limit;
    std::optional<Vec> limit;
    double fixed_point_residual = 0.0; ///< |T xbar - xbar|
    double feet_residual = 0.0;        ///< |P_A xbar - P_B xbar| (lambda = mu = 2)
    double intersection_residual = 0.0; ///< max(d_A, d_B) at the limit
    std::vector<std::string> flags;
};

struct ShadowRun {
    std::vector<Vec> shadow; ///< y_n = P_L x_n
    AffineReductionReport report;
};

/// Shadows a trajectory of the single DR operator T on L, checks the shadow
/// recursion and the gap law x_{n+1} - y_{n+1} = eta (x_n - y_n) to 1e-10, and
/// classifies the limit. Throws ShadowRecursionViolated on a failed step.
ShadowRun shadow_run(const Trajectory& traj, const AffineHull& L, const ops::GeneralizedDR<double>& T);

} // namespace projlab
