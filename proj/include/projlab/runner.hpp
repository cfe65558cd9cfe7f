#pragma once

// Cyclic iteration engine, R-linear rate fitting and post-hoc checks of a
// recorded trajectory against rate certificates.

#include "projlab/analysis.hpp"
#include "projlab/operators.hpp"
#include "projlab/rates.hpp"
#include "projlab/report.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace projlab {

enum class StopReason { Converged, Budget, Diverged };

const char* to_string(StopReason r);

inline constexpr double kDivergenceBound = 1e12;
inline constexpr double kRecurrenceTol = 1e-12;
inline constexpr double kFitFloor = 1e-14;

struct Trajectory {
    std::vector<Vec> iterates;                      ///< x_0 .. x_N
    std::vector<int> op_index;                      ///< cycle member applied to iterates[n], one per step
    std::vector<std::vector<double>> set_distances; ///< d_{C_i}(x_n), one row per iterate
    std::vector<double> dist_c;                     ///< d_C(x_n)
    StopReason stop = StopReason::Budget;
    int cycle_length = 1;
    std::uint64_t seed = 0;
    double wall_seconds = 0.0;
    bool dist_c_approximate = false;

    std::size_t size() const noexcept { return iterates.size(); }
    const Vec& final() const { return iterates.back(); }
};

struct RunOptions {
    int max_cycles = 10000;
    double tol = 1e-10;
    std::uint64_t seed = 0;
};

/// Iterates x_{n+1} = T_{(n mod m)+1} x_n until d_C(x_n) <= tol, the cycle
/// budget runs out, or |x_n| exceeds the divergence bound.
Trajectory run(const CyclicTuple<double>& ops, const Vec& x0, const std::vector<SetPtr<double>>& sets,
               const IntersectionDistance& dist_c, const RunOptions& opt);

struct RateFit {
    double rho = 0.0;   ///< per iterate
    double sigma = 0.0; ///< prefactor
    int n0 = 0;
    int n1 = 0; ///< inclusive window
    int points = 0;
    double r2 = 1.0;
    bool censored = false;
    bool nonconvergent = false;
    bool finite = false; ///< the errors hit the floor before a fit was possible
};

/// Least-squares fit of log e_n = log sigma + n log rho on the tail of the
/// sequence, after a burn-in, excluding entries below the floor.
RateFit fit_rlinear(const std::vector<double>& errors, double tail_fraction = 0.5, double floor = kFitFloor,
                    int burn_in = 10);

/// |x_n - xbar| with xbar the final iterate, plus the floor below which those
/// entries are dominated by the proxy error.
struct LimitErrors {
    std::vector<double> errors;
    double floor = kFitFloor;
};

LimitErrors limit_errors(const Trajectory& traj);

struct CyclePattern {
    int period = 0;
    int start = 0;           ///< first iterate from which the recurrence holds
    std::vector<Vec> states; ///< iterates[start .. start + period - 1]
};

/// Smallest period p (a multiple of the cycle length) with x_n = x_{n-p} to
/// tol over the last p steps of the trajectory. Converged runs have none.
std::optional<CyclePattern> detect_cycle(const Trajectory& traj, double tol = kRecurrenceTol, int max_periods = 64);

struct KStepReport : PropertyReport {
    double worst_ratio = 0.0; ///< max d_C(x_{k(n+1)}) / d_C(x_{kn}) over checked blocks
    int blocks_skipped = 0;   ///< block starts outside the certified ball
};

struct Ball {
    Vec center;
    double radius = 0.0;
};

/// d_C(x_{o+k(n+1)}) <= rho d_C(x_{o+kn}) + 1e-12 for every block start inside
/// the ball, o being the block offset.
KStepReport check_k_step_reduction(const Trajectory& traj, int k, double rho_bound,
                                   const std::optional<Ball>& certified = std::nullopt, int offset = 0);

/// Blocks of m - 1 steps start after the first step, once the iterate lies in
/// the set of the operator that produced it.
int block_offset(const RateCertificate& cert);

struct CertificateComparison {
    std::string theorem;
    double rho_fit = 0.0;  ///< per iterate
    double rho_cert = 0.0; ///< per iterate
    double slack = 0.02;
    bool passed = true;
    std::string table;
};

/// Fitted per-iterate rate against an applicable certificate; throws
/// CertificateViolated when the fit exceeds the bound by more than the slack.
CertificateComparison compare_certificate(const Trajectory& traj, const RateFit& fit, const RateCertificate& cert,
                                          double slack = 0.02);

/// |x_{n+1} - xbar| <= |x_n - xbar| + 1e-10 along the whole trajectory.
PropertyReport check_fejer_trace(const Trajectory& traj, const Vec& xbar);

/// d_C(x_n) >= d_{C_i}(x_n) - 1e-12 for every iterate and set.
PropertyReport check_distance_order(const Trajectory& traj);

/// |x_n - xbar| <= sigma_factor d_C(x_o) rho_block^floor((n - o)/k) for n >= o,
/// o the block offset, when x_0 lies in the certified start ball around w;
/// flags and skips otherwise.
PropertyReport check_envelope(const Trajectory& traj, const RateCertificate& cert, const Vec& w, double delta);

} // namespace projlab
