#pragma once

// Sampling-based checks of Fejer-type inequalities and estimators of the
// regularity constants that feed the rate certificates. All routines are
// deterministic functions of their arguments and seed.

#include "projlab/operators.hpp"
#include "projlab/report.hpp"

#include <functional>
#include <optional>

namespace projlab {

using PointMap = std::function<Vec(const Vec&)>;

inline PointMap as_map(const OperatorSpec<double>& op)
{
    return [op](const Vec& x) { return apply(op, x); };
}

inline PointMap as_map(const CyclicTuple<double>& cycle)
{
    return [cycle](const Vec& x) { return apply(cycle, x); };
}

inline constexpr double kCheckTol = 1e-9;
inline constexpr double kStrongTol = 1e-6;

/// |T x - xbar|^2 + beta |x - T x|^2 <= gamma |x - xbar|^2 for x in B(w, delta/2)
/// and reference points xbar in refset near w.
PropertyReport check_quasi_firm_fejer(const PointMap& T, const SetDescriptor<double>& refset, double gamma, double beta,
                                      const Vec& w, double delta, int samples, std::uint64_t seed);

/// |x - T x| >= nu d_C(x) for x in B(w, delta/2).
PropertyReport check_quasi_coercive(const PointMap& T, const SetDescriptor<double>& C, double nu, const Vec& w,
                                    double delta, int samples, std::uint64_t seed);

/// Largest sampled <u, y - x> / (|u| |y - x|) over members x, y near w and
/// proximal normals u at x, clamped to [0, 1].
RegularityEstimate estimate_eps_regularity(const SetDescriptor<double>& s, const Vec& w, double delta, int samples,
                                           std::uint64_t seed);

/// Same statistic over explicitly supplied members.
double eps_ratio_over(const SetDescriptor<double>& s, const std::vector<Vec>& members);

/// Distance to the intersection: exact when a descriptor is supplied, otherwise
/// approximated by running cyclic projections from x (an upper bound).
class IntersectionDistance {
public:
    IntersectionDistance(std::vector<SetPtr<double>> system, std::optional<SetPtr<double>> intersection);

    double operator()(const Vec& x) const;
    bool approximate() const noexcept { return !intersection_.has_value(); }
    Vec nearest(const Vec& x) const;

private:
    std::vector<SetPtr<double>> system_;
    std::optional<SetPtr<double>> intersection_;
};

/// Largest sampled d_C(x) / max_i d_{C_i}(x) over x in B(w, delta/2).
RegularityEstimate estimate_linear_regularity(const std::vector<SetPtr<double>>& system,
                                              const IntersectionDistance& dist_c, const Vec& w, double delta,
                                              int samples, std::uint64_t seed);

/// Same statistic over explicitly supplied points.
double linear_regularity_over(const std::vector<SetPtr<double>>& system, const IntersectionDistance& dist_c,
                              const std::vector<Vec>& points);

/// Largest <u, v> over unit u in N_A(w) and unit v in -N_B(w).
RegularityEstimate estimate_theta_bar(const SetDescriptor<double>& A, const SetDescriptor<double>& B, const Vec& w,
                                      int samples, std::uint64_t seed);

/// Smallest |sum u_i| over sampled tuples of unit proximal normals with
/// nonnegative weights summing to one. holds = (value > 1e-6).
RegularityEstimate check_strong_regularity(const std::vector<SetPtr<double>>& system, const Vec& w, double delta,
                                           int samples, std::uint64_t seed);

/// Segments [p, p + tau (p - x)/|p - x|] stay in s for x in B(w, delta).
PropertyReport check_injectable(const SetDescriptor<double>& s, double tau, const Vec& w, double delta, int samples,
                                std::uint64_t seed);

/// -K^polar contained in K, for orthants, polyhedral cones and translates of them.
PropertyReport is_obtuse_cone(const SetDescriptor<double>& s, int samples, std::uint64_t seed);

} // namespace projlab
