#pragma once

#include "projlab/sets.hpp"

#include <cstdint>
#include <random>

namespace projlab {

using Rng = std::mt19937_64;

/// Uniform point in B(center, radius): normalized Gaussian direction times
/// radius * U^(1/d).
inline Vec sample_ball(const Vec& center, double radius, Rng& rng)
{
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const Eigen::Index d = center.size();
    Vec dir(d);
    double n = 0.0;
    do {
        for (Eigen::Index i = 0; i < d; ++i) dir[i] = gauss(rng);
        n = dir.norm();
    } while (n == 0.0);
    const double r = radius * std::pow(unif(rng), 1.0 / static_cast<double>(d));
    return center + (r / n) * dir;
}

/// Uniform direction on the unit sphere.
inline Vec sample_direction(Eigen::Index d, Rng& rng)
{
    return sample_ball(Vec::Zero(d), 1.0, rng).normalized();
}

/// Member of s near w: the canonical projection of a uniform point of
/// B(w, delta/2). When w is in s the result lies in B(w, delta).
inline Vec sample_member_near(const SetDescriptor<double>& s, const Vec& w, double delta, Rng& rng)
{
    return project(s, sample_ball(w, 0.5 * delta, rng)).canonical;
}

/// Some fixed member of s.
inline Vec reference_member(const SetDescriptor<double>& s)
{
    return project(s, Vec::Zero(s.dim())).canonical;
}

} // namespace projlab
