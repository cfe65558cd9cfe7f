#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace projlab {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Point parameter in a non-deduced context, so that Eigen expressions convert
/// implicitly and Scalar is taken from the set or operator argument.
template <typename Scalar>
using PointArg = std::type_identity_t<Vector<Scalar>>;

using Vec = Vector<double>;
using Mat = Matrix<double>;

/// Hard upper bound on the ambient dimension of a scenario.
inline constexpr int kMaxDimension = 16;

/// Default Euclidean membership tolerance.
inline constexpr double kMembershipTol = 1e-10;

/// Two candidate minimizers closer than this (in distance) are treated as tied.
inline constexpr double kTieTol = 1e-12;

enum class ErrorKind {
    DimensionMismatch,
    Domain,
    UnsupportedSet,
    SamplingFailure,
    NumericalDivergence,
    InsufficientData,
    CertificateViolated,
    ContainmentViolated,
    ShadowRecursionViolated,
    MoreThanOneReflection,
    MoreThanOneFullIntrepid,
    StrongRegularityFailed,
    Config,
};

inline const char* to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::Domain: return "DomainViolation";
    case ErrorKind::UnsupportedSet: return "UnsupportedSet";
    case ErrorKind::SamplingFailure: return "SamplingFailure";
    case ErrorKind::NumericalDivergence: return "NumericalDivergence";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::CertificateViolated: return "CertificateViolated";
    case ErrorKind::ContainmentViolated: return "ContainmentViolated";
    case ErrorKind::ShadowRecursionViolated: return "ShadowRecursionViolated";
    case ErrorKind::MoreThanOneReflection: return "MoreThanOneReflection";
    case ErrorKind::MoreThanOneFullIntrepid: return "MoreThanOneFullIntrepid";
    case ErrorKind::StrongRegularityFailed: return "StrongRegularityFailed";
    case ErrorKind::Config: return "ConfigError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind)
    {
    }

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline void require(bool condition, ErrorKind kind, const std::string& what)
{
    if (!condition) throw Error(kind, what);
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& v)
{
    return v.allFinite();
}

template <typename Scalar>
void require_same_dim(const Vector<Scalar>& x, Eigen::Index dim, const char* where)
{
    if (x.size() != dim) {
        throw Error(ErrorKind::DimensionMismatch,
                    std::string(where) + ": point has dimension " + std::to_string(x.size()) +
                        ", set has dimension " + std::to_string(dim));
    }
}

/// Lexicographic strict order on coordinate vectors.
template <typename Scalar>
bool lex_less(const Vector<Scalar>& a, const Vector<Scalar>& b)
{
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a[i] < b[i]) return true;
        if (b[i] < a[i]) return false;
    }
    return false;
}

} // namespace projlab
