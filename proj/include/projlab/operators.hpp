#pragma once

#include "projlab/sets.hpp"

#include <variant>
#include <vector>

namespace projlab {

namespace ops {

/// (1 - lambda) Id + lambda P_C, lambda in (0, 2].
template <typename Scalar>
struct Relaxed {
    SetPtr<Scalar> set;
    Scalar lambda;
};

/// p + (p - x) min{alpha, tau / |p - x|} with p = P_C x.
template <typename Scalar>
struct SemiIntrepid {
    SetPtr<Scalar> set;
    Scalar alpha;
    Scalar tau;
};

/// (1 - alpha) Id + alpha P_B^mu P_A^lambda.
template <typename Scalar>
struct GeneralizedDR {
    SetPtr<Scalar> a;
    SetPtr<Scalar> b;
    Scalar lambda;
    Scalar mu;
    Scalar alpha;
};

} // namespace ops

template <typename Scalar>
using OperatorVariant = std::variant<ops::Relaxed<Scalar>, ops::SemiIntrepid<Scalar>, ops::GeneralizedDR<Scalar>>;

/// One iteration operator. A thin wrapper over the variant so that unqualified
/// calls such as apply(op, x) resolve here rather than to std::apply.
template <typename Scalar>
struct OperatorSpec {
    OperatorVariant<Scalar> kind;

    OperatorSpec(ops::Relaxed<Scalar> o) : kind(std::move(o)) {}
    OperatorSpec(ops::SemiIntrepid<Scalar> o) : kind(std::move(o)) {}
    OperatorSpec(ops::GeneralizedDR<Scalar> o) : kind(std::move(o)) {}

    template <typename T>
    const T* as() const noexcept
    {
        return std::get_if<T>(&kind);
    }
};

/// One full cycle T_m ... T_1, applied in list order.
template <typename Scalar>
struct CyclicTuple {
    std::vector<OperatorSpec<Scalar>> members;

    std::size_t size() const noexcept { return members.size(); }
    const OperatorSpec<Scalar>& operator[](std::size_t i) const { return members[i]; }
};

template <typename Scalar>
OperatorSpec<Scalar> make_relaxed(SetPtr<Scalar> set, Scalar lambda)
{
    require(set != nullptr, ErrorKind::Domain, "relaxed: missing set");
    require(lambda > Scalar(0) && lambda <= Scalar(2), ErrorKind::Domain, "relaxed: lambda must lie in (0, 2]");
    return ops::Relaxed<Scalar>{std::move(set), lambda};
}

template <typename Scalar>
OperatorSpec<Scalar> make_semi_intrepid(SetPtr<Scalar> set, Scalar alpha, Scalar tau)
{
    require(set != nullptr, ErrorKind::Domain, "semi_intrepid: missing set");
    require(alpha >= Scalar(0) && alpha <= Scalar(1), ErrorKind::Domain, "semi_intrepid: alpha must lie in [0, 1]");
    require(tau >= Scalar(0), ErrorKind::Domain, "semi_intrepid: tau must be nonnegative");
    return ops::SemiIntrepid<Scalar>{std::move(set), alpha, tau};
}

/// alpha = 1 is accepted (plain composition P_B^mu P_A^lambda).
template <typename Scalar>
OperatorSpec<Scalar> make_dr(SetPtr<Scalar> a, SetPtr<Scalar> b, Scalar lambda, Scalar mu, Scalar alpha)
{
    require(a != nullptr && b != nullptr, ErrorKind::Domain, "dr: missing set");
    require(a->dim() == b->dim(), ErrorKind::DimensionMismatch, "dr: set dimensions differ");
    require(lambda > Scalar(0) && lambda <= Scalar(2), ErrorKind::Domain, "dr: lambda must lie in (0, 2]");
    require(mu > Scalar(0) && mu <= Scalar(2), ErrorKind::Domain, "dr: mu must lie in (0, 2]");
    require(alpha > Scalar(0) && alpha <= Scalar(1), ErrorKind::Domain, "dr: alpha must lie in (0, 1]");
    return ops::GeneralizedDR<Scalar>{std::move(a), std::move(b), lambda, mu, alpha};
}

template <typename Scalar>
CyclicTuple<Scalar> make_cycle(std::vector<OperatorSpec<Scalar>> members)
{
    require(!members.empty(), ErrorKind::Domain, "cycle: needs at least one operator");
    return CyclicTuple<Scalar>{std::move(members)};
}

template <typename Scalar>
Vector<Scalar> relaxed_step(const SetDescriptor<Scalar>& s, Scalar lambda, const PointArg<Scalar>& x)
{
    return x + lambda * (project(s, x).canonical - x);
}

template <typename Scalar>
Vector<Scalar> reflect(const SetDescriptor<Scalar>& s, const PointArg<Scalar>& x)
{
    return relaxed_step(s, Scalar(2), x);
}

template <typename Scalar>
Vector<Scalar> reflect(const SetPtr<Scalar>& s, const PointArg<Scalar>& x)
{
    return reflect(*s, x);
}

/// 1 + min{alpha, tau / |x - p|}, with the ratio read as 0 when p = x.
template <typename Scalar>
Scalar semi_intrepid_effective_relaxation(const PointArg<Scalar>& x, const PointArg<Scalar>& p, Scalar alpha, Scalar tau)
{
    const Scalar gap = (x - p).norm();
    if (gap == Scalar(0)) return Scalar(1);
    return Scalar(1) + std::min(alpha, tau / gap);
}

template <typename Scalar>
struct DRTrace {
    Vector<Scalar> r;   ///< P_A^lambda x
    Vector<Scalar> s;   ///< P_B^mu r
    Vector<Scalar> out; ///< (1 - alpha) x + alpha s
};

template <typename Scalar>
DRTrace<Scalar> apply_traced(const ops::GeneralizedDR<Scalar>& op, const PointArg<Scalar>& x)
{
    DRTrace<Scalar> t;
    t.r = relaxed_step(*op.a, op.lambda, x);
    t.s = relaxed_step(*op.b, op.mu, t.r);
    t.out = x + op.alpha * (t.s - x);
    return t;
}

namespace detail {

template <typename Scalar>
struct Applier {
    const Vector<Scalar>& x;

    Vector<Scalar> operator()(const ops::Relaxed<Scalar>& op) const { return relaxed_step(*op.set, op.lambda, x); }

    Vector<Scalar> operator()(const ops::SemiIntrepid<Scalar>& op) const
    {
        const Vector<Scalar> p = project(*op.set, x).canonical;
        const Scalar gap = (p - x).norm();
        if (gap == Scalar(0)) return p;
        return p + std::min(op.alpha, op.tau / gap) * (p - x);
    }

    Vector<Scalar> operator()(const ops::GeneralizedDR<Scalar>& op) const { return apply_traced(op, x).out; }
};

} // namespace detail

template <typename Scalar>
Vector<Scalar> apply(const OperatorSpec<Scalar>& op, const PointArg<Scalar>& x)
{
    return std::visit(detail::Applier<Scalar>{x}, op.kind);
}

template <typename Scalar>
Vector<Scalar> apply(const CyclicTuple<Scalar>& cycle, const PointArg<Scalar>& x)
{
    Vector<Scalar> y = x;
    for (const auto& op : cycle.members) y = apply(op, y);
    return y;
}

/// Sets an operator reads from, in order (A then B for DR).
template <typename Scalar>
std::vector<SetPtr<Scalar>> operator_sets(const OperatorSpec<Scalar>& op)
{
    return std::visit(
        [](const auto& o) -> std::vector<SetPtr<Scalar>> {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, ops::GeneralizedDR<Scalar>>)
                return {o.a, o.b};
            else
                return {o.set};
        },
        op.kind);
}

template <typename Scalar>
int operator_dim(const OperatorSpec<Scalar>& op)
{
    return operator_sets(op).front()->dim();
}

} // namespace projlab
