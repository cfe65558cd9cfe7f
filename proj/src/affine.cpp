#include "projlab/affine.hpp"

#include "projlab/polyhedral.hpp"
#include "projlab/sampling.hpp"

#include <algorithm>
#include <cmath>

namespace projlab {

namespace {

struct Span {
    Vec anchor;
    std::vector<Vec> dirs;
};

Span full_space(const Vec& anchor)
{
    Span s{anchor, {}};
    for (Eigen::Index i = 0; i < anchor.size(); ++i) s.dirs.push_back(Vec::Unit(anchor.size(), i));
    return s;
}

Span span_of(const SetDescriptor<double>& s)
{
    const Eigen::Index d = s.dim();
    return std::visit(
        [&](const auto& sh) -> Span {
            using T = std::decay_t<decltype(sh)>;
            if constexpr (std::is_same_v<T, shapes::Halfspace<double>> || std::is_same_v<T, shapes::Orthant<double>>) {
                return full_space(Vec::Zero(d));
            } else if constexpr (std::is_same_v<T, shapes::Hyperplane<double>>) {
                Span out{sh.a * (sh.b / sh.a.squaredNorm()), {}};
                const Mat ns = null_space<double>(Mat(sh.a.transpose()), static_cast<int>(d));
                for (Eigen::Index j = 0; j < ns.cols(); ++j) out.dirs.push_back(ns.col(j));
                return out;
            } else if constexpr (std::is_same_v<T, shapes::AffineSubspace<double>>) {
                Span out{sh.anchor, {}};
                for (Eigen::Index j = 0; j < sh.basis.cols(); ++j) out.dirs.push_back(sh.basis.col(j));
                return out;
            } else if constexpr (std::is_same_v<T, shapes::Ball<double>>) {
                return sh.radius > 0.0 ? full_space(sh.center) : Span{sh.center, {}};
            } else if constexpr (std::is_same_v<T, shapes::Sphere<double>>) {
                return full_space(sh.center);
            } else if constexpr (std::is_same_v<T, shapes::Box<double>>) {
                Span out{sh.lower, {}};
                for (Eigen::Index i = 0; i < d; ++i)
                    if (sh.upper[i] > sh.lower[i]) out.dirs.push_back(Vec::Unit(d, i));
                return out;
            } else if constexpr (std::is_same_v<T, shapes::PolyhedralCone<double>>) {
                Span out{Vec::Zero(d), {}};
                for (Eigen::Index j = 0; j < sh.generators.cols(); ++j) out.dirs.push_back(sh.generators.col(j));
                return out;
            } else if constexpr (std::is_same_v<T, shapes::Enlargement<double>>) {
                Span inner = span_of(*sh.inner);
                return sh.tau > 0.0 ? full_space(inner.anchor) : inner;
            } else if constexpr (std::is_same_v<T, shapes::UnionOfSets<double>>) {
                Span out = span_of(*sh.members.front());
                for (std::size_t i = 1; i < sh.members.size(); ++i) {
                    Span m = span_of(*sh.members[i]);
                    out.dirs.push_back(m.anchor - out.anchor);
                    for (auto& v : m.dirs) out.dirs.push_back(std::move(v));
                }
                return out;
            } else if constexpr (std::is_same_v<T, shapes::FinitePointSet<double>>) {
                Span out{sh.points.front(), {}};
                for (std::size_t i = 1; i < sh.points.size(); ++i) out.dirs.push_back(sh.points[i] - sh.points.front());
                return out;
            } else {
                static_assert(std::is_same_v<T, shapes::Translate<double>>);
                Span inner = span_of(*sh.inner);
                inner.anchor += sh.shift;
                return inner;
            }
        },
        s.shape());
}

AffineHull from_span(const Vec& anchor, const std::vector<Vec>& dirs)
{
    AffineHull L;
    L.anchor = anchor;
    std::vector<Vec> nonzero;
    for (const auto& v : dirs)
        if (v.norm() > 1e-12) nonzero.push_back(v);
    if (nonzero.empty()) {
        L.basis = Mat(anchor.size(), 0);
        return L;
    }
    Mat D(anchor.size(), static_cast<Eigen::Index>(nonzero.size()));
    for (std::size_t j = 0; j < nonzero.size(); ++j) D.col(static_cast<Eigen::Index>(j)) = nonzero[j];
    L.basis = orthonormal_basis<double>(D, 1e-9);
    // express the anchor as the foot of the origin, a canonical choice
    L.anchor = anchor - L.basis * (L.basis.transpose() * anchor);
    return L;
}

} // namespace

AffineHull affine_hull(const std::vector<SetPtr<double>>& sets)
{
    require(!sets.empty(), ErrorKind::Domain, "affine_hull: no sets");
    const Eigen::Index d = sets.front()->dim();
    Span all = span_of(*sets.front());
    for (std::size_t i = 1; i < sets.size(); ++i) {
        require(sets[i]->dim() == d, ErrorKind::DimensionMismatch, "affine_hull: sets differ in dimension");
        Span s = span_of(*sets[i]);
        all.dirs.push_back(s.anchor - all.anchor);
        for (auto& v : s.dirs) all.dirs.push_back(std::move(v));
    }
    return from_span(all.anchor, all.dirs);
}

AffineHull affine_hull_sampled(const std::vector<SetPtr<double>>& sets, int probe_count, std::uint64_t seed)
{
    require(!sets.empty(), ErrorKind::Domain, "affine_hull_sampled: no sets");
    require(probe_count >= 1, ErrorKind::Domain, "affine_hull_sampled: probe_count must be >= 1");
    Rng rng(seed);
    std::vector<Vec> members;
    for (const auto& s : sets) {
        const Vec ref = reference_member(*s);
        members.push_back(ref);
        for (int i = 0; i < probe_count; ++i) members.push_back(sample_member_near(*s, ref, 4.0 * (1.0 + ref.norm()), rng));
    }
    std::vector<Vec> dirs;
    for (std::size_t i = 1; i < members.size(); ++i) dirs.push_back(members[i] - members.front());
    return from_span(members.front(), dirs);
}

PropertyReport verify_affine_identities(const SetDescriptor<double>& s, const AffineHull& L, double lambda, int samples,
                                        std::uint64_t seed)
{
    require(lambda >= 0.0, ErrorKind::Domain, "verify_affine_identities: lambda must be >= 0");
    require(samples >= 0, ErrorKind::Domain, "verify_affine_identities: samples must be nonnegative");
    require_same_dim(L.anchor, s.dim(), "verify_affine_identities");

    PropertyReport rep;
    rep.property = "affine_identities";
    rep.seed = seed;
    rep.check_tol = kShadowTol;
    Rng rng(seed);
    const Vec ref = reference_member(s);
    const double radius = 2.0 * (1.0 + ref.norm());
    auto relaxed = [&](const Vec& x) -> Vec { return x + lambda * (project(s, x).canonical - x); };
    for (int i = 0; i < samples; ++i) {
        const Vec member = sample_member_near(s, ref, 2.0 * radius, rng);
        require(affine_distance(L, member) <= 1e-9, ErrorKind::ContainmentViolated,
                "verify_affine_identities: a member of the set lies outside L");
        const Vec x = sample_ball(ref, radius, rng);
        const Vec px = project_affine(L, x);
        const Vec tx = relaxed(x);
        const Vec diff1 = (tx - project_affine(L, tx)) - (1.0 - lambda) * (x - px);
        const Vec diff2 = project_affine(L, tx) - relaxed(px);
        rep.record(-std::max(diff1.cwiseAbs().maxCoeff(), diff2.cwiseAbs().maxCoeff()), {x});
    }
    return rep;
}

double eta(double lambda, double mu, double alpha)
{
    require(lambda > 0.0 && lambda <= 2.0, ErrorKind::Domain, "eta: lambda must lie in (0, 2]");
    require(mu > 0.0 && mu <= 2.0, ErrorKind::Domain, "eta: mu must lie in (0, 2]");
    require(alpha > 0.0 && alpha < 1.0, ErrorKind::Domain, "eta: alpha must lie in (0, 1)");
    return (1.0 - alpha) + alpha * (1.0 - lambda) * (1.0 - mu);
}

const char* to_string(ShadowClass c)
{
    switch (c) {
    case ShadowClass::FixedPointShadow: return "FixedPointShadow";
    case ShadowClass::Intersection: return "Intersection";
    case ShadowClass::Undetermined: return "Undetermined";
    }
    return "Unknown";
}

ShadowRun shadow_run(const Trajectory& traj, const AffineHull& L, const ops::GeneralizedDR<double>& T)
{
    require(traj.cycle_length == 1, ErrorKind::Domain, "shadow_run: trajectory must come from a single DR operator");
    require(!traj.iterates.empty(), ErrorKind::InsufficientData, "shadow_run: empty trajectory");
    for (const auto* s : {T.a.get(), T.b.get()}) {
        const Vec ref = reference_member(*s);
        require(affine_distance(L, ref) <= 1e-9, ErrorKind::ContainmentViolated, "shadow_run: a set is not inside L");
    }

    ShadowRun out;
    auto& rep = out.report;
    const bool in_theorem = T.alpha < 1.0;
    rep.eta = in_theorem ? eta(T.lambda, T.mu, T.alpha) : (1.0 - T.lambda) * (1.0 - T.mu);
    if (!in_theorem) rep.flags.push_back("alpha = 1 lies outside the affine reduction theorem");

    for (const auto& x : traj.iterates) out.shadow.push_back(project_affine(L, x));
    const OperatorSpec<double> op(T);
    for (std::size_t n = 0; n < traj.size(); ++n) {
        const Vec gap = traj.iterates[n] - out.shadow[n];
        rep.gap_norms.push_back(gap.norm());
        if (n + 1 == traj.size()) break;
        const double rec = (apply(op, out.shadow[n]) - out.shadow[n + 1]).cwiseAbs().maxCoeff();
        const Vec next_gap = traj.iterates[n + 1] - out.shadow[n + 1];
        const double law = (next_gap - rep.eta * gap).cwiseAbs().maxCoeff();
        rep.max_recursion_residual = std::max(rep.max_recursion_residual, rec);
        rep.max_gap_residual = std::max(rep.max_gap_residual, law);
        if (gap.norm() > 0.0) rep.gap_ratios.push_back(next_gap.norm() / gap.norm());
        if (rec > kShadowTol)
            throw Error(ErrorKind::ShadowRecursionViolated,
                        "shadow_run: shadow step " + std::to_string(n) + " misses the DR recursion by " + std::to_string(rec));
        if (law > kShadowTol)
            throw Error(ErrorKind::ShadowRecursionViolated,
                        "shadow_run: gap at step " + std::to_string(n + 1) + " misses eta times the previous gap by " +
                            std::to_string(law));
    }

    rep.shadow_limit = out.shadow.back();
    const std::size_t n = traj.size();
    rep.limit_detected = n >= 2 && (traj.iterates[n - 1] - traj.iterates[n - 2]).norm() <= kLimitTol;
    if (!rep.limit_detected) {
        rep.flags.push_back("no limit detected");
        return out;
    }
    const Vec& xbar = traj.iterates.back();
    rep.limit = xbar;
    rep.fixed_point_residual = (apply(op, xbar) - xbar).norm();
    const Vec pa = project(*T.a, xbar).canonical;
    const Vec pb = project(*T.b, xbar).canonical;
    rep.feet_residual = (pa - pb).norm();
    rep.intersection_residual = std::max(distance(*T.a, xbar), distance(*T.b, xbar));
    if (in_theorem)
        rep.classification = (T.lambda == 2.0 && T.mu == 2.0) ? ShadowClass::FixedPointShadow : ShadowClass::Intersection;
    return out;
}

} // namespace projlab
