#pragma once

#include "projlab/core.hpp"
#include "projlab/polyhedral.hpp"

#include <algorithm>
#include <memory>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

namespace projlab {

template <typename Scalar>
class SetDescriptor;

template <typename Scalar>
using SetPtr = std::shared_ptr<const SetDescriptor<Scalar>>;

namespace shapes {

/// {x : <a, x> <= b}
template <typename Scalar>
struct Halfspace {
    Vector<Scalar> a;
    Scalar b;
};

/// {x : <a, x> = b}
template <typename Scalar>
struct Hyperplane {
    Vector<Scalar> a;
    Scalar b;
};

template <typename Scalar>
struct AffineSubspace {
    Vector<Scalar> anchor;
    Matrix<Scalar> basis; ///< d x k, orthonormal columns (k may be 0)
};

template <typename Scalar>
struct Ball {
    Vector<Scalar> center;
    Scalar radius;
};

template <typename Scalar>
struct Sphere {
    Vector<Scalar> center;
    Scalar radius;
};

template <typename Scalar>
struct Box {
    Vector<Scalar> lower;
    Vector<Scalar> upper;
};

/// signs[i] = +1 for x_i >= 0, -1 for x_i <= 0, 0 for a free coordinate.
template <typename Scalar>
struct Orthant {
    std::vector<int> signs;
};

template <typename Scalar>
struct PolyhedralCone {
    Matrix<Scalar> generators; ///< d x k, nonzero columns
};

/// D + B(0, tau)
template <typename Scalar>
struct Enlargement {
    SetPtr<Scalar> inner;
    Scalar tau;
};

template <typename Scalar>
struct UnionOfSets {
    std::vector<SetPtr<Scalar>> members;
};

template <typename Scalar>
struct FinitePointSet {
    std::vector<Vector<Scalar>> points;
};

template <typename Scalar>
struct Translate {
    SetPtr<Scalar> inner;
    Vector<Scalar> shift;
};

} // namespace shapes

template <typename Scalar>
using SetVariant = std::variant<shapes::Halfspace<Scalar>, shapes::Hyperplane<Scalar>, shapes::AffineSubspace<Scalar>,
                                shapes::Ball<Scalar>, shapes::Sphere<Scalar>, shapes::Box<Scalar>,
                                shapes::Orthant<Scalar>, shapes::PolyhedralCone<Scalar>,
                                shapes::Enlargement<Scalar>, shapes::UnionOfSets<Scalar>,
                                shapes::FinitePointSet<Scalar>, shapes::Translate<Scalar>>;

/// Immutable description of one closed set. Build through the make_* factories,
/// which validate the parameters.
template <typename Scalar>
class SetDescriptor {
public:
    SetDescriptor(SetVariant<Scalar> shape, int dim) : shape_(std::move(shape)), dim_(dim) {}

    const SetVariant<Scalar>& shape() const noexcept { return shape_; }
    int dim() const noexcept { return dim_; }

    template <typename T>
    const T* as() const noexcept
    {
        return std::get_if<T>(&shape_);
    }

private:
    SetVariant<Scalar> shape_;
    int dim_;
};

template <typename Scalar>
struct ProjectionResult {
    Vector<Scalar> canonical;
    std::vector<Vector<Scalar>> all_minimizers;
    bool multivalued = false;
    Scalar distance = Scalar(0);
};

template <typename Scalar>
struct NormalSample {
    Vector<Scalar> base;
    Vector<Scalar> direction;
};

// ---------------------------------------------------------------------------
// factories

namespace detail {

inline void check_dim(Eigen::Index d, const char* what)
{
    require(d >= 1 && d <= kMaxDimension, ErrorKind::Domain,
            std::string(what) + ": dimension must lie in [1, " + std::to_string(kMaxDimension) + "]");
}

template <typename Scalar>
void check_finite(const Vector<Scalar>& v, const char* what)
{
    require(v.allFinite(), ErrorKind::Domain, std::string(what) + ": non-finite coordinates");
}

template <typename Scalar>
SetPtr<Scalar> wrap(SetVariant<Scalar> v, Eigen::Index dim)
{
    return std::make_shared<const SetDescriptor<Scalar>>(std::move(v), static_cast<int>(dim));
}

} // namespace detail

template <typename Scalar>
SetPtr<Scalar> make_halfspace(const Vector<Scalar>& a, Scalar b)
{
    detail::check_dim(a.size(), "halfspace");
    detail::check_finite(a, "halfspace");
    require(a.norm() > Scalar(0), ErrorKind::Domain, "halfspace: normal must be nonzero");
    return detail::wrap<Scalar>(shapes::Halfspace<Scalar>{a, b}, a.size());
}

template <typename Scalar>
SetPtr<Scalar> make_hyperplane(const Vector<Scalar>& a, Scalar b)
{
    detail::check_dim(a.size(), "hyperplane");
    detail::check_finite(a, "hyperplane");
    require(a.norm() > Scalar(0), ErrorKind::Domain, "hyperplane: normal must be nonzero");
    return detail::wrap<Scalar>(shapes::Hyperplane<Scalar>{a, b}, a.size());
}

/// Directions need not be orthonormal; they are orthonormalized here.
template <typename Scalar>
SetPtr<Scalar> make_affine(const Vector<Scalar>& anchor, const Matrix<Scalar>& directions)
{
    detail::check_dim(anchor.size(), "affine");
    detail::check_finite(anchor, "affine");
    require(directions.cols() == 0 || directions.rows() == anchor.size(), ErrorKind::DimensionMismatch,
            "affine: direction length differs from anchor dimension");
    Matrix<Scalar> basis = directions.cols() == 0 ? Matrix<Scalar>(anchor.size(), 0) : orthonormal_basis(directions);
    return detail::wrap<Scalar>(shapes::AffineSubspace<Scalar>{anchor, basis}, anchor.size());
}

template <typename Scalar>
SetPtr<Scalar> make_ball(const Vector<Scalar>& center, Scalar radius)
{
    detail::check_dim(center.size(), "ball");
    detail::check_finite(center, "ball");
    require(radius >= Scalar(0), ErrorKind::Domain, "ball: radius must be nonnegative");
    return detail::wrap<Scalar>(shapes::Ball<Scalar>{center, radius}, center.size());
}

template <typename Scalar>
SetPtr<Scalar> make_sphere(const Vector<Scalar>& center, Scalar radius)
{
    detail::check_dim(center.size(), "sphere");
    detail::check_finite(center, "sphere");
    require(radius > Scalar(0), ErrorKind::Domain, "sphere: radius must be positive");
    return detail::wrap<Scalar>(shapes::Sphere<Scalar>{center, radius}, center.size());
}

template <typename Scalar>
SetPtr<Scalar> make_box(const Vector<Scalar>& lower, const Vector<Scalar>& upper)
{
    detail::check_dim(lower.size(), "box");
    require(lower.size() == upper.size(), ErrorKind::DimensionMismatch, "box: bound lengths differ");
    detail::check_finite(lower, "box");
    detail::check_finite(upper, "box");
    require((lower.array() <= upper.array()).all(), ErrorKind::Domain, "box: lower must not exceed upper");
    return detail::wrap<Scalar>(shapes::Box<Scalar>{lower, upper}, lower.size());
}

template <typename Scalar>
SetPtr<Scalar> make_orthant(const std::vector<int>& signs)
{
    detail::check_dim(static_cast<Eigen::Index>(signs.size()), "orthant");
    for (int s : signs) require(s == -1 || s == 0 || s == 1, ErrorKind::Domain, "orthant: signs must be -1, 0 or +1");
    return detail::wrap<Scalar>(shapes::Orthant<Scalar>{signs}, static_cast<Eigen::Index>(signs.size()));
}

template <typename Scalar>
SetPtr<Scalar> make_cone(const Matrix<Scalar>& generators)
{
    detail::check_dim(generators.rows(), "cone");
    require(generators.cols() >= 1 && generators.cols() <= 8, ErrorKind::Domain, "cone: between 1 and 8 generators");
    require(generators.allFinite(), ErrorKind::Domain, "cone: non-finite generator");
    for (Eigen::Index j = 0; j < generators.cols(); ++j)
        require(generators.col(j).norm() > Scalar(0), ErrorKind::Domain, "cone: zero generator");
    return detail::wrap<Scalar>(shapes::PolyhedralCone<Scalar>{generators}, generators.rows());
}

template <typename Scalar>
SetPtr<Scalar> make_enlargement(SetPtr<Scalar> inner, Scalar tau)
{
    require(inner != nullptr, ErrorKind::Domain, "enlargement: missing inner set");
    require(tau >= Scalar(0) && std::isfinite(static_cast<double>(tau)), ErrorKind::Domain,
            "enlargement: tau must be finite and nonnegative");
    const int d = inner->dim();
    return detail::wrap<Scalar>(shapes::Enlargement<Scalar>{std::move(inner), tau}, d);
}

template <typename Scalar>
SetPtr<Scalar> make_union(std::vector<SetPtr<Scalar>> members)
{
    require(!members.empty(), ErrorKind::Domain, "union: needs at least one member");
    const int d = members.front()->dim();
    for (const auto& m : members)
        require(m != nullptr && m->dim() == d, ErrorKind::DimensionMismatch, "union: member dimensions differ");
    return detail::wrap<Scalar>(shapes::UnionOfSets<Scalar>{std::move(members)}, d);
}

template <typename Scalar>
SetPtr<Scalar> make_points(std::vector<Vector<Scalar>> points)
{
    require(!points.empty(), ErrorKind::Domain, "points: needs at least one point");
    const Eigen::Index d = points.front().size();
    detail::check_dim(d, "points");
    for (const auto& p : points) {
        require(p.size() == d, ErrorKind::DimensionMismatch, "points: point dimensions differ");
        detail::check_finite(p, "points");
    }
    return detail::wrap<Scalar>(shapes::FinitePointSet<Scalar>{std::move(points)}, d);
}

template <typename Scalar>
SetPtr<Scalar> make_translate(SetPtr<Scalar> inner, const Vector<Scalar>& shift)
{
    require(inner != nullptr, ErrorKind::Domain, "translate: missing inner set");
    require(shift.size() == inner->dim(), ErrorKind::DimensionMismatch, "translate: shift dimension differs");
    detail::check_finite(shift, "translate");
    const int d = inner->dim();
    return detail::wrap<Scalar>(shapes::Translate<Scalar>{std::move(inner), shift}, d);
}

// ---------------------------------------------------------------------------
// projection

namespace detail {

template <typename Scalar>
ProjectionResult<Scalar> single(Vector<Scalar> p, const Vector<Scalar>& x)
{
    ProjectionResult<Scalar> r;
    r.distance = (x - p).norm();
    r.all_minimizers = {p};
    r.canonical = std::move(p);
    return r;
}

template <typename Scalar>
void sort_lex(std::vector<Vector<Scalar>>& pts)
{
    std::sort(pts.begin(), pts.end(), [](const Vector<Scalar>& a, const Vector<Scalar>& b) { return lex_less(a, b); });
}

} // namespace detail

template <typename Scalar>
ProjectionResult<Scalar> project(const SetDescriptor<Scalar>& s, const PointArg<Scalar>& x);

template <typename Scalar>
ProjectionResult<Scalar> project(const SetPtr<Scalar>& s, const PointArg<Scalar>& x)
{
    return project(*s, x);
}

namespace detail {

template <typename Scalar>
struct Projector {
    const Vector<Scalar>& x;

    ProjectionResult<Scalar> operator()(const shapes::Halfspace<Scalar>& h) const
    {
        const Scalar viol = h.a.dot(x) - h.b;
        if (viol <= Scalar(0)) return single<Scalar>(x, x);
        return single<Scalar>(x - (viol / h.a.squaredNorm()) * h.a, x);
    }

    ProjectionResult<Scalar> operator()(const shapes::Hyperplane<Scalar>& h) const
    {
        const Scalar viol = h.a.dot(x) - h.b;
        return single<Scalar>(x - (viol / h.a.squaredNorm()) * h.a, x);
    }

    ProjectionResult<Scalar> operator()(const shapes::AffineSubspace<Scalar>& l) const
    {
        if (l.basis.cols() == 0) return single<Scalar>(l.anchor, x);
        return single<Scalar>(l.anchor + l.basis * (l.basis.transpose() * (x - l.anchor)), x);
    }

    ProjectionResult<Scalar> operator()(const shapes::Ball<Scalar>& b) const
    {
        const Vector<Scalar> v = x - b.center;
        const Scalar n = v.norm();
        if (n <= b.radius) return single<Scalar>(x, x);
        return single<Scalar>(b.center + (b.radius / n) * v, x);
    }

    ProjectionResult<Scalar> operator()(const shapes::Sphere<Scalar>& s) const
    {
        const Vector<Scalar> v = x - s.center;
        const Scalar n = v.norm();
        if (n > Scalar(0)) return single<Scalar>(s.center + (s.radius / n) * v, x);
        // Every point of the sphere is nearest; list the 2d axis points.
        ProjectionResult<Scalar> r;
        r.multivalued = true;
        r.distance = s.radius;
        const Eigen::Index d = x.size();
        r.canonical = s.center + s.radius * Vector<Scalar>::Unit(d, 0);
        for (Eigen::Index i = 0; i < d; ++i) {
            r.all_minimizers.push_back(s.center + s.radius * Vector<Scalar>::Unit(d, i));
            r.all_minimizers.push_back(s.center - s.radius * Vector<Scalar>::Unit(d, i));
        }
        return r;
    }

    ProjectionResult<Scalar> operator()(const shapes::Box<Scalar>& b) const
    {
        return single<Scalar>(x.cwiseMax(b.lower).cwiseMin(b.upper), x);
    }

    ProjectionResult<Scalar> operator()(const shapes::Orthant<Scalar>& o) const
    {
        Vector<Scalar> p = x;
        for (std::size_t i = 0; i < o.signs.size(); ++i) {
            const auto k = static_cast<Eigen::Index>(i);
            if (o.signs[i] > 0) p[k] = std::max(p[k], Scalar(0));
            if (o.signs[i] < 0) p[k] = std::min(p[k], Scalar(0));
        }
        return single<Scalar>(p, x);
    }

    ProjectionResult<Scalar> operator()(const shapes::PolyhedralCone<Scalar>& c) const
    {
        return single<Scalar>(project_onto_cone(c.generators, x), x);
    }

    ProjectionResult<Scalar> operator()(const shapes::Enlargement<Scalar>& e) const
    {
        const ProjectionResult<Scalar> inner = project(*e.inner, x);
        if (inner.distance <= e.tau) return single<Scalar>(x, x);
        auto push_out = [&](const Vector<Scalar>& q) -> Vector<Scalar> {
            const Vector<Scalar> v = x - q;
            return q + (e.tau / v.norm()) * v;
        };
        ProjectionResult<Scalar> r;
        r.distance = inner.distance - e.tau;
        r.multivalued = inner.multivalued;
        r.canonical = push_out(inner.canonical);
        for (const auto& q : inner.all_minimizers) r.all_minimizers.push_back(push_out(q));
        return r;
    }

    ProjectionResult<Scalar> operator()(const shapes::UnionOfSets<Scalar>& u) const
    {
        std::vector<ProjectionResult<Scalar>> parts;
        parts.reserve(u.members.size());
        Scalar best = std::numeric_limits<Scalar>::infinity();
        for (const auto& m : u.members) {
            parts.push_back(project(*m, x));
            best = std::min(best, parts.back().distance);
        }
        ProjectionResult<Scalar> r;
        r.distance = best;
        bool have_canonical = false;
        for (const auto& part : parts) {
            if (part.distance > best + Scalar(kTieTol)) continue;
            if (!have_canonical) {
                r.canonical = part.canonical;
                have_canonical = true;
            } else {
                r.multivalued = true;
            }
            r.multivalued = r.multivalued || part.multivalued;
            for (const auto& p : part.all_minimizers) r.all_minimizers.push_back(p);
        }
        return r;
    }

    ProjectionResult<Scalar> operator()(const shapes::FinitePointSet<Scalar>& f) const
    {
        Scalar best = std::numeric_limits<Scalar>::infinity();
        for (const auto& p : f.points) best = std::min(best, (x - p).norm());
        ProjectionResult<Scalar> r;
        r.distance = best;
        for (const auto& p : f.points)
            if ((x - p).norm() <= best + Scalar(kTieTol)) r.all_minimizers.push_back(p);
        sort_lex(r.all_minimizers);
        r.multivalued = r.all_minimizers.size() > 1;
        r.canonical = r.all_minimizers.front();
        return r;
    }

    ProjectionResult<Scalar> operator()(const shapes::Translate<Scalar>& t) const
    {
        ProjectionResult<Scalar> r = project(*t.inner, Vector<Scalar>(x - t.shift));
        r.canonical += t.shift;
        for (auto& p : r.all_minimizers) p += t.shift;
        return r;
    }
};

} // namespace detail

/// Nearest-point map. The canonical selection is the lexicographically smallest
/// enumerated minimizer, except at a sphere's center (center + r e_1) and for
/// unions (canonical point of the lowest-index nearest member).
template <typename Scalar>
ProjectionResult<Scalar> project(const SetDescriptor<Scalar>& s, const PointArg<Scalar>& x)
{
    require_same_dim(x, s.dim(), "project");
    require(x.allFinite(), ErrorKind::Domain, "project: non-finite point");
    return std::visit(detail::Projector<Scalar>{x}, s.shape());
}

template <typename Scalar>
Scalar distance(const SetDescriptor<Scalar>& s, const PointArg<Scalar>& x)
{
    return project(s, x).distance;
}

template <typename Scalar>
Scalar distance(const SetPtr<Scalar>& s, const PointArg<Scalar>& x)
{
    return project(*s, x).distance;
}

template <typename Scalar>
bool membership(const SetDescriptor<Scalar>& s, const PointArg<Scalar>& x, std::type_identity_t<Scalar> tol = Scalar(kMembershipTol))
{
    require(tol >= Scalar(0), ErrorKind::Domain, "membership: tolerance must be nonnegative");
    return distance(s, x) <= tol;
}

template <typename Scalar>
bool membership(const SetPtr<Scalar>& s, const PointArg<Scalar>& x, std::type_identity_t<Scalar> tol = Scalar(kMembershipTol))
{
    return membership(*s, x, tol);
}

// ---------------------------------------------------------------------------
// proximal normals

template <typename Scalar>
std::vector<Vector<Scalar>> normal_directions(const SetDescriptor<Scalar>& s, const PointArg<Scalar>& p);

namespace detail {

template <typename Scalar>
std::vector<Vector<Scalar>> signed_axes(Eigen::Index d)
{
    std::vector<Vector<Scalar>> out;
    for (Eigen::Index i = 0; i < d; ++i) {
        out.push_back(Vector<Scalar>::Unit(d, i));
        out.push_back(-Vector<Scalar>::Unit(d, i));
    }
    return out;
}

template <typename Scalar>
struct NormalFinder {
    const Vector<Scalar>& p;
    Scalar tol;

    std::vector<Vector<Scalar>> operator()(const shapes::Halfspace<Scalar>& h) const
    {
        const Scalar an = h.a.norm();
        if ((h.b - h.a.dot(p)) / an > tol) return {};
        return {h.a / an};
    }

    std::vector<Vector<Scalar>> operator()(const shapes::Hyperplane<Scalar>& h) const
    {
        const Vector<Scalar> u = h.a.normalized();
        return {u, -u};
    }

    std::vector<Vector<Scalar>> operator()(const shapes::AffineSubspace<Scalar>& l) const
    {
        const Matrix<Scalar> comp = null_space<Scalar>(Matrix<Scalar>(l.basis.transpose()), static_cast<int>(p.size()));
        std::vector<Vector<Scalar>> out;
        for (Eigen::Index j = 0; j < comp.cols(); ++j) {
            out.push_back(comp.col(j));
            out.push_back(-comp.col(j));
        }
        return out;
    }

    std::vector<Vector<Scalar>> operator()(const shapes::Ball<Scalar>& b) const
    {
        if (b.radius == Scalar(0)) return signed_axes<Scalar>(p.size());
        const Vector<Scalar> v = p - b.center;
        if (b.radius - v.norm() > tol) return {};
        return {v.normalized()};
    }

    std::vector<Vector<Scalar>> operator()(const shapes::Sphere<Scalar>& s) const
    {
        const Vector<Scalar> u = (p - s.center).normalized();
        return {u, -u};
    }

    std::vector<Vector<Scalar>> operator()(const shapes::Box<Scalar>& b) const
    {
        std::vector<Vector<Scalar>> out;
        const Eigen::Index d = p.size();
        for (Eigen::Index i = 0; i < d; ++i) {
            if (p[i] - b.lower[i] <= tol) out.push_back(-Vector<Scalar>::Unit(d, i));
            if (b.upper[i] - p[i] <= tol) out.push_back(Vector<Scalar>::Unit(d, i));
        }
        return out;
    }

    std::vector<Vector<Scalar>> operator()(const shapes::Orthant<Scalar>& o) const
    {
        std::vector<Vector<Scalar>> out;
        const Eigen::Index d = p.size();
        for (Eigen::Index i = 0; i < d; ++i) {
            const int sgn = o.signs[static_cast<std::size_t>(i)];
            if (sgn != 0 && std::abs(p[i]) <= tol) out.push_back(Scalar(-sgn) * Vector<Scalar>::Unit(d, i));
        }
        return out;
    }

    std::vector<Vector<Scalar>> operator()(const shapes::PolyhedralCone<Scalar>& c) const
    {
        // N_K(p) = K-polar intersected with p-perp = {y : G^T y <= 0, <-p, y> <= 0}.
        Matrix<Scalar> h(p.size(), c.generators.cols() + 1);
        h.leftCols(c.generators.cols()) = c.generators;
        h.col(c.generators.cols()) = -p;
        return inequality_cone_generators<Scalar>(h, static_cast<int>(p.size()));
    }

    std::vector<Vector<Scalar>> operator()(const shapes::Enlargement<Scalar>& e) const
    {
        if (e.tau == Scalar(0)) return normal_directions(*e.inner, p);
        const ProjectionResult<Scalar> inner = project(*e.inner, p);
        if (e.tau - inner.distance > tol) return {};
        const Vector<Scalar> u = (p - inner.canonical).normalized();
        for (const auto& q : inner.all_minimizers)
            if (((p - q).normalized() - u).norm() > Scalar(1e-9)) return {}; // several feet: only the zero normal
        return {u};
    }

    std::vector<Vector<Scalar>> operator()(const shapes::UnionOfSets<Scalar>&) const
    {
        throw Error(ErrorKind::UnsupportedSet, "proximal_normals: unions have no closed-form normal cone");
    }

    std::vector<Vector<Scalar>> operator()(const shapes::FinitePointSet<Scalar>&) const
    {
        return signed_axes<Scalar>(p.size());
    }

    std::vector<Vector<Scalar>> operator()(const shapes::Translate<Scalar>& t) const
    {
        return normal_directions(*t.inner, Vector<Scalar>(p - t.shift));
    }
};

} // namespace detail

/// Unit generators of the proximal normal cone of s at the member p. An empty
/// list means the cone is {0}.
template <typename Scalar>
std::vector<Vector<Scalar>> normal_directions(const SetDescriptor<Scalar>& s, const PointArg<Scalar>& p)
{
    require_same_dim(p, s.dim(), "proximal_normals");
    require(membership(s, p, Scalar(1e-8)), ErrorKind::Domain, "proximal_normals: base point is not in the set");
    return std::visit(detail::NormalFinder<Scalar>{p, Scalar(1e-9)}, s.shape());
}

template <typename Scalar>
std::vector<NormalSample<Scalar>> proximal_normals(const SetDescriptor<Scalar>& s, const PointArg<Scalar>& p,
                                                   int max_count = 64)
{
    require(max_count >= 0, ErrorKind::Domain, "proximal_normals: max_count must be nonnegative");
    std::vector<NormalSample<Scalar>> out;
    for (auto& u : normal_directions(s, p)) {
        if (static_cast<int>(out.size()) >= max_count) break;
        out.push_back({p, std::move(u)});
    }
    return out;
}

template <typename Scalar>
std::vector<NormalSample<Scalar>> proximal_normals(const SetPtr<Scalar>& s, const PointArg<Scalar>& p,
                                                   int max_count = 64)
{
    return proximal_normals(*s, p, max_count);
}

// ---------------------------------------------------------------------------
// misc

template <typename Scalar>
std::string kind_name(const SetDescriptor<Scalar>& s)
{
    static constexpr const char* names[] = {"halfspace", "hyperplane", "affine", "ball",        "sphere", "box",
                                            "orthant",   "cone",       "enlargement", "union", "points", "translate"};
    return names[s.shape().index()];
}

/// True for variants whose every member is convex (used to pick convex-case
/// defaults such as eps = 0).
template <typename Scalar>
bool is_convex(const SetDescriptor<Scalar>& s)
{
    return std::visit(
        [](const auto& v) -> bool {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, shapes::Sphere<Scalar>> || std::is_same_v<T, shapes::UnionOfSets<Scalar>>)
                return false;
            else if constexpr (std::is_same_v<T, shapes::FinitePointSet<Scalar>>)
                return v.points.size() == 1;
            else if constexpr (std::is_same_v<T, shapes::Enlargement<Scalar>> || std::is_same_v<T, shapes::Translate<Scalar>>)
                return is_convex(*v.inner);
            else
                return true;
        },
        s.shape());
}

} // namespace projlab
