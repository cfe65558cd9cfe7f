#pragma once

// Small exact routines for finitely generated cones and convex hulls at desk
// scale (a handful of generators in dimension <= 16). Everything here works by
// enumerating faces, so cost is exponential in the generator count.

#include "projlab/core.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <vector>

namespace projlab {

/// Calls f(indices) for every k-subset of {0, ..., n-1} in lexicographic order.
inline void for_each_combination(int n, int k, const std::function<void(const std::vector<int>&)>& f)
{
    if (k < 0 || k > n) return;
    std::vector<int> idx(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
    while (true) {
        f(idx);
        int i = k - 1;
        while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
        if (i < 0) return;
        ++idx[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
}

template <typename Scalar>
Matrix<Scalar> select_columns(const Matrix<Scalar>& m, const std::vector<int>& cols)
{
    Matrix<Scalar> out(m.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = m.col(cols[j]);
    return out;
}

/// Orthonormal basis of the column span, by twice-iterated modified
/// Gram-Schmidt. A column is dropped when its residual falls below
/// rank_tol times its original norm.
template <typename Scalar>
Matrix<Scalar> orthonormal_basis(const Matrix<Scalar>& directions, Scalar rank_tol = Scalar(1e-9))
{
    const Eigen::Index d = directions.rows();
    std::vector<Vector<Scalar>> kept;
    for (Eigen::Index j = 0; j < directions.cols(); ++j) {
        Vector<Scalar> v = directions.col(j);
        const Scalar n0 = v.norm();
        if (!(n0 > Scalar(0))) continue;
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& q : kept) v -= q.dot(v) * q;
        const Scalar n1 = v.norm();
        if (n1 > rank_tol * n0 && n1 > std::numeric_limits<Scalar>::min()) kept.push_back(v / n1);
    }
    Matrix<Scalar> basis(d, static_cast<Eigen::Index>(kept.size()));
    for (std::size_t j = 0; j < kept.size(); ++j) basis.col(static_cast<Eigen::Index>(j)) = kept[j];
    return basis;
}

/// Orthonormal basis of {y : rows * y = 0}.
template <typename Scalar>
Matrix<Scalar> null_space(const Matrix<Scalar>& rows, int dim, Scalar tol = Scalar(1e-10))
{
    if (rows.rows() == 0) return Matrix<Scalar>::Identity(dim, dim);
    Eigen::JacobiSVD<Matrix<Scalar>> svd(rows, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const Scalar smax = sv.size() > 0 ? sv.maxCoeff() : Scalar(0);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv[i] > tol * std::max(Scalar(1), smax)) ++rank;
    return svd.matrixV().rightCols(dim - rank);
}

namespace detail {

template <typename Scalar>
void push_unique_direction(std::vector<Vector<Scalar>>& out, const Vector<Scalar>& y, Scalar tol = Scalar(1e-9))
{
    for (const auto& z : out)
        if ((z - y).norm() <= tol) return;
    out.push_back(y);
}

} // namespace detail

/// Unit generators of the polyhedral cone {y : <h_j, y> <= 0 for every column h_j}.
/// Returns +/- a basis of the lineality space plus the extreme rays of the
/// pointed remainder. An empty result means the cone is {0}.
template <typename Scalar>
std::vector<Vector<Scalar>> inequality_cone_generators(const Matrix<Scalar>& normals, int dim)
{
    std::vector<int> live;
    for (Eigen::Index j = 0; j < normals.cols(); ++j)
        if (normals.col(j).norm() > Scalar(0)) live.push_back(static_cast<int>(j));
    Matrix<Scalar> h(dim, static_cast<Eigen::Index>(live.size()));
    for (std::size_t j = 0; j < live.size(); ++j)
        h.col(static_cast<Eigen::Index>(j)) = normals.col(live[j]).normalized();

    std::vector<Vector<Scalar>> gens;
    const Matrix<Scalar> lineality = null_space<Scalar>(h.transpose(), dim);
    for (Eigen::Index j = 0; j < lineality.cols(); ++j) {
        detail::push_unique_direction<Scalar>(gens, lineality.col(j));
        detail::push_unique_direction<Scalar>(gens, -lineality.col(j));
    }
    const int rank = dim - static_cast<int>(lineality.cols());
    if (rank == 0) return gens;

    const Scalar feas_tol = Scalar(1e-10);
    for_each_combination(static_cast<int>(h.cols()), rank - 1, [&](const std::vector<int>& subset) {
        Matrix<Scalar> m(static_cast<Eigen::Index>(subset.size()) + lineality.cols(), dim);
        for (std::size_t i = 0; i < subset.size(); ++i)
            m.row(static_cast<Eigen::Index>(i)) = h.col(subset[i]).transpose();
        if (lineality.cols() > 0) m.bottomRows(lineality.cols()) = lineality.transpose();
        const Matrix<Scalar> ray = null_space<Scalar>(m, dim);
        if (ray.cols() != 1) return;
        for (Scalar sign : {Scalar(1), Scalar(-1)}) {
            const Vector<Scalar> y = sign * ray.col(0).normalized();
            if (h.cols() == 0 || (h.transpose() * y).maxCoeff() <= feas_tol) detail::push_unique_direction<Scalar>(gens, y);
        }
    });
    return gens;
}

/// Euclidean projection onto cone(generators) by exhaustive face enumeration.
/// The minimizer lies in the relative interior of a face spanned by some
/// linearly independent generator subset, where it coincides with the
/// orthogonal projection onto that subset's span.
template <typename Scalar>
Vector<Scalar> project_onto_cone(const Matrix<Scalar>& generators, const Vector<Scalar>& x)
{
    const int k = static_cast<int>(generators.cols());
    Vector<Scalar> best = Vector<Scalar>::Zero(x.size());
    Scalar best_dist = x.norm();
    const Scalar coeff_tol = Scalar(1e-12);
    for (unsigned mask = 1; mask < (1u << k); ++mask) {
        std::vector<int> cols;
        for (int j = 0; j < k; ++j)
            if (mask & (1u << j)) cols.push_back(j);
        if (static_cast<Eigen::Index>(cols.size()) > x.size()) continue;
        const Matrix<Scalar> gs = select_columns(generators, cols);
        Eigen::ColPivHouseholderQR<Matrix<Scalar>> qr(gs);
        qr.setThreshold(Scalar(1e-10));
        if (qr.rank() != static_cast<Eigen::Index>(cols.size())) continue;
        const Vector<Scalar> c = qr.solve(x);
        if (c.minCoeff() < -coeff_tol * std::max(Scalar(1), c.cwiseAbs().maxCoeff())) continue;
        const Vector<Scalar> p = gs * c.cwiseMax(Scalar(0));
        const Scalar dist = (x - p).norm();
        if (dist < best_dist) {
            best_dist = dist;
            best = p;
        }
    }
    return best;
}

template <typename Scalar>
struct HullMinNorm {
    Scalar norm = Scalar(0);
    Vector<Scalar> weights; ///< convex weights, one per input column
    Vector<Scalar> point;
};

/// Minimum-norm point of the convex hull of the columns of `points`, exact by
/// enumeration of affinely independent subsets.
template <typename Scalar>
HullMinNorm<Scalar> min_norm_in_hull(const Matrix<Scalar>& points)
{
    const int n = static_cast<int>(points.cols());
    const int d = static_cast<int>(points.rows());
    require(n >= 1, ErrorKind::Domain, "min_norm_in_hull: empty point set");
    require(n <= 16, ErrorKind::Domain, "min_norm_in_hull: at most 16 points supported");
    HullMinNorm<Scalar> best;
    best.norm = std::numeric_limits<Scalar>::infinity();
    const Scalar weight_tol = Scalar(1e-12);
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        std::vector<int> cols;
        for (int j = 0; j < n; ++j)
            if (mask & (1u << j)) cols.push_back(j);
        const int s = static_cast<int>(cols.size());
        if (s > d + 1) continue;
        const Matrix<Scalar> ps = select_columns(points, cols);
        Matrix<Scalar> kkt = Matrix<Scalar>::Zero(s + 1, s + 1);
        kkt.topLeftCorner(s, s) = ps.transpose() * ps;
        kkt.block(0, s, s, 1).setOnes();
        kkt.block(s, 0, 1, s).setOnes();
        Vector<Scalar> rhs = Vector<Scalar>::Zero(s + 1);
        rhs[s] = Scalar(1);
        Eigen::FullPivLU<Matrix<Scalar>> lu(kkt);
        lu.setThreshold(Scalar(1e-12));
        if (!lu.isInvertible()) continue;
        const Vector<Scalar> sol = lu.solve(rhs);
        const Vector<Scalar> c = sol.head(s);
        if (c.minCoeff() < -weight_tol) continue;
        const Vector<Scalar> p = ps * c;
        const Scalar value = p.norm();
        if (value < best.norm) {
            best.norm = value;
            best.point = p;
            best.weights = Vector<Scalar>::Zero(n);
            for (int i = 0; i < s; ++i) best.weights[cols[static_cast<std::size_t>(i)]] = c[i];
        }
    }
    return best;
}

} // namespace projlab
