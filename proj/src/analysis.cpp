#include "projlab/analysis.hpp"

#include "projlab/polyhedral.hpp"
#include "projlab/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace projlab {

namespace {

constexpr int kMaxAttempts = 100000;
constexpr int kMinReferencePoints = 10;

void check_sampling_args(double delta, int samples, const char* where)
{
    require(delta > 0.0, ErrorKind::Domain, std::string(where) + ": delta must be positive");
    require(samples >= 0, ErrorKind::Domain, std::string(where) + ": samples must be nonnegative");
}

// Draws a member of s within B(w, delta), or nothing after the attempt budget.
class ReferenceSampler {
public:
    ReferenceSampler(const SetDescriptor<double>& s, const Vec& w, double delta) : s_(s), w_(w), delta_(delta) {}

    std::optional<Vec> draw(Rng& rng)
    {
        while (attempts_ < kMaxAttempts) {
            ++attempts_;
            Vec p = sample_member_near(s_, w_, delta_, rng);
            if ((p - w_).norm() <= delta_) return p;
        }
        return std::nullopt;
    }

private:
    const SetDescriptor<double>& s_;
    const Vec& w_;
    double delta_;
    int attempts_ = 0;
};

} // namespace

PropertyReport check_quasi_firm_fejer(const PointMap& T, const SetDescriptor<double>& refset, double gamma, double beta,
                                      const Vec& w, double delta, int samples, std::uint64_t seed)
{
    require(gamma >= 1.0, ErrorKind::Domain, "check_quasi_firm_fejer: gamma must be >= 1");
    require(beta >= 0.0, ErrorKind::Domain, "check_quasi_firm_fejer: beta must be >= 0");
    check_sampling_args(delta, samples, "check_quasi_firm_fejer");
    require_same_dim(w, refset.dim(), "check_quasi_firm_fejer");

    PropertyReport rep;
    rep.property = "quasi_firm_fejer";
    rep.seed = seed;
    rep.check_tol = kCheckTol;
    Rng rng(seed);
    ReferenceSampler refs(refset, w, delta);
    int drawn = 0;
    for (int i = 0; i < samples; ++i) {
        const Vec x = sample_ball(w, 0.5 * delta, rng);
        const auto xbar = refs.draw(rng);
        if (!xbar) break;
        ++drawn;
        const Vec xp = T(x);
        const double lhs = (xp - *xbar).squaredNorm() + beta * (x - xp).squaredNorm();
        const double rhs = gamma * (x - *xbar).squaredNorm();
        rep.record(rhs - lhs, {x, *xbar, xp});
    }
    if (drawn < samples) {
        require(drawn >= kMinReferencePoints, ErrorKind::SamplingFailure,
                "check_quasi_firm_fejer: too few reference points of the set near w");
        rep.flags.push_back("reference sampling exhausted");
    }
    return rep;
}

PropertyReport check_quasi_coercive(const PointMap& T, const SetDescriptor<double>& C, double nu, const Vec& w,
                                    double delta, int samples, std::uint64_t seed)
{
    require(nu > 0.0, ErrorKind::Domain, "check_quasi_coercive: nu must be positive");
    check_sampling_args(delta, samples, "check_quasi_coercive");
    require_same_dim(w, C.dim(), "check_quasi_coercive");

    PropertyReport rep;
    rep.property = "quasi_coercive";
    rep.seed = seed;
    rep.check_tol = kCheckTol;
    Rng rng(seed);
    for (int i = 0; i < samples; ++i) {
        const Vec x = sample_ball(w, 0.5 * delta, rng);
        const Vec xp = T(x);
        rep.record((x - xp).norm() - nu * distance(C, x), {x, xp});
    }
    return rep;
}

double eps_ratio_over(const SetDescriptor<double>& s, const std::vector<Vec>& members)
{
    double eps = 0.0;
    for (std::size_t i = 0; i < members.size(); ++i) {
        const auto normals = normal_directions(s, members[i]);
        if (normals.empty()) continue;
        for (std::size_t j = 0; j < members.size(); ++j) {
            const Vec chord = members[j] - members[i];
            const double len = chord.norm();
            if (len < 1e-9) continue;
            for (const auto& u : normals) eps = std::max(eps, u.dot(chord) / len);
        }
    }
    return std::clamp(eps, 0.0, 1.0);
}

RegularityEstimate estimate_eps_regularity(const SetDescriptor<double>& s, const Vec& w, double delta, int samples,
                                           std::uint64_t seed)
{
    check_sampling_args(delta, samples, "estimate_eps_regularity");
    require_same_dim(w, s.dim(), "estimate_eps_regularity");
    require(membership(s, w), ErrorKind::Domain, "estimate_eps_regularity: anchor is not in the set");

    RegularityEstimate est;
    est.kind = EstimateKind::EpsDelta;
    est.delta = delta;
    est.anchor = w;
    est.seed = seed;
    est.flags.push_back("sampled lower bound");
    Rng rng(seed);
    double eps = 0.0;
    for (int i = 0; i < samples; ++i) {
        const Vec x = sample_member_near(s, w, delta, rng);
        const Vec y = sample_member_near(s, w, delta, rng);
        const Vec chord = y - x;
        const double len = chord.norm();
        ++est.samples;
        if (len < 1e-9) continue;
        for (const auto& u : normal_directions(s, x)) {
            const double r = u.dot(chord) / len;
            if (r > eps) {
                eps = r;
                est.witness = {x, y, u};
            }
        }
    }
    est.value = std::clamp(eps, 0.0, 1.0);
    return est;
}

IntersectionDistance::IntersectionDistance(std::vector<SetPtr<double>> system, std::optional<SetPtr<double>> intersection)
    : system_(std::move(system)), intersection_(std::move(intersection))
{
    require(!system_.empty() || intersection_.has_value(), ErrorKind::Domain,
            "intersection distance: needs the system or an explicit intersection");
}

Vec IntersectionDistance::nearest(const Vec& x) const
{
    if (intersection_) return project(**intersection_, x).canonical;
    Vec y = x;
    for (int cycle = 0; cycle < 10000; ++cycle) {
        Vec prev = y;
        for (const auto& s : system_) y = project(*s, y).canonical;
        if ((y - prev).norm() <= 1e-12) break;
    }
    return y;
}

double IntersectionDistance::operator()(const Vec& x) const
{
    if (intersection_) return distance(**intersection_, x);
    return (x - nearest(x)).norm();
}

double linear_regularity_over(const std::vector<SetPtr<double>>& system, const IntersectionDistance& dist_c,
                              const std::vector<Vec>& points)
{
    double kappa = 0.0;
    for (const auto& x : points) {
        double dmax = 0.0;
        for (const auto& s : system) dmax = std::max(dmax, distance(*s, x));
        if (dmax < 1e-12) continue;
        kappa = std::max(kappa, dist_c(x) / dmax);
    }
    return kappa;
}

RegularityEstimate estimate_linear_regularity(const std::vector<SetPtr<double>>& system,
                                              const IntersectionDistance& dist_c, const Vec& w, double delta,
                                              int samples, std::uint64_t seed)
{
    check_sampling_args(delta, samples, "estimate_linear_regularity");
    require(!system.empty(), ErrorKind::Domain, "estimate_linear_regularity: empty system");
    for (const auto& s : system) {
        require_same_dim(w, s->dim(), "estimate_linear_regularity");
        require(membership(*s, w), ErrorKind::Domain, "estimate_linear_regularity: anchor is not in every set");
    }

    RegularityEstimate est;
    est.kind = EstimateKind::LinearRegularity;
    est.delta = delta;
    est.anchor = w;
    est.seed = seed;
    est.flags.push_back("sampled lower bound");
    if (dist_c.approximate()) est.flags.push_back("approximate intersection distance");
    Rng rng(seed);
    double kappa = 0.0;
    for (int i = 0; i < samples; ++i) {
        const Vec x = sample_ball(w, 0.5 * delta, rng);
        ++est.samples;
        double dmax = 0.0;
        for (const auto& s : system) dmax = std::max(dmax, distance(*s, x));
        if (dmax < 1e-12) continue;
        const double r = dist_c(x) / dmax;
        if (r > kappa) {
            kappa = r;
            est.witness = {x};
        }
    }
    // Every point off C has ratio >= 1; the modulus is never below 1.
    est.value = std::max(kappa, 1.0);
    return est;
}

namespace {

std::vector<Vec> random_cone_directions(const std::vector<Vec>& gens, int extra, Rng& rng)
{
    std::vector<Vec> out = gens;
    if (gens.size() < 2) return out;
    std::exponential_distribution<double> weight(1.0);
    for (int i = 0; i < extra; ++i) {
        Vec y = Vec::Zero(gens.front().size());
        for (const auto& g : gens) y += weight(rng) * g;
        if (y.norm() > 1e-12) out.push_back(y.normalized());
    }
    return out;
}

} // namespace

RegularityEstimate estimate_theta_bar(const SetDescriptor<double>& A, const SetDescriptor<double>& B, const Vec& w,
                                      int samples, std::uint64_t seed)
{
    require(samples >= 0, ErrorKind::Domain, "estimate_theta_bar: samples must be nonnegative");
    RegularityEstimate est;
    est.kind = EstimateKind::ThetaBar;
    est.anchor = w;
    est.seed = seed;
    const auto na = normal_directions(A, w);
    const auto nb = normal_directions(B, w);
    if (na.empty() || nb.empty()) {
        est.value = 0.0;
        est.flags.push_back("trivial normal cone");
        return est;
    }
    Rng rng(seed);
    const auto us = random_cone_directions(na, samples, rng);
    const auto vs = random_cone_directions(nb, samples, rng);
    double best = -1.0;
    for (const auto& u : us)
        for (const auto& v : vs) {
            const double ip = -u.dot(v);
            if (ip > best) {
                best = ip;
                est.witness = {u, Vec(-v)};
            }
        }
    est.samples = static_cast<int>(us.size() * vs.size());
    est.value = std::clamp(best, -1.0, 1.0);
    return est;
}

RegularityEstimate check_strong_regularity(const std::vector<SetPtr<double>>& system, const Vec& w, double delta,
                                           int samples, std::uint64_t seed)
{
    check_sampling_args(delta, samples, "check_strong_regularity");
    require(!system.empty(), ErrorKind::Domain, "check_strong_regularity: empty system");
    for (const auto& s : system) {
        require_same_dim(w, s->dim(), "check_strong_regularity");
        require(membership(*s, w), ErrorKind::Domain, "check_strong_regularity: anchor is not in every set");
    }

    RegularityEstimate est;
    est.kind = EstimateKind::StrongRegularity;
    est.delta = delta;
    est.anchor = w;
    est.seed = seed;
    Rng rng(seed);
    double zeta = std::numeric_limits<double>::infinity();

    // The anchor tuple first, then sampled base points near w.
    for (int t = 0; t <= samples; ++t) {
        std::vector<Vec> dirs;
        for (const auto& s : system) {
            const Vec x = t == 0 ? w : sample_member_near(*s, w, delta, rng);
            for (auto& u : normal_directions(*s, x)) dirs.push_back(std::move(u));
        }
        ++est.samples;
        if (dirs.empty()) continue;
        require(dirs.size() <= 16, ErrorKind::UnsupportedSet, "check_strong_regularity: too many normal generators");
        Mat pts(w.size(), static_cast<Eigen::Index>(dirs.size()));
        for (std::size_t j = 0; j < dirs.size(); ++j) pts.col(static_cast<Eigen::Index>(j)) = dirs[j];
        const auto hull = min_norm_in_hull<double>(pts);
        if (hull.norm < zeta) {
            zeta = hull.norm;
            est.witness = {hull.point};
        }
    }
    if (!std::isfinite(zeta)) {
        zeta = 1.0;
        est.flags.push_back("no nonzero normals sampled");
    }
    est.value = zeta;
    est.holds = zeta > kStrongTol;
    return est;
}

PropertyReport check_injectable(const SetDescriptor<double>& s, double tau, const Vec& w, double delta, int samples,
                                std::uint64_t seed)
{
    require(tau >= 0.0, ErrorKind::Domain, "check_injectable: tau must be nonnegative");
    check_sampling_args(delta, samples, "check_injectable");
    require_same_dim(w, s.dim(), "check_injectable");

    PropertyReport rep;
    rep.property = "injectable";
    rep.seed = seed;
    rep.check_tol = kCheckTol;
    Rng rng(seed);
    constexpr int kSegmentPoints = 20;
    for (int i = 0; i < samples; ++i) {
        const Vec x = sample_ball(w, delta, rng);
        const Vec p = project(s, x).canonical;
        const double gap = (p - x).norm();
        if (gap == 0.0) {
            rep.record(0.0, {x});
            continue;
        }
        const Vec dir = (p - x) / gap;
        double worst = 0.0;
        Vec worst_pt = p;
        for (int k = 0; k < kSegmentPoints; ++k) {
            const Vec q = p + (tau * k / (kSegmentPoints - 1)) * dir;
            const double d = distance(s, q);
            if (d > worst) {
                worst = d;
                worst_pt = q;
            }
        }
        rep.record(-worst, {x, p, worst_pt});
    }
    return rep;
}

PropertyReport is_obtuse_cone(const SetDescriptor<double>& s, int samples, std::uint64_t seed)
{
    require(samples >= 0, ErrorKind::Domain, "is_obtuse_cone: samples must be nonnegative");
    const SetDescriptor<double>* base = &s;
    while (const auto* t = base->as<shapes::Translate<double>>()) base = t->inner.get();

    const Eigen::Index d = s.dim();
    Mat gens;
    if (const auto* o = base->as<shapes::Orthant<double>>()) {
        std::vector<Vec> cols;
        for (Eigen::Index i = 0; i < d; ++i) {
            const int sgn = o->signs[static_cast<std::size_t>(i)];
            if (sgn != 0) {
                cols.push_back(sgn * Vec::Unit(d, i));
            } else {
                cols.push_back(Vec::Unit(d, i));
                cols.push_back(-Vec::Unit(d, i));
            }
        }
        gens.resize(d, static_cast<Eigen::Index>(cols.size()));
        for (std::size_t j = 0; j < cols.size(); ++j) gens.col(static_cast<Eigen::Index>(j)) = cols[j];
    } else if (const auto* c = base->as<shapes::PolyhedralCone<double>>()) {
        gens = c->generators;
    } else {
        throw Error(ErrorKind::UnsupportedSet, "is_obtuse_cone: needs an orthant or polyhedral cone");
    }

    PropertyReport rep;
    rep.property = "obtuse_cone";
    rep.seed = seed;
    rep.check_tol = kCheckTol;
    // K = cone(gens); its polar is {y : gens^T y <= 0}.
    const auto polar = inequality_cone_generators<double>(gens, static_cast<int>(d));
    Rng rng(seed);
    const auto dirs = random_cone_directions(polar, samples, rng);
    for (const auto& y : dirs) {
        const Vec neg = -y;
        const double miss = (neg - project_onto_cone<double>(gens, neg)).norm();
        rep.record(-miss, {Vec(y)});
    }
    if (polar.empty()) rep.flags.push_back("polar cone is {0}");
    return rep;
}

} // namespace projlab
