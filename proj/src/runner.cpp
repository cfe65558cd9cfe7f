#include "projlab/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace projlab {

const char* to_string(StopReason r)
{
    switch (r) {
    case StopReason::Converged: return "Converged";
    case StopReason::Budget: return "Budget";
    case StopReason::Diverged: return "Diverged";
    }
    return "Unknown";
}

Trajectory run(const CyclicTuple<double>& ops, const Vec& x0, const std::vector<SetPtr<double>>& sets,
               const IntersectionDistance& dist_c, const RunOptions& opt)
{
    require(opt.max_cycles >= 1, ErrorKind::Domain, "run: max_cycles must be >= 1");
    require(opt.tol > 0.0, ErrorKind::Domain, "run: tol must be positive");
    require(x0.allFinite(), ErrorKind::Domain, "run: non-finite start point");
    for (const auto& s : sets) require_same_dim(x0, s->dim(), "run");

    const auto start = std::chrono::steady_clock::now();
    Trajectory t;
    t.cycle_length = static_cast<int>(ops.size());
    t.seed = opt.seed;
    t.dist_c_approximate = dist_c.approximate();

    auto record = [&](const Vec& x) {
        t.iterates.push_back(x);
        std::vector<double> row;
        row.reserve(sets.size());
        for (const auto& s : sets) row.push_back(distance(*s, x));
        t.set_distances.push_back(std::move(row));
        t.dist_c.push_back(dist_c(x));
    };

    record(x0);
    const long long budget = static_cast<long long>(opt.max_cycles) * t.cycle_length;
    t.stop = StopReason::Budget;
    for (long long n = 0;; ++n) {
        const Vec& x = t.iterates.back();
        if (!x.allFinite() || x.norm() > kDivergenceBound) {
            t.stop = StopReason::Diverged;
            break;
        }
        if (t.dist_c.back() <= opt.tol) {
            t.stop = StopReason::Converged;
            break;
        }
        if (n == budget) break;
        const int i = static_cast<int>(n % t.cycle_length);
        t.op_index.push_back(i);
        record(apply(ops[static_cast<std::size_t>(i)], x));
    }
    t.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return t;
}

RateFit fit_rlinear(const std::vector<double>& errors, double tail_fraction, double floor, int burn_in)
{
    const int n = static_cast<int>(errors.size());
    require(n >= 10, ErrorKind::InsufficientData, "fit_rlinear: needs at least 10 entries");
    require(tail_fraction > 0.0 && tail_fraction <= 1.0, ErrorKind::Domain, "fit_rlinear: tail_fraction must lie in (0, 1]");
    for (double e : errors)
        require(e >= 0.0 && std::isfinite(e), ErrorKind::Domain, "fit_rlinear: errors must be finite and nonnegative");

    RateFit fit;
    auto usable = [&](int lo) {
        std::vector<int> idx;
        for (int i = lo; i < n; ++i) {
            if (errors[static_cast<std::size_t>(i)] < floor)
                fit.censored = true;
            else
                idx.push_back(i);
        }
        return idx;
    };

    const int tail_start = n - static_cast<int>(std::ceil(tail_fraction * n));
    std::vector<int> idx = usable(std::max(burn_in, tail_start));
    if (idx.size() < 5) {
        // the floor cut the window short: fall back to the last uncensored entries
        std::vector<int> all = usable(0);
        if (all.size() >= 5) {
            const std::size_t keep = std::max<std::size_t>(5, static_cast<std::size_t>(std::ceil(tail_fraction * all.size())));
            idx.assign(all.end() - static_cast<std::ptrdiff_t>(keep), all.end());
        } else if (fit.censored) {
            fit.finite = true;
            fit.rho = 0.0;
            fit.sigma = errors.front();
            fit.points = static_cast<int>(all.size());
            fit.n0 = 0;
            fit.n1 = n - 1;
            return fit;
        } else {
            throw Error(ErrorKind::InsufficientData, "fit_rlinear: fewer than 5 usable entries");
        }
    }

    Eigen::MatrixXd A(static_cast<Eigen::Index>(idx.size()), 2);
    Eigen::VectorXd y(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t r = 0; r < idx.size(); ++r) {
        A(static_cast<Eigen::Index>(r), 0) = 1.0;
        A(static_cast<Eigen::Index>(r), 1) = idx[r];
        y[static_cast<Eigen::Index>(r)] = std::log(errors[static_cast<std::size_t>(idx[r])]);
    }
    const Eigen::Vector2d coef = A.colPivHouseholderQr().solve(y);
    const Eigen::VectorXd resid = y - A * coef;
    const double ss_tot = (y.array() - y.mean()).square().sum();
    fit.r2 = ss_tot > 0.0 ? 1.0 - resid.squaredNorm() / ss_tot : 1.0;
    fit.rho = std::clamp(std::exp(coef[1]), 0.0, 1.5);
    fit.sigma = std::exp(coef[0]);
    fit.n0 = idx.front();
    fit.n1 = idx.back();
    fit.points = static_cast<int>(idx.size());
    fit.nonconvergent = fit.rho >= 1.0 - 1e-12;
    return fit;
}

LimitErrors limit_errors(const Trajectory& traj)
{
    require(!traj.iterates.empty(), ErrorKind::InsufficientData, "limit_errors: empty trajectory");
    LimitErrors out;
    const Vec& xbar = traj.final();
    for (const auto& x : traj.iterates) out.errors.push_back((x - xbar).norm());
    // entries this close to the proxy limit say more about the proxy than the rate
    out.floor = std::max(kFitFloor, 1e6 * traj.dist_c.back());
    return out;
}

std::optional<CyclePattern> detect_cycle(const Trajectory& traj, double tol, int max_periods)
{
    if (traj.stop == StopReason::Converged) return std::nullopt;
    const int n = static_cast<int>(traj.size()) - 1;
    const int m = traj.cycle_length;
    for (int p = m; p <= max_periods * m && p <= n; p += m) {
        bool ok = true;
        for (int i = n - p; i <= n && ok; ++i)
            if (i - p >= 0 && (traj.iterates[static_cast<std::size_t>(i)] - traj.iterates[static_cast<std::size_t>(i - p)]).norm() > tol)
                ok = false;
        if (!ok || n - 2 * p < 0) continue;
        int start = n - p;
        while (start - 1 >= 0 && start - 1 + p <= n &&
               (traj.iterates[static_cast<std::size_t>(start - 1)] - traj.iterates[static_cast<std::size_t>(start - 1 + p)]).norm() <= tol)
            --start;
        CyclePattern pat;
        pat.period = p;
        pat.start = start;
        for (int i = start; i < start + p; ++i) pat.states.push_back(traj.iterates[static_cast<std::size_t>(i)]);
        return pat;
    }
    return std::nullopt;
}

int block_offset(const RateCertificate& cert)
{
    switch (cert.theorem) {
    case Theorem::Refined:
    case Theorem::CyclicOverRelaxed:
    case Theorem::CyclicProjections:
    case Theorem::SemiIntrepid:
    case Theorem::ConvexSemiIntrepid: return 1;
    default: return 0;
    }
}

KStepReport check_k_step_reduction(const Trajectory& traj, int k, double rho_bound, const std::optional<Ball>& certified,
                                   int offset)
{
    require(k >= 1, ErrorKind::Domain, "check_k_step_reduction: k must be >= 1");
    require(offset >= 0, ErrorKind::Domain, "check_k_step_reduction: offset must be >= 0");
    require(traj.size() >= static_cast<std::size_t>(2 * k + offset), ErrorKind::InsufficientData,
            "check_k_step_reduction: trajectory shorter than two blocks");
    KStepReport rep;
    rep.property = "k_step_reduction";
    rep.seed = traj.seed;
    rep.check_tol = 0.0; // the 1e-12 allowance is folded into the margin
    const auto o = static_cast<std::size_t>(offset);
    for (std::size_t b = 0; o + (b + 1) * static_cast<std::size_t>(k) < traj.size(); ++b) {
        const std::size_t i0 = o + b * static_cast<std::size_t>(k);
        const std::size_t i1 = i0 + static_cast<std::size_t>(k);
        if (certified && (traj.iterates[i0] - certified->center).norm() > certified->radius) {
            ++rep.blocks_skipped;
            continue;
        }
        const double d0 = traj.dist_c[i0];
        const double d1 = traj.dist_c[i1];
        if (d0 > 0.0) rep.worst_ratio = std::max(rep.worst_ratio, d1 / d0);
        rep.record(rho_bound * d0 + 1e-12 - d1, {traj.iterates[i0], traj.iterates[i1]});
    }
    if (rep.blocks_skipped > 0) rep.flags.push_back("blocks outside the certified ball were skipped");
    return rep;
}

CertificateComparison compare_certificate(const Trajectory& traj, const RateFit& fit, const RateCertificate& cert,
                                          double slack)
{
    require(cert.applicable, ErrorKind::Domain, "compare_certificate: certificate is not applicable");
    require(traj.stop == StopReason::Converged, ErrorKind::Domain, "compare_certificate: trajectory did not converge");
    CertificateComparison cmp;
    cmp.theorem = to_string(cert.theorem);
    cmp.rho_fit = fit.rho;
    cmp.rho_cert = cert.rho_iter;
    cmp.slack = slack;
    cmp.passed = fit.rho <= cert.rho_iter + slack;

    char buf[256];
    std::ostringstream os;
    std::snprintf(buf, sizeof buf, "%-20s %12s %12s %12s\n", "theorem", "rho_fit", "rho_cert", "rho_cert_cyc");
    os << buf;
    std::snprintf(buf, sizeof buf, "%-20s %12.6f %12.6f %12.6f\n", cmp.theorem.c_str(), fit.rho, cert.rho_iter,
                  cert.rho_cycle);
    os << buf;
    cmp.table = os.str();
    if (!cmp.passed) {
        throw Error(ErrorKind::CertificateViolated, "compare_certificate: fitted rate " + std::to_string(fit.rho) +
                                                        " exceeds the " + cmp.theorem + " bound " +
                                                        std::to_string(cert.rho_iter));
    }
    return cmp;
}

PropertyReport check_fejer_trace(const Trajectory& traj, const Vec& xbar)
{
    PropertyReport rep;
    rep.property = "fejer_trace";
    rep.seed = traj.seed;
    rep.check_tol = 1e-10;
    for (std::size_t n = 0; n + 1 < traj.size(); ++n) {
        const double a = (traj.iterates[n] - xbar).norm();
        const double b = (traj.iterates[n + 1] - xbar).norm();
        rep.record(a - b, {traj.iterates[n], traj.iterates[n + 1]});
    }
    return rep;
}

PropertyReport check_distance_order(const Trajectory& traj)
{
    PropertyReport rep;
    rep.property = "distance_order";
    rep.seed = traj.seed;
    rep.check_tol = 1e-12;
    for (std::size_t n = 0; n < traj.size(); ++n)
        for (double di : traj.set_distances[n]) rep.record(traj.dist_c[n] - di, {traj.iterates[n]});
    return rep;
}

PropertyReport check_envelope(const Trajectory& traj, const RateCertificate& cert, const Vec& w, double delta)
{
    PropertyReport rep;
    rep.property = "rlinear_envelope";
    rep.seed = traj.seed;
    rep.check_tol = 1e-12;
    if (!cert.applicable) {
        rep.flags.push_back("certificate not applicable");
        return rep;
    }
    const Vec& x0 = traj.iterates.front();
    if ((x0 - w).norm() > start_radius(cert, delta)) {
        rep.flags.push_back("start point outside the certified radius");
        return rep;
    }
    const Vec& xbar = traj.final();
    const auto o = std::min(static_cast<std::size_t>(block_offset(cert)), traj.size() - 1);
    const double scale = cert.sigma_factor * traj.dist_c[o];
    for (std::size_t n = o; n < traj.size(); ++n) {
        const double bound =
            scale * std::pow(cert.rho_block, static_cast<double>((n - o) / static_cast<std::size_t>(cert.k)));
        rep.record(bound - (traj.iterates[n] - xbar).norm(), {traj.iterates[n]});
    }
    return rep;
}

} // namespace projlab
