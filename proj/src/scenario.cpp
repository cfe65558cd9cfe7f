#include "projlab/scenario.hpp"

#include "projlab/affine.hpp"
#include "projlab/analysis.hpp"
#include "projlab/rates.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace projlab {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream)
{
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace {

// seed streams
constexpr std::uint64_t kEpsStream = 100;
constexpr std::uint64_t kKappaStream = 200;
constexpr std::uint64_t kThetaStream = 300;
constexpr std::uint64_t kCheckStream = 1000;

json witness_json(const std::vector<Vec>& pts)
{
    json out = json::array();
    for (const auto& p : pts) out.push_back(vec_to_json(p));
    return out;
}

json report_json(const PropertyReport& r)
{
    return {{"property", r.property},
            {"samples", r.samples},
            {"violations", r.violations},
            {"worst_margin", r.worst_margin},
            {"max_abs_margin", r.max_abs_margin},
            {"check_tol", r.check_tol},
            {"seed", r.seed},
            {"flags", r.flags},
            {"witness", witness_json(r.witness)}};
}

json estimate_json(const RegularityEstimate& e)
{
    return {{"kind", to_string(e.kind)}, {"value", e.value},     {"delta", e.delta}, {"samples", e.samples},
            {"seed", e.seed},            {"holds", e.holds},     {"flags", e.flags}, {"witness", witness_json(e.witness)}};
}

json certificate_json(const std::string& name, const RateCertificate& c)
{
    return {{"name", name},
            {"theorem", to_string(c.theorem)},
            {"provenance", to_string(c.provenance)},
            {"gammas", c.gammas},
            {"betas", c.betas},
            {"params", c.params},
            {"J", c.J},
            {"eps", c.eps},
            {"kappa", c.kappa},
            {"nu", c.nu},
            {"m", c.m},
            {"k", c.k},
            {"Gamma", c.Gamma},
            {"bracket", c.bracket},
            {"rho_block", c.rho_block},
            {"rho_iter", c.rho_iter},
            {"rho_cycle", c.rho_cycle},
            {"applicable", c.applicable},
            {"delta0_ratio", c.delta0_ratio},
            {"start_ratio", c.start_ratio},
            {"sigma_factor", c.sigma_factor}};
}

struct Constants {
    std::vector<std::optional<double>> eps; ///< per set
    std::optional<double> kappa;
    std::optional<double> theta;
};

class Execution {
public:
    explicit Execution(const ScenarioConfig& c) : c_(c), dist_(c.sets, c.intersection)
    {
        out_.name = c.name;
        auto& r = out_.report;
        r["scenario"] = {{"config", to_json(c)}};
        r["constants"] = json::object();
        r["certificates"] = json::array();
        r["fit"] = nullptr;
        r["comparisons"] = json::array();
        r["checks"] = json::array();
        k_.eps.assign(c.sets.size(), std::nullopt);
    }

    ScenarioOutcome run()
    {
        estimate_constants();
        build_certificates();
        if (c_.runs()) {
            iterate();
            fit();
            compare();
        }
        const json& checks = c_.analyses["checks"];
        for (std::size_t i = 0; i < checks.size(); ++i) property_check(checks[i], i);
        if (c_.runs()) {
            trajectory_checks();
            affine();
            expectations();
            out_.trajectory = std::move(traj_);
        }
        return std::move(out_);
    }

private:
    const Vec& w() const { return c_.anchor; }

    void add_check(const std::string& name, const std::string& kind, bool passed, json details)
    {
        out_.report["checks"].push_back({{"name", name}, {"kind", kind}, {"passed", passed}, {"details", std::move(details)}});
        if (!passed) out_.failures.push_back(name);
    }

    // ------------------------------------------------------------------ constants

    void estimate_constants()
    {
        const json& est = c_.analyses["estimate"];
        const int samples = est["samples"];
        const double delta = est["delta"];
        json& out = out_.report["constants"];
        if (est["eps"].get<bool>()) {
            out["eps"] = json::array();
            for (std::size_t i = 0; i < c_.sets.size(); ++i) {
                try {
                    auto e = estimate_eps_regularity(*c_.sets[i], w(), delta, samples, derive_seed(c_.seed, kEpsStream + i));
                    k_.eps[i] = e.value;
                    out["eps"].push_back(estimate_json(e));
                } catch (const Error& e) {
                    out["eps"].push_back({{"error", e.what()}});
                    add_check("estimate.eps[" + std::to_string(i) + "]", "estimate", false, {{"error", e.what()}});
                }
            }
        }
        if (est["kappa"].get<bool>()) {
            try {
                auto e = estimate_linear_regularity(c_.sets, dist_, w(), delta, samples, derive_seed(c_.seed, kKappaStream));
                k_.kappa = e.value;
                out["kappa"] = estimate_json(e);
            } catch (const Error& e) {
                out["kappa"] = {{"error", e.what()}};
                add_check("estimate.kappa", "estimate", false, {{"error", e.what()}});
            }
        }
        if (est["theta_bar"].get<bool>()) {
            try {
                auto e = estimate_theta_bar(*c_.sets[0], *c_.sets[1], w(), samples, derive_seed(c_.seed, kThetaStream));
                k_.theta = e.value;
                out["theta_bar"] = estimate_json(e);
            } catch (const Error& e) {
                out["theta_bar"] = {{"error", e.what()}};
                add_check("estimate.theta_bar", "estimate", false, {{"error", e.what()}});
            }
        }
    }

    double estimated(const std::optional<double>& v, const char* what) const
    {
        if (!v) throw Error(ErrorKind::InsufficientData, std::string("the ") + what + " estimate is unavailable");
        return *v;
    }

    // eps for one set: the configured number, or that set's estimate
    double eps_for(const json& spec, std::size_t set, bool& empirical) const
    {
        if (spec.is_number()) return spec.get<double>();
        empirical = true;
        return estimated(k_.eps[set], "eps");
    }

    // eps for a whole system: the number, or the largest estimate
    double eps_for_all(const json& spec, bool& empirical) const
    {
        if (spec.is_number()) return spec.get<double>();
        double e = 0.0;
        for (std::size_t i = 0; i < c_.sets.size(); ++i) e = std::max(e, eps_for(spec, i, empirical));
        return e;
    }

    double kappa_for(const json& spec, bool& empirical) const
    {
        if (spec.is_number()) return spec.get<double>();
        empirical = true;
        return estimated(k_.kappa, "kappa");
    }

    // ------------------------------------------------------------------ certificates

    RateCertificate build(const json& s, bool& empirical) const
    {
        const std::string th = s["theorem"];
        auto nums = [&](const char* key) { return s[key].get<std::vector<double>>(); };
        const double kappa = kappa_for(s["kappa"], empirical);

        if (th == "cyclic-relaxed") return rate_cyclic_relaxed(nums("lambdas"), eps_for_all(s["eps"], empirical), kappa);
        if (th == "cyclic-overrelaxed")
            return rate_cyclic_overrelaxed(nums("lambdas"), eps_for_all(s["eps"], empirical), kappa);
        if (th == "convex-cyclic") return rate_convex_cyclic(nums("lambdas"), kappa);
        if (th == "cyclic-projections") return rate_cyclic_projections(s["m"], eps_for_all(s["eps"], empirical), kappa);
        if (th == "semi-intrepid")
            return rate_cyclic_semi_intrepid(nums("alphas"), eps_for_all(s["eps"], empirical), kappa);
        if (th == "convex-semi-intrepid") return rate_convex_semi_intrepid(nums("alphas"), kappa);

        std::vector<double> gammas, betas;
        if (s.contains("gammas")) {
            gammas = nums("gammas");
            betas = nums("betas");
        } else {
            for (const auto& op : c_.operators) {
                FejerConstants fc;
                if (op.type == "relaxed") {
                    fc = relaxed_projector_constants(op.lambda, eps_for(s["eps"], static_cast<std::size_t>(op.set), empirical));
                } else {
                    fc = dr_constants(op.lambda, op.mu, op.alpha, eps_for(s["eps"], static_cast<std::size_t>(op.a), empirical),
                                      eps_for(s["eps"], static_cast<std::size_t>(op.b), empirical));
                }
                gammas.push_back(fc.gamma);
                betas.push_back(fc.beta);
            }
        }
        if (th == "refined") return rate_refined(gammas, betas, kappa);
        if (th == "dist-qff") return rate_dist_qff(gammas, betas, s["nu"], kappa);
        if (th == "dist-qf") {
            const int j = s["j"];
            require(j < static_cast<int>(betas.size()), ErrorKind::Domain, "dist-qf: j out of range");
            std::vector<double> rest;
            for (std::size_t i = 0; i < betas.size(); ++i)
                if (static_cast<int>(i) != j) rest.push_back(betas[i]);
            return rate_dist_qf(gammas, rest, j, s["nu"], kappa);
        }
        // cyclic-dr
        double nu = 0.0;
        if (s["nu"].is_number()) {
            nu = s["nu"];
        } else {
            empirical = true;
            nu = std::numeric_limits<double>::infinity();
            for (const auto& op : c_.operators)
                nu = std::min(nu, dr_coercivity(op.lambda, op.mu, op.alpha, estimated(k_.theta, "theta_bar"),
                                                estimated(k_.kappa, "kappa")));
            nu = std::min(nu, 1.0);
        }
        return rate_cyclic_dr(gammas, betas, nu, kappa);
    }

    void build_certificates()
    {
        for (const auto& spec : c_.analyses["certificates"]) {
            const std::string name = spec["name"];
            bool empirical = false;
            try {
                RateCertificate cert = build(spec, empirical);
                if (empirical) cert.provenance = Provenance::Empirical;
                json j = certificate_json(name, cert);
                j["start_radius"] = start_radius(cert, c_.delta);
                out_.report["certificates"].push_back(std::move(j));
                certs_.push_back({spec, cert});
            } catch (const Error& e) {
                out_.report["certificates"].push_back({{"name", name}, {"theorem", spec["theorem"]}, {"error", e.what()}});
                add_check("certificate." + name, "certificate", false, {{"error", e.what()}});
            }
        }
    }

    // ------------------------------------------------------------------ run, fit, compare

    void iterate()
    {
        RunOptions opt;
        opt.max_cycles = c_.max_cycles;
        opt.tol = c_.tol;
        opt.seed = c_.seed;
        traj_ = projlab::run(build_cycle(c_), *c_.x0, c_.sets, dist_, opt);
        const Trajectory& t = *traj_;
        json run = {{"stop", to_string(t.stop)},
                    {"iterations", t.size() - 1},
                    {"cycle_length", t.cycle_length},
                    {"final", vec_to_json(t.final())},
                    {"final_dist_c", t.dist_c.back()},
                    {"dist_c_approximate", t.dist_c_approximate},
                    {"wall_seconds", t.wall_seconds}};
        cycle_ = detect_cycle(t);
        if (cycle_) {
            json states = json::array();
            for (const auto& s : cycle_->states) states.push_back(vec_to_json(s));
            run["cycle"] = {{"period", cycle_->period}, {"start", cycle_->start}, {"states", states}};
        } else {
            run["cycle"] = nullptr;
        }
        out_.report["scenario"]["run"] = std::move(run);
        const bool expects_divergence = c_.expect.contains("stop") && c_.expect["stop"] == "Diverged";
        if (t.stop == StopReason::Diverged && !expects_divergence)
            add_check("run.diverged", "run", false, {{"final_norm", t.final().norm()}});
    }

    void fit()
    {
        const json& f = c_.analyses["fit"];
        if (f.is_null()) return;
        const Trajectory& t = *traj_;
        json out;
        try {
            double floor = kFitFloor;
            std::vector<double> errors;
            if (t.stop == StopReason::Converged) {
                LimitErrors le = limit_errors(t);
                floor = le.floor;
                errors = std::move(le.errors);
                out["error_model"] = "distance to final iterate";
            } else {
                errors = t.dist_c;
                out["error_model"] = "distance to intersection";
            }
            // fit at cycle boundaries: within a cycle the error can stall (a
            // reflection that leaves d_C unchanged), which biases a per-step fit
            const int m = std::max(1, t.cycle_length);
            std::vector<double> boundary;
            for (std::size_t n = 0; n < errors.size(); n += static_cast<std::size_t>(m)) boundary.push_back(errors[n]);
            RateFit rf = fit_rlinear(boundary, f["tail_fraction"], floor);
            rf.rho = std::pow(rf.rho, 1.0 / m);
            rf.n0 *= m;
            rf.n1 *= m;
            out["sampling"] = "cycle boundaries";
            fit_ = rf;
            out["rho"] = rf.rho;
            out["rho_cycle"] = std::pow(rf.rho, t.cycle_length);
            out["sigma"] = rf.sigma;
            out["window"] = {rf.n0, rf.n1};
            out["points"] = rf.points;
            out["r2"] = rf.r2;
            out["floor"] = floor;
            out["censored"] = rf.censored;
            out["nonconvergent"] = rf.nonconvergent;
            out["finite"] = rf.finite;
        } catch (const Error& e) {
            out["error"] = e.what();
            add_check("fit", "fit", false, {{"error", e.what()}});
        }
        out_.report["fit"] = std::move(out);
    }

    void compare()
    {
        const Trajectory& t = *traj_;
        const double slack = c_.analyses["fit"].is_null() ? 0.02 : c_.analyses["fit"]["slack"].get<double>();
        for (const auto& [spec, cert] : certs_) {
            const std::string name = spec["name"];
            if (spec["compare"].get<bool>()) {
                json row = {{"name", name}, {"theorem", to_string(cert.theorem)}, {"rho_cert", cert.rho_iter},
                            {"rho_cert_cycle", cert.rho_cycle}, {"slack", slack}};
                if (!fit_) {
                    row["status"] = "skipped";
                    row["reason"] = "no rate fit";
                } else if (!cert.applicable) {
                    row["status"] = "skipped";
                    row["reason"] = "certificate not applicable";
                } else if (t.stop != StopReason::Converged) {
                    row["status"] = "skipped";
                    row["reason"] = "run did not converge";
                } else {
                    row["rho_fit"] = fit_->rho;
                    try {
                        compare_certificate(t, *fit_, cert, slack);
                        row["status"] = "passed";
                    } catch (const Error& e) {
                        if (e.kind() != ErrorKind::CertificateViolated) throw;
                        row["status"] = "violated";
                        row["reason"] = e.what();
                        out_.failures.push_back("comparison." + name);
                    }
                }
                out_.report["comparisons"].push_back(std::move(row));
            }
            if (spec["kstep"].get<bool>()) {
                if (!cert.applicable) {
                    add_check("kstep." + name, "k_step_reduction", false, {{"error", "certificate not applicable"}});
                } else {
                    const Ball ball{w(), cert.delta0_ratio * c_.delta};
                    auto rep = check_k_step_reduction(t, cert.k, cert.rho_block, ball, block_offset(cert));
                    json d = report_json(rep);
                    d["worst_ratio"] = rep.worst_ratio;
                    d["blocks_skipped"] = rep.blocks_skipped;
                    d["rho_block"] = cert.rho_block;
                    add_check("kstep." + name, "k_step_reduction", rep.passed(), std::move(d));
                }
            }
            if (spec["envelope"].get<bool>()) {
                auto rep = check_envelope(t, cert, w(), c_.delta);
                add_check("envelope." + name, "rlinear_envelope", cert.applicable && rep.passed(), report_json(rep));
            }
        }
    }

    // ------------------------------------------------------------------ property checks

    void property_check(const json& s, std::size_t index)
    {
        const std::string name = s["name"];
        const std::string kind = s["kind"];
        const std::uint64_t seed = derive_seed(c_.seed, kCheckStream + index);
        auto set = [&](const char* key) { return c_.sets[s[key].get<std::size_t>()]; };
        try {
            if (kind == "quasi_firm_fejer") {
                const std::size_t oi = s["operator"];
                const auto cycle = build_cycle(c_);
                const OperatorConfig& op = c_.operators[oi];
                bool empirical = false;
                FejerConstants fc;
                if (s.contains("gamma")) {
                    fc = {s["gamma"], s["beta"]};
                } else if (op.type == "relaxed") {
                    fc = relaxed_projector_constants(op.lambda, eps_for(s["eps"], static_cast<std::size_t>(op.set), empirical));
                } else if (op.type == "semi-intrepid") {
                    fc = semi_intrepid_constants(op.alpha, eps_for(s["eps"], static_cast<std::size_t>(op.set), empirical));
                } else {
                    fc = dr_constants(op.lambda, op.mu, op.alpha, eps_for(s["eps"], static_cast<std::size_t>(op.a), empirical),
                                      eps_for(s["eps"], static_cast<std::size_t>(op.b), empirical));
                }
                auto rep = check_quasi_firm_fejer(as_map(cycle[oi]), *set("refset"), fc.gamma, fc.beta, w(), s["delta"],
                                                  s["samples"], seed);
                json d = report_json(rep);
                d["gamma"] = fc.gamma;
                d["beta"] = fc.beta;
                d["constants_from_estimates"] = empirical;
                add_check(name, kind, rep.passed(), std::move(d));
            } else if (kind == "quasi_coercive") {
                const auto cycle = build_cycle(c_);
                auto rep = check_quasi_coercive(as_map(cycle[s["operator"].get<std::size_t>()]), *set("set"), s["nu"], w(),
                                                s["delta"], s["samples"], seed);
                const bool exact = s["exact"];
                json d = report_json(rep);
                d["nu"] = s["nu"];
                if (exact) d["equality_tol"] = 1e-12;
                add_check(name, kind, rep.passed() && (!exact || rep.max_abs_margin <= 1e-12), std::move(d));
            } else if (kind == "injectable") {
                auto rep = check_injectable(*set("set"), s["tau"], w(), s["delta"], s["samples"], seed);
                const bool expect = s["expect"];
                json d = report_json(rep);
                d["tau"] = s["tau"];
                d["expect"] = expect ? "pass" : "violations";
                add_check(name, kind, expect ? rep.passed() : rep.violations >= 1, std::move(d));
            } else if (kind == "obtuse_cone") {
                auto rep = is_obtuse_cone(*set("set"), s["samples"], seed);
                add_check(name, kind, rep.passed() == s["expect"].get<bool>(), report_json(rep));
            } else if (kind == "strong_regularity") {
                std::vector<SetPtr<double>> sub;
                for (const auto& i : s["sets"]) sub.push_back(c_.sets[i.get<std::size_t>()]);
                auto e = check_strong_regularity(sub, w(), s["delta"], s["samples"], seed);
                const bool expect = s["expect"];
                const double min_zeta = s["min_zeta"];
                json d = estimate_json(e);
                d["sets"] = s["sets"];
                d["expect"] = expect;
                d["min_zeta"] = min_zeta;
                add_check(name, kind, expect ? e.value >= min_zeta : e.value <= kStrongTol, std::move(d));
            } else if (kind == "eps_regularity") {
                auto e = estimate_eps_regularity(*set("set"), w(), s["delta"], s["samples"], seed);
                json d = estimate_json(e);
                d["max"] = s["max"];
                add_check(name, kind, e.value <= s["max"].get<double>(), std::move(d));
            } else if (kind == "linear_regularity") {
                auto e = estimate_linear_regularity(c_.sets, dist_, w(), s["delta"], s["samples"], seed);
                bool ok = true;
                if (s.contains("min")) ok = ok && e.value >= s["min"].get<double>();
                if (s.contains("max")) ok = ok && e.value <= s["max"].get<double>();
                add_check(name, kind, ok, estimate_json(e));
            } else if (kind == "theta_bar") {
                auto e = estimate_theta_bar(*set("a"), *set("b"), w(), s["samples"], seed);
                json d = estimate_json(e);
                d["expected"] = s["value"];
                add_check(name, kind, std::abs(e.value - s["value"].get<double>()) <= s["tol"].get<double>(), std::move(d));
            } else if (kind == "affine_identities") {
                const AffineHull L = affine_hull(c_.sets);
                auto rep = verify_affine_identities(*set("set"), L, s["lambda"], s["samples"], seed);
                add_check(name, kind, rep.passed(), report_json(rep));
            }
        } catch (const Error& e) {
            add_check(name, kind, false, {{"error", e.what()}});
        }
    }

    void trajectory_checks()
    {
        const json& t = c_.analyses["trajectory"];
        if (t["fejer_trace"].get<bool>()) {
            auto rep = check_fejer_trace(*traj_, w());
            add_check("trajectory.fejer_trace", "fejer_trace", rep.passed(), report_json(rep));
        }
        if (t["distance_order"].get<bool>()) {
            auto rep = check_distance_order(*traj_);
            add_check("trajectory.distance_order", "distance_order", rep.passed(), report_json(rep));
        }
    }

    // ------------------------------------------------------------------ affine reduction

    void affine()
    {
        if (!c_.analyses["affine"].get<bool>()) return;
        const OperatorConfig& op = c_.operators.front();
        const auto a = c_.sets[static_cast<std::size_t>(op.a)];
        const auto b = c_.sets[static_cast<std::size_t>(op.b)];
        json d;
        try {
            const AffineHull L = affine_hull({a, b});
            const auto T = *make_dr(a, b, op.lambda, op.mu, op.alpha).as<ops::GeneralizedDR<double>>();
            ShadowRun sr = shadow_run(*traj_, L, T);
            const auto& rep = sr.report;
            d = {{"eta", rep.eta},
                 {"hull_dimension", L.basis.cols()},
                 {"max_recursion_residual", rep.max_recursion_residual},
                 {"max_gap_residual", rep.max_gap_residual},
                 {"gap_first", rep.gap_norms.front()},
                 {"gap_last", rep.gap_norms.back()},
                 {"classification", to_string(rep.classification)},
                 {"limit_detected", rep.limit_detected},
                 {"fixed_point_residual", rep.fixed_point_residual},
                 {"feet_residual", rep.feet_residual},
                 {"intersection_residual", rep.intersection_residual},
                 {"shadow_limit", vec_to_json(rep.shadow_limit)},
                 {"flags", rep.flags}};
            if (rep.limit) d["limit"] = vec_to_json(*rep.limit);
            out_.shadow = std::move(sr.shadow);
            out_.gap_norms = rep.gap_norms;
            affine_ = rep;
            add_check("affine.shadow_recursion", "affine_reduction", true, d);
        } catch (const Error& e) {
            add_check("affine.shadow_recursion", "affine_reduction", false, {{"error", e.what()}});
        }
    }

    // ------------------------------------------------------------------ expectations

    static bool same_states_up_to_rotation(const std::vector<Vec>& got, const std::vector<Vec>& want, double tol)
    {
        if (got.size() != want.size()) return false;
        const std::size_t p = got.size();
        for (std::size_t r = 0; r < p; ++r) {
            bool ok = true;
            for (std::size_t i = 0; i < p && ok; ++i) ok = (got[(i + r) % p] - want[i]).norm() <= tol;
            if (ok) return true;
        }
        return false;
    }

    void expectations()
    {
        const json& e = c_.expect;
        const Trajectory& t = *traj_;
        if (e.contains("stop"))
            add_check("expect.stop", "expectation", e["stop"] == to_string(t.stop),
                      {{"expected", e["stop"]}, {"actual", to_string(t.stop)}});
        if (e.contains("nonconvergent")) {
            const bool nonconv = t.stop != StopReason::Converged;
            add_check("expect.nonconvergent", "expectation", nonconv == e["nonconvergent"].get<bool>(),
                      {{"expected", e["nonconvergent"]}, {"actual", nonconv}});
        }
        if (e.contains("cycle")) {
            const json& ec = e["cycle"];
            json d = {{"expected_period", ec["period"]}, {"recurrence_tol", kRecurrenceTol}};
            bool ok = cycle_.has_value();
            if (cycle_) {
                d["period"] = cycle_->period;
                d["start"] = cycle_->start;
                ok = cycle_->period == ec["period"].get<int>();
                if (ec.contains("start_max")) ok = ok && cycle_->start <= ec["start_max"].get<int>();
                if (ec.contains("states")) {
                    std::vector<Vec> want;
                    for (const auto& s : ec["states"]) {
                        Vec v(static_cast<Eigen::Index>(s.size()));
                        for (std::size_t i = 0; i < s.size(); ++i) v[static_cast<Eigen::Index>(i)] = s[i];
                        want.push_back(v);
                    }
                    ok = ok && same_states_up_to_rotation(cycle_->states, want, kRecurrenceTol);
                }
            } else {
                d["period"] = nullptr;
            }
            add_check("expect.cycle", "expectation", ok, std::move(d));
        }
        if (e.contains("rho_cycle")) {
            const double want = e["rho_cycle"]["value"], tol = e["rho_cycle"]["tol"];
            json d = {{"expected", want}, {"tol", tol}};
            bool ok = false;
            if (fit_) {
                const double got = std::pow(fit_->rho, t.cycle_length);
                d["actual"] = got;
                ok = std::abs(got - want) <= tol;
            }
            add_check("expect.rho_cycle", "expectation", ok, std::move(d));
        }
        if (e.contains("affine")) {
            const json& a = e["affine"];
            if (!affine_) {
                add_check("expect.affine", "expectation", false, {{"error", "no affine reduction report"}});
                return;
            }
            const auto& rep = *affine_;
            if (a.contains("classification"))
                add_check("expect.affine.classification", "expectation",
                          a["classification"] == to_string(rep.classification),
                          {{"expected", a["classification"]}, {"actual", to_string(rep.classification)}});
            if (a.contains("gap_constant")) {
                double dev = 0.0;
                for (double g : rep.gap_norms) dev = std::max(dev, std::abs(g - rep.gap_norms.front()));
                add_check("expect.affine.gap_constant", "expectation", dev <= a["gap_constant"].get<double>(),
                          {{"max_deviation", dev}, {"tol", a["gap_constant"]}, {"iterates", rep.gap_norms.size()}});
            }
            if (a.contains("gap_ratio")) {
                // |x_n - y_n| = |eta|^n |x_0 - y_0| to relative tolerance
                double worst = 0.0;
                const double g0 = rep.gap_norms.front();
                for (std::size_t n = 0; n < rep.gap_norms.size(); ++n) {
                    const double want = std::pow(std::abs(rep.eta), static_cast<double>(n)) * g0;
                    if (want < 1e-250) break;
                    worst = std::max(worst, std::abs(rep.gap_norms[n] - want) / want);
                }
                add_check("expect.affine.gap_ratio", "expectation", g0 > 0.0 && worst <= a["gap_ratio"].get<double>(),
                          {{"max_relative_error", worst}, {"tol", a["gap_ratio"]}, {"eta", rep.eta}});
            }
            if (a.contains("fixed_point_residual"))
                add_check("expect.affine.fixed_point_residual", "expectation",
                          rep.limit_detected && rep.fixed_point_residual <= a["fixed_point_residual"].get<double>(),
                          {{"actual", rep.fixed_point_residual}, {"tol", a["fixed_point_residual"]}});
            if (a.contains("intersection_residual"))
                add_check("expect.affine.intersection_residual", "expectation",
                          rep.limit_detected && rep.intersection_residual <= a["intersection_residual"].get<double>(),
                          {{"actual", rep.intersection_residual}, {"tol", a["intersection_residual"]}});
        }
    }

    const ScenarioConfig& c_;
    IntersectionDistance dist_;
    ScenarioOutcome out_;
    Constants k_;
    std::vector<std::pair<json, RateCertificate>> certs_;
    std::optional<Trajectory> traj_;
    std::optional<CyclePattern> cycle_;
    std::optional<RateFit> fit_;
    std::optional<AffineReductionReport> affine_;
};

void put_number(std::ostream& os, double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
}

void row_prefix(std::ostream& os, const Trajectory& t, std::size_t n)
{
    os << n << ',';
    if (n < t.op_index.size()) os << t.op_index[n] + 1;
}

} // namespace

ScenarioOutcome execute_scenario(const ScenarioConfig& config)
{
    return Execution(config).run();
}

std::string trajectory_csv(const Trajectory& t)
{
    std::ostringstream os;
    const Eigen::Index d = t.iterates.front().size();
    const std::size_t m = t.set_distances.front().size();
    os << "n,op_index";
    for (Eigen::Index i = 1; i <= d; ++i) os << ",x_" << i;
    for (std::size_t i = 1; i <= m; ++i) os << ",dC_" << i;
    os << ",dC\r\n";
    for (std::size_t n = 0; n < t.size(); ++n) {
        row_prefix(os, t, n);
        for (Eigen::Index i = 0; i < d; ++i) {
            os << ',';
            put_number(os, t.iterates[n][i]);
        }
        for (double v : t.set_distances[n]) {
            os << ',';
            put_number(os, v);
        }
        os << ',';
        put_number(os, t.dist_c[n]);
        os << "\r\n";
    }
    return os.str();
}

std::string shadow_csv(const Trajectory& t, const std::vector<Vec>& shadow)
{
    std::ostringstream os;
    const Eigen::Index d = t.iterates.front().size();
    const std::size_t m = t.set_distances.front().size();
    os << "n,op_index";
    for (Eigen::Index i = 1; i <= d; ++i) os << ",x_" << i;
    for (std::size_t i = 1; i <= m; ++i) os << ",dC_" << i;
    os << ",dC";
    for (Eigen::Index i = 1; i <= d; ++i) os << ",shadow_" << i;
    os << ",gap\r\n";
    for (std::size_t n = 0; n < t.size() && n < shadow.size(); ++n) {
        row_prefix(os, t, n);
        for (Eigen::Index i = 0; i < d; ++i) {
            os << ',';
            put_number(os, t.iterates[n][i]);
        }
        for (double v : t.set_distances[n]) {
            os << ',';
            put_number(os, v);
        }
        os << ',';
        put_number(os, t.dist_c[n]);
        for (Eigen::Index i = 0; i < d; ++i) {
            os << ',';
            put_number(os, shadow[n][i]);
        }
        os << ',';
        put_number(os, (t.iterates[n] - shadow[n]).norm());
        os << "\r\n";
    }
    return os.str();
}

std::filesystem::path write_artifacts(const ScenarioOutcome& outcome, const std::filesystem::path& root, bool force)
{
    namespace fs = std::filesystem;
    const fs::path dir = root / outcome.name;
    std::error_code ec;
    if (fs::exists(dir, ec) && !fs::is_empty(dir, ec)) {
        if (!force) throw Error(ErrorKind::Config, dir.string() + " already exists; pass --force to overwrite");
        // only our own files are replaced; anything else in the directory stays
        for (const char* f : {"report.json", "trajectory.csv", "shadow.csv"}) fs::remove(dir / f, ec);
    }
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::Config, "cannot create " + dir.string() + ": " + ec.message());
    auto write = [&](const char* file, const std::string& body) {
        std::ofstream f(dir / file, std::ios::binary);
        if (!f) throw Error(ErrorKind::Config, "cannot write " + (dir / file).string());
        f << body;
    };
    write("report.json", outcome.report.dump(2) + "\n");
    if (outcome.trajectory) write("trajectory.csv", trajectory_csv(*outcome.trajectory));
    if (outcome.trajectory && !outcome.shadow.empty()) write("shadow.csv", shadow_csv(*outcome.trajectory, outcome.shadow));
    return dir;
}

json strip_wall_time(const json& j)
{
    if (j.is_object()) {
        json out = json::object();
        for (auto it = j.begin(); it != j.end(); ++it)
            if (it.key() != "wall_seconds") out[it.key()] = strip_wall_time(it.value());
        return out;
    }
    if (j.is_array()) {
        json out = json::array();
        for (const auto& v : j) out.push_back(strip_wall_time(v));
        return out;
    }
    return j;
}

std::string format_outcome(const ScenarioOutcome& o)
{
    std::ostringstream os;
    char buf[256];
    os << "scenario " << o.name << '\n';
    const json& r = o.report;
    if (r["scenario"].contains("run")) {
        const json& run = r["scenario"]["run"];
        std::snprintf(buf, sizeof buf, "  run: %s after %d iterations, d_C = %.3e\n",
                      run["stop"].get<std::string>().c_str(), run["iterations"].get<int>(), run["final_dist_c"].get<double>());
        os << buf;
        if (!run["cycle"].is_null())
            os << "  cycle: period " << run["cycle"]["period"] << " from iterate " << run["cycle"]["start"] << '\n';
    }
    if (r["fit"].is_object() && r["fit"].contains("rho")) {
        std::snprintf(buf, sizeof buf, "  fit: rho = %.6f per iterate, %.6f per cycle\n", r["fit"]["rho"].get<double>(),
                      r["fit"]["rho_cycle"].get<double>());
        os << buf;
    }
    for (const auto& c : r["certificates"]) {
        if (c.contains("error")) {
            os << "  certificate " << c["name"].get<std::string>() << ": " << c["error"].get<std::string>() << '\n';
            continue;
        }
        std::snprintf(buf, sizeof buf, "  certificate %-22s rho_iter %.6f  rho_cycle %.6f  %s\n",
                      c["name"].get<std::string>().c_str(), c["rho_iter"].get<double>(), c["rho_cycle"].get<double>(),
                      c["applicable"].get<bool>() ? "applicable" : "not applicable");
        os << buf;
    }
    for (const auto& c : r["comparisons"]) {
        std::snprintf(buf, sizeof buf, "  %-4s compare %s", c["status"] == "violated" ? "FAIL" : "ok",
                      c["name"].get<std::string>().c_str());
        os << buf;
        if (c.contains("reason")) os << " (" << c["reason"].get<std::string>() << ')';
        os << '\n';
    }
    for (const auto& c : r["checks"]) {
        std::snprintf(buf, sizeof buf, "  %-4s %s", c["passed"].get<bool>() ? "PASS" : "FAIL", c["name"].get<std::string>().c_str());
        os << buf;
        const json& d = c["details"];
        if (d.contains("error")) os << "  [" << d["error"].get<std::string>() << ']';
        else if (d.contains("violations"))
            os << "  [" << d["violations"] << '/' << d["samples"] << " violations]";
        else if (d.contains("value"))
            os << "  [value " << d["value"] << ']';
        else if (d.contains("actual"))
            os << "  [actual " << d["actual"] << ']';
        os << '\n';
    }
    os << (o.passed() ? "PASS " : "FAIL ") << o.name << '\n';
    return os.str();
}

} // namespace projlab
