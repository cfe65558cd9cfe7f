#include "projlab/suite.hpp"

#include "projlab/rates.hpp"
#include "projlab/sampling.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <sstream>
#include <thread>

#ifndef PROJLAB_SCENARIO_DIR
#define PROJLAB_SCENARIO_DIR "scenarios"
#endif

namespace projlab {

std::filesystem::path default_scenario_dir()
{
    if (const char* env = std::getenv("PROJLAB_SCENARIOS"); env && *env) return env;
    return PROJLAB_SCENARIO_DIR;
}

std::vector<std::filesystem::path> bundled_scenarios(const std::filesystem::path& dir)
{
    std::vector<std::filesystem::path> out;
    std::error_code ec;
    for (const auto& e : std::filesystem::directory_iterator(dir, ec))
        if (e.is_regular_file() && e.path().extension() == ".json") out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

SuiteEntry refinement_dominance(std::uint64_t seed, int draws)
{
    const auto start = std::chrono::steady_clock::now();
    Rng rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int compared = 0, exceptions = 0;
    double worst = -1.0; // largest refined - plain
    json witness = nullptr;
    for (int i = 0; i < draws; ++i) {
        const int m = 2 + static_cast<int>(u(rng) * 3);
        std::vector<double> lam(static_cast<std::size_t>(m));
        for (auto& l : lam) l = std::min(1.0 + u(rng), std::nextafter(2.0, 0.0));
        const double eps = 0.3 * u(rng);
        const double kappa = 1.0 + 4.0 * u(rng);
        const auto refined = rate_cyclic_overrelaxed(lam, eps, kappa);
        const auto plain = rate_cyclic_relaxed(lam, eps, kappa);
        if (!refined.applicable || !plain.applicable) continue;
        ++compared;
        const double gap = refined.rho_iter - plain.rho_iter;
        if (gap > worst) {
            worst = gap;
            witness = {{"lambdas", lam}, {"eps", eps}, {"kappa", kappa}, {"refined", refined.rho_iter}, {"plain", plain.rho_iter}};
        }
        if (gap > 0.0) ++exceptions;
    }
    SuiteEntry e;
    e.name = "refinement_dominance";
    e.kind = "property";
    e.passed = exceptions == 0 && compared > 0;
    if (!e.passed) e.failures.push_back("refinement_dominance");
    e.report = {{"draws", draws},          {"compared", compared}, {"exceptions", exceptions},
                {"worst_difference", worst}, {"witness", witness}, {"seed", seed}};
    e.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return e;
}

namespace {

SuiteEntry run_one(const std::filesystem::path& path, const std::optional<std::uint64_t>& seed, ScenarioOutcome& out)
{
    const auto start = std::chrono::steady_clock::now();
    SuiteEntry e;
    e.name = path.stem().string();
    e.kind = "scenario";
    try {
        ScenarioConfig c = load_config(path.string());
        if (seed) c.seed = *seed;
        e.name = c.name;
        out = execute_scenario(c);
        e.passed = out.passed();
        e.failures = out.failures;
        e.report = out.report;
    } catch (const Error& err) {
        // a broken bundled file is a suite failure, not a crash
        e.kind = "config";
        e.passed = false;
        e.failures = {"config"};
        e.report = {{"error", err.what()}};
        out = ScenarioOutcome{};
        out.name = e.name;
        out.failures = e.failures;
        out.report = e.report;
    }
    e.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return e;
}

} // namespace

SuiteResult verify_suite(const SuiteOptions& opt)
{
    const auto dir = opt.scenario_dir.empty() ? default_scenario_dir() : opt.scenario_dir;
    const auto files = bundled_scenarios(dir);
    SuiteResult res;
    res.entries.resize(files.size());
    res.outcomes.resize(files.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < files.size(); i = next++) res.entries[i] = run_one(files[i], opt.seed, res.outcomes[i]);
    };
    const int n = std::max(1, std::min<int>(opt.workers, static_cast<int>(std::max<std::size_t>(files.size(), 1))));
    std::vector<std::thread> pool;
    for (int i = 1; i < n; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    if (files.empty()) {
        SuiteEntry e;
        e.name = "bundled_scenarios";
        e.kind = "config";
        e.failures = {"no scenarios found in " + dir.string()};
        e.report = {{"error", e.failures.front()}};
        res.entries.push_back(e);
    }
    res.entries.push_back(refinement_dominance(opt.seed.value_or(2718)));
    return res;
}

bool SuiteResult::passed() const noexcept
{
    return std::all_of(entries.begin(), entries.end(), [](const SuiteEntry& e) { return e.passed; });
}

json SuiteResult::to_json() const
{
    json out = json::object();
    json list = json::array();
    int failed = 0;
    for (const auto& e : entries) {
        list.push_back({{"name", e.name},
                        {"kind", e.kind},
                        {"passed", e.passed},
                        {"failures", e.failures},
                        {"report", e.report},
                        {"wall_seconds", e.wall_seconds}});
        if (!e.passed) ++failed;
    }
    out["entries"] = std::move(list);
    out["summary"] = {{"total", entries.size()}, {"failed", failed}, {"passed", failed == 0}};
    return out;
}

std::string SuiteResult::table() const
{
    std::ostringstream os;
    char buf[512];
    std::snprintf(buf, sizeof buf, "%-44s %-9s %-6s %8s  %s\n", "check", "kind", "result", "seconds", "notes");
    os << buf;
    int failed = 0;
    for (const auto& e : entries) {
        std::string notes;
        if (e.kind == "scenario") {
            notes = std::to_string(e.report["checks"].size()) + " checks";
            if (!e.report["comparisons"].empty()) notes += ", " + std::to_string(e.report["comparisons"].size()) + " comparisons";
        } else if (e.kind == "property") {
            notes = std::to_string(e.report.value("compared", 0)) + " compared";
        }
        for (const auto& f : e.failures) notes += (notes.empty() ? "" : "; ") + std::string("failed: ") + f;
        if (e.report.contains("error")) notes = e.report["error"].get<std::string>();
        std::snprintf(buf, sizeof buf, "%-44s %-9s %-6s %8.3f  %s\n", e.name.c_str(), e.kind.c_str(),
                      e.passed ? "PASS" : "FAIL", e.wall_seconds, notes.c_str());
        os << buf;
        if (!e.passed) ++failed;
    }
    os << entries.size() - static_cast<std::size_t>(failed) << "/" << entries.size() << " passed\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// catalog

namespace {

struct Item {
    const char* name;
    const char* params;
    const char* note;
};

const Item kSets[] = {
    {"halfspace", "a (nonzero), b", "{x : <a, x> <= b}"},
    {"hyperplane", "a (nonzero), b", "{x : <a, x> = b}"},
    {"affine", "anchor, directions", "anchor + span(directions)"},
    {"ball", "center, radius >= 0", "closed Euclidean ball"},
    {"sphere", "center, radius > 0", "nonconvex, superregular"},
    {"box", "lower <= upper", "coordinate box"},
    {"orthant", "signs in {-1, 0, +1}", "0 marks a free coordinate"},
    {"cone", "generators (1 to 8, nonzero)", "finitely generated convex cone"},
    {"enlargement", "inner set, tau >= 0", "inner + B(0, tau)"},
    {"union", "members", "finite union, nonconvex"},
    {"points", "points", "finite point set"},
    {"translate", "inner set, shift", "inner + shift"},
};

const Item kOperators[] = {
    {"relaxed", "lambda in (0,2]", "(1 - lambda) Id + lambda P_C; lambda = 2 is the reflector"},
    {"semi-intrepid", "alpha in [0,1], tau >= 0", "p + (p - x) min{alpha, tau / |p - x|}, p = P_C x"},
    {"generalized-dr", "lambda, mu in (0,2], alpha in (0,1)", "(1 - alpha) Id + alpha P_B^mu P_A^lambda"},
};

const Item kTheorems[] = {
    {"dist-qff", "gamma_i >= 1, beta_i > 0, nu in (0,1], kappa > 0", "quasi firmly Fejer cycle, m-step blocks"},
    {"dist-qf", "gamma_i >= 1, beta_i > 0 (i != j), nu in (0,1], kappa > 0", "one non-firm operator j, m-step blocks"},
    {"refined", "gamma_i >= 1, beta_i > 0, m >= 2, kappa > 0", "(m-1)-step blocks"},
    {"cyclic-relaxed", "lambda_i in (0,2] (at most one equal to 2), eps in [0,1), kappa > 0", "m-step blocks"},
    {"cyclic-overrelaxed", "lambda_i in [1,2), m >= 2, eps in [0,1), kappa > 0", "(m-1)-step blocks"},
    {"cyclic-projections", "m >= 2, eps in [0,1), kappa > 0", "(m-1)-step blocks"},
    {"convex-cyclic", "lambda_i in (0,2] (at most one equal to 2), kappa > 0", "convex sets, m-step blocks"},
    {"semi-intrepid", "alpha_i in [0,1] (at most one equal to 1), eps in [0,1), kappa > 0", "(m-1+|J|)-step blocks"},
    {"convex-semi-intrepid", "alpha_i in [0,1] (at most one equal to 1), kappa > 0", "convex sets"},
    {"cyclic-dr", "lambda_j, mu_j in (0,2], alpha_j in (0,1), eps in [0,1/3], nu in (0,1], kappa > 0",
     "one block per DR operator"},
};

} // namespace

std::string catalog_text()
{
    std::ostringstream os;
    auto section = [&](const char* title, const auto& items) {
        os << title << ":\n";
        for (const auto& it : items) os << "  " << it.name << " (" << it.params << ")  " << it.note << '\n';
    };
    section("sets", kSets);
    section("operators", kOperators);
    section("rate theorems", kTheorems);
    return os.str();
}

json catalog_json()
{
    auto list = [](const auto& items) {
        json a = json::array();
        for (const auto& it : items) a.push_back({{"name", it.name}, {"parameters", it.params}, {"description", it.note}});
        return a;
    };
    return {{"sets", list(kSets)}, {"operators", list(kOperators)}, {"theorems", list(kTheorems)}};
}

} // namespace projlab
