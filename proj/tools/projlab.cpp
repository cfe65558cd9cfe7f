// projlab: run scenarios, verify the bundled suite, print the catalog.

#include "projlab/suite.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <thread>

namespace fs = std::filesystem;
using namespace projlab;

namespace {

bool occupied(const fs::path& dir)
{
    std::error_code ec;
    return fs::exists(dir, ec) && !fs::is_empty(dir, ec);
}

int usage_error(const std::string& msg)
{
    std::cerr << "projlab: " << msg << '\n';
    return kExitUsage;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"projlab: cyclic projection schemes, regularity checks and rate certificates"};
    app.require_subcommand(1);

    std::string format = "text";
    const auto formats = CLI::IsMember({"text", "json"});

    auto* run = app.add_subcommand("run", "Run one scenario file and write its artifacts");
    std::string config_path;
    std::string out_dir = "out";
    bool force = false;
    std::uint64_t seed = 0;
    run->add_option("config", config_path, "Scenario JSON file")->required();
    run->add_option("--out", out_dir, "Output root; artifacts go to <out>/<scenario name>")->capture_default_str();
    run->add_flag("--force", force, "Overwrite an existing output directory");
    auto* run_seed = run->add_option("--seed", seed, "Seed overriding the scenario's");
    run->add_option("--format", format, "Console output format")->check(formats)->capture_default_str();

    auto* verify = app.add_subcommand("verify", "Run the bundled scenarios and property suites");
    std::string scenario_dir;
    std::string verify_out;
    int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    verify->add_option("--scenarios", scenario_dir, "Directory of scenario files (default: the bundled set)");
    verify->add_option("--out", verify_out, "Also write per-scenario artifacts under this root");
    verify->add_flag("--force", force, "Overwrite existing output directories");
    auto* verify_seed = verify->add_option("--seed", seed, "Seed overriding every scenario's");
    verify->add_option("--workers", workers, "Scenarios run concurrently")->check(CLI::Range(1, 256))->capture_default_str();
    verify->add_option("--format", format, "Console output format")->check(formats)->capture_default_str();

    auto* catalog = app.add_subcommand("catalog", "List set variants, operators and rate theorems");
    catalog->add_option("--format", format, "Output format")->check(formats)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitPass : kExitUsage;
    }

    try {
        if (*catalog) {
            if (format == "json")
                std::cout << catalog_json().dump(2) << '\n';
            else
                std::cout << catalog_text();
            return kExitPass;
        }

        if (*run) {
            ScenarioConfig c = load_config(config_path);
            if (*run_seed) c.seed = seed;
            const fs::path dir = fs::path(out_dir) / c.name;
            if (occupied(dir) && !force) return usage_error(dir.string() + " already exists; pass --force to overwrite");
            const ScenarioOutcome o = execute_scenario(c);
            write_artifacts(o, out_dir, force);
            if (format == "json")
                std::cout << o.report.dump(2) << '\n';
            else
                std::cout << format_outcome(o) << "artifacts: " << dir.string() << '\n';
            return o.passed() ? kExitPass : kExitFail;
        }

        SuiteOptions opt;
        opt.scenario_dir = scenario_dir;
        if (*verify_seed) opt.seed = seed;
        opt.workers = workers;
        if (!verify_out.empty() && !force) {
            for (const auto& f : bundled_scenarios(scenario_dir.empty() ? default_scenario_dir() : fs::path(scenario_dir))) {
                const fs::path dir = fs::path(verify_out) / f.stem();
                if (occupied(dir)) return usage_error(dir.string() + " already exists; pass --force to overwrite");
            }
        }
        const SuiteResult res = verify_suite(opt);
        if (!verify_out.empty())
            for (const auto& o : res.outcomes)
                if (!o.name.empty() && !o.report.is_null()) write_artifacts(o, verify_out, force);
        if (format == "json")
            std::cout << res.to_json().dump(2) << '\n';
        else
            std::cout << res.table();
        return res.passed() ? kExitPass : kExitFail;
    } catch (const Error& e) {
        return usage_error(e.what());
    }
}
