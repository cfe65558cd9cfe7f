#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "projlab/suite.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

using namespace projlab;
namespace fs = std::filesystem;

namespace {

ScenarioConfig bundled(const std::string& name)
{
    return load_config((default_scenario_dir() / (name + ".json")).string());
}

std::vector<std::string> split(const std::string& s, const std::string& sep)
{
    std::vector<std::string> out;
    std::size_t at = 0;
    for (std::size_t next; (next = s.find(sep, at)) != std::string::npos; at = next + sep.size())
        out.push_back(s.substr(at, next - at));
    if (at < s.size()) out.push_back(s.substr(at));
    return out;
}

std::string slurp(const fs::path& p)
{
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    TempDir()
    {
        std::random_device rd;
        path = fs::temp_directory_path() / ("projlab_test_" + std::to_string(rd()));
        fs::create_directories(path);
    }
    ~TempDir()
    {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

} // namespace

TEST_CASE("derived seeds differ by stream and are stable")
{
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
    CHECK(derive_seed(7, 3) == derive_seed(7, 3));
}

TEST_CASE("report has the documented top-level keys")
{
    const auto o = execute_scenario(bundled("two_lines_angle_45"));
    for (const char* k : {"scenario", "constants", "certificates", "fit", "comparisons", "checks"})
        CHECK(o.report.contains(k));
    CHECK(o.passed());
    CHECK(o.report["scenario"]["run"]["stop"] == "Converged");
}

TEST_CASE("trajectory CSV: header, CRLF rows, round-trippable doubles")
{
    const auto o = execute_scenario(bundled("two_lines_angle_60"));
    REQUIRE(o.trajectory);
    const auto& t = *o.trajectory;
    const std::string csv = trajectory_csv(t);
    const auto rows = split(csv, "\r\n");
    REQUIRE(rows.size() == t.size() + 1);
    CHECK(rows[0] == "n,op_index,x_1,x_2,dC_1,dC_2,dC");
    CHECK(csv.find('\n') == csv.find("\r\n") + 1); // no bare LF
    for (std::size_t n = 0; n < t.size(); ++n) {
        const auto cells = split(rows[n + 1], ",");
        CAPTURE(n);
        CHECK(std::stoul(cells[0]) == n);
        if (n + 1 < t.size()) {
            REQUIRE(cells.size() == 7);
            CHECK(std::stoi(cells[1]) == t.op_index[n] + 1);
        } else {
            REQUIRE(cells.size() == 7); // trailing empty op_index cell survives as ",,"
            CHECK(cells[1].empty());
        }
        CHECK(std::strtod(cells[2].c_str(), nullptr) == t.iterates[n][0]);
        CHECK(std::strtod(cells[3].c_str(), nullptr) == t.iterates[n][1]);
        CHECK(std::strtod(cells[6].c_str(), nullptr) == t.dist_c[n]);
    }
}

TEST_CASE("shadow CSV appends the shadow columns and gap")
{
    const auto o = execute_scenario(bundled("dr_affine_averaged"));
    REQUIRE(o.trajectory);
    REQUIRE(!o.shadow.empty());
    const auto rows = split(shadow_csv(*o.trajectory, o.shadow), "\r\n");
    CHECK(rows[0] == "n,op_index,x_1,x_2,x_3,dC_1,dC_2,dC,shadow_1,shadow_2,shadow_3,gap");
    const auto first = split(rows[1], ",");
    REQUIRE(first.size() == 12);
    CHECK(std::strtod(first[11].c_str(), nullptr) == doctest::Approx(1.0)); // x0 = (1,0,1), shadow (1,0,0)
}

TEST_CASE("artifacts refuse to overwrite without force")
{
    TempDir tmp;
    const auto o = execute_scenario(bundled("reflector_cycle_counterexample"));
    const fs::path dir = write_artifacts(o, tmp.path, false);
    CHECK(fs::exists(dir / "report.json"));
    CHECK(fs::exists(dir / "trajectory.csv"));
    CHECK(!fs::exists(dir / "shadow.csv"));
    std::ofstream(dir / "notes.txt") << "keep me";
    CHECK_THROWS_AS(write_artifacts(o, tmp.path, false), Error);
    CHECK_NOTHROW(write_artifacts(o, tmp.path, true));
    CHECK(slurp(dir / "notes.txt") == "keep me");
    CHECK(json::parse(slurp(dir / "report.json"))["scenario"]["config"]["name"] == "reflector_cycle_counterexample");
}

TEST_CASE("same seed, same report; the seed reaches the sampled estimates")
{
    ScenarioConfig c = bundled("strong_regularity_triple");
    const json a = strip_wall_time(execute_scenario(c).report);
    const json b = strip_wall_time(execute_scenario(c).report);
    CHECK(a.dump() == b.dump());
    c.seed += 1;
    const json other = strip_wall_time(execute_scenario(c).report);
    CHECK(other.dump() != a.dump());
}

TEST_CASE("strip_wall_time removes nested timing only")
{
    const json j = {{"wall_seconds", 1.0}, {"a", {{"wall_seconds", 2.0}, {"b", 3}}}, {"list", {{{"wall_seconds", 4}}}}};
    const json s = strip_wall_time(j);
    CHECK(s == json{{"a", {{"b", 3}}}, {"list", {json::object()}}});
}

TEST_CASE("a failed expectation is reported, not thrown")
{
    ScenarioConfig c = bundled("reflector_cycle_counterexample");
    c.expect["cycle"]["period"] = 3;
    c.expect["cycle"].erase("states");
    const auto o = execute_scenario(c);
    CHECK(!o.passed());
    CHECK(std::find(o.failures.begin(), o.failures.end(), "expect.cycle") != o.failures.end());
}

TEST_CASE("an unexpected stop reason fails the scenario")
{
    ScenarioConfig c = bundled("two_lines_angle_30");
    c.max_cycles = 5;
    const auto o = execute_scenario(c);
    CHECK(o.report["scenario"]["run"]["stop"] == "Budget");
    CHECK(!o.passed());
}

TEST_CASE("suite entries follow file-name order regardless of worker count")
{
    SuiteOptions one;
    one.workers = 1;
    SuiteOptions many;
    many.workers = 8;
    const auto a = verify_suite(one);
    const auto b = verify_suite(many);
    REQUIRE(a.entries.size() == b.entries.size());
    for (std::size_t i = 0; i < a.entries.size(); ++i) CHECK(a.entries[i].name == b.entries[i].name);
    CHECK(a.entries.back().name == "refinement_dominance");
    CHECK(strip_wall_time(a.to_json()).dump() == strip_wall_time(b.to_json()).dump());
    CHECK(a.passed());
}
