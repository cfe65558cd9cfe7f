#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Result {
    int code = -1;
    std::string out;
};

// Runs the CLI with the given arguments; stdout captured, stderr discarded.
Result cli(const std::string& args)
{
    const std::string cmd = std::string("\"") + PROJLAB_CLI + "\" " + args + " 2>/dev/null";
    Result r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    char buf[4096];
    for (std::size_t n; (n = fread(buf, 1, sizeof buf, p)) > 0;) r.out.append(buf, n);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string scenario(const std::string& name) { return "\"" + std::string(PROJLAB_SCENARIOS) + "/" + name + ".json\""; }

struct TempDir {
    fs::path path;
    TempDir()
    {
        std::random_device rd;
        path = fs::temp_directory_path() / ("projlab_cli_" + std::to_string(rd()));
        fs::create_directories(path);
    }
    ~TempDir()
    {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string q() const { return "\"" + path.string() + "\""; }
};

} // namespace

TEST_CASE("catalog in text and json")
{
    const auto text = cli("catalog");
    CHECK(text.code == 0);
    CHECK(text.out.find("generalized-dr (lambda, mu in (0,2], alpha in (0,1))") != std::string::npos);
    const auto j = cli("catalog --format json");
    CHECK(j.code == 0);
    CHECK(json::parse(j.out)["theorems"].size() == 10);
}

TEST_CASE("usage errors exit 2")
{
    CHECK(cli("").code == 2);
    CHECK(cli("catalog --bogus").code == 2);
    CHECK(cli("catalog --format xml").code == 2);
    CHECK(cli("run").code == 2);
    CHECK(cli("run /nonexistent/file.json").code == 2);
    CHECK(cli("--help").code == 0);
}

TEST_CASE("run writes artifacts, prints JSON, and exits 0 on a passing scenario")
{
    TempDir tmp;
    const auto r = cli("run " + scenario("reflector_cycle_counterexample") + " --format json --out " + tmp.q());
    CHECK(r.code == 0);
    const json rep = json::parse(r.out);
    CHECK(rep["scenario"]["run"]["stop"] == "Budget");
    CHECK(fs::exists(tmp.path / "reflector_cycle_counterexample" / "trajectory.csv"));
    CHECK(fs::exists(tmp.path / "reflector_cycle_counterexample" / "report.json"));

    SUBCASE("a second run refuses to overwrite")
    {
        CHECK(cli("run " + scenario("reflector_cycle_counterexample") + " --out " + tmp.q()).code == 2);
        CHECK(cli("run " + scenario("reflector_cycle_counterexample") + " --out " + tmp.q() + " --force").code == 0);
    }
}

TEST_CASE("a failing expectation exits 1")
{
    TempDir tmp;
    json c = json::parse(std::ifstream(std::string(PROJLAB_SCENARIOS) + "/reflect_project_axes_cycle.json"));
    c["expect"]["cycle"] = {{"period", 2}};
    const fs::path file = tmp.path / "broken.json";
    std::ofstream(file) << c.dump(2);
    CHECK(cli("run \"" + file.string() + "\" --out " + tmp.q()).code == 1);
}

TEST_CASE("an anchor outside a set is a config error, exit 2")
{
    TempDir tmp;
    json c = json::parse(std::ifstream(std::string(PROJLAB_SCENARIOS) + "/two_lines_angle_45.json"));
    c["anchor"] = {1.0, 1.0};
    const fs::path file = tmp.path / "bad_anchor.json";
    std::ofstream(file) << c.dump(2);
    CHECK(cli("run \"" + file.string() + "\" --out " + tmp.q()).code == 2);
    CHECK(!fs::exists(tmp.path / "two_lines_angle_45"));
}

TEST_CASE("--seed overrides the scenario seed")
{
    TempDir tmp;
    const auto a = cli("run " + scenario("strong_regularity_triple") + " --format json --seed 1 --out " + tmp.q());
    const auto b = cli("run " + scenario("strong_regularity_triple") + " --format json --seed 2 --force --out " + tmp.q());
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    CHECK(json::parse(a.out)["scenario"]["config"]["seed"] == 1);
    CHECK(json::parse(b.out)["scenario"]["config"]["seed"] == 2);
}

TEST_CASE("verify passes on the bundled set and can write artifacts")
{
    TempDir tmp;
    const auto r = cli("verify --workers 4 --format json --out " + tmp.q());
    CHECK(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["summary"]["passed"] == true);
    CHECK(fs::exists(tmp.path / "two_lines_angle_30" / "trajectory.csv"));
    CHECK(fs::exists(tmp.path / "dr_affine_classical" / "shadow.csv"));
    CHECK(cli("verify --out " + tmp.q()).code == 2);
}
