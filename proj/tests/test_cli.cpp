#include "doctest.h"

#include "commands.hpp"
#include "settings.hpp"

#include "cqed/errors.hpp"
#include "cqed/io.hpp"
#include "cqed/resfluor.hpp"
#include "cqed/series.hpp"

#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>

#include <sys/wait.h>

using namespace cqed;
using namespace cqed::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("cqed_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int cqed_exit(const std::string& args) {
    const std::string cmd = std::string(CQED_BINARY) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), {}};
}

nlohmann::json load(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

}  // namespace

TEST_CASE("settings reject undeclared keys and malformed values") {
    Settings s = defaults_for("g2");
    CHECK_THROWS_AS(s.set("g2.nonsense", "1"), InvalidArgument);
    CHECK_THROWS_AS(s.set("params.G", "1"), InvalidArgument);
    s.set("params.gamma", "2.5e-1 ");
    CHECK(s.num("params.gamma") == 0.25);
    s.set("params.gamma", "0.25x");
    CHECK_THROWS_AS(s.num("params.gamma"), InvalidArgument);
    s.set("g2.tau_points", "1.5");
    CHECK_THROWS_AS(s.integer("g2.tau_points"), InvalidArgument);
    CHECK_THROWS_AS(defaults_for("nonsense"), InvalidArgument);
    CHECK_THROWS_AS(defaults_for("figure", "fig1"), InvalidArgument);
}

TEST_CASE("figure defaults") {
    const Settings f3 = defaults_for("figure", "fig3");
    CHECK(f3.list("figure.focusing_a") == std::vector<double>{0.2, 0.3, 0.4, 0.5});
    CHECK(f3.list("figure.focusing_b") == std::vector<double>{0.7, 0.75, 0.8, 0.82});
    const Settings f7 = defaults_for("figure", "fig7");
    CHECK(f7.num("params.g") == 100.0);
    CHECK(f7.num("params.gamma") == 40.0);
    CHECK(f7.num("params.eps_d") == doctest::Approx(0.501 * 100.0));
    CHECK(f7.integer("trajectory.initial_fock") == 1);
    const Settings f2 = defaults_for("figure", "fig2");
    CHECK(f2.num("params.kappa") / f2.num("params.gamma") == 200.0);
    CHECK(f2.num("params.eps_d") / f2.num("params.gamma") == 50.0);
}

TEST_CASE("ini file sections map onto keys and later overrides win") {
    const fs::path dir = scratch("ini");
    {
        std::ofstream f(dir / "run.ini");
        f << "[params]\ngamma = 2\nfocusing = 0.3\n\n[g2]\ntau_points = 11\n";
    }
    Settings s = defaults_for("g2");
    s.load_ini(dir / "run.ini");
    CHECK(s.num("params.gamma") == 2.0);
    CHECK(s.integer("g2.tau_points") == 11);
    s.set("params.gamma", "3");
    CHECK(s.num("params.gamma") == 3.0);

    {
        std::ofstream f(dir / "bad.ini");
        f << "[g2]\nwindow = 3\n";
    }
    CHECK_THROWS_AS(s.load_ini(dir / "bad.ini"), InvalidArgument);
    {
        std::ofstream f(dir / "loose.ini");
        f << "gamma = 3\n";
    }
    CHECK_THROWS_AS(s.load_ini(dir / "loose.ini"), InvalidArgument);
}

TEST_CASE("csv output reads back exactly") {
    const fs::path dir = scratch("csv");
    Settings s = defaults_for("figure", "fig3");
    s.set("output.dir", dir.string());
    Output out(dir);
    run_command("figure", "fig3", s, out);
    CHECK(out.files() == std::vector<std::string>{"fig3_a.csv", "fig3_b.csv"});

    const CsvTable t = read_csv(dir / "fig3_b.csv");
    REQUIRE(t.header.size() == 5);
    CHECK(t.header[1] == "Gamma_0.7");
    SystemParams p = s.params();
    p.focusing = 0.82;
    const std::vector<double>& gt = t.column("gamma_tau");
    CHECK(gt.size() == 1001);
    CHECK(t.column("Gamma_0.82") == g2_forwards_weak(p, gt));
}

TEST_CASE("trajectory records read back with their configuration") {
    const fs::path dir = scratch("traj");
    Settings s = defaults_for("trajectory");
    s.set("params.g", "1");
    s.set("params.eps_d", "0.3");
    s.set("numerics.n_fock", "6");
    s.set("trajectory.t_end", "1");
    s.set("trajectory.seed", "7");
    s.set("output.dir", dir.string());
    Output out(dir);
    run_command("trajectory", "", s, out);
    REQUIRE(out.files().size() == 2);
    const TrajectoryRecord back = read_record(dir / "trajectory_7.csv");
    CHECK(back.config.seed == 7);
    CHECK(back.config.params.g == 1.0);
    const TrajectoryRecord direct = run_trajectory(back.config);
    CHECK(back.time == direct.time);
    CHECK(back.data == direct.data);
}

TEST_CASE("manifest echoes every resolved setting and reruns bit-identically") {
    const fs::path dir = scratch("rerun");
    REQUIRE(cqed_exit("figure fig3 --set g2.tau_points=201 -o " + (dir / "a").string()) == 0);
    const nlohmann::json m = load(dir / "a" / "manifest.json");
    CHECK(m["tool"] == "cqed");
    CHECK(m["version"] == CQED_VERSION);
    CHECK(m["command"] == "figure");
    CHECK(m["figure"] == "fig3");
    CHECK(m["settings"]["g2.tau_points"] == "201");
    CHECK(m["settings"].size() == defaults_for("figure", "fig3").to_json().size());

    REQUIRE(cqed_exit("rerun " + (dir / "a" / "manifest.json").string() + " -o " + (dir / "b").string()) == 0);
    for (const std::string name : m["outputs"]) {
        INFO(name);
        CHECK(slurp(dir / "a" / name) == slurp(dir / "b" / name));
    }
    nlohmann::json mb = load(dir / "b" / "manifest.json");
    mb["settings"]["output.dir"] = m["settings"]["output.dir"];
    CHECK(mb == m);
}

TEST_CASE("exit statuses") {
    const fs::path dir = scratch("exit");
    const std::string out = " -o " + dir.string();
    CHECK(cqed_exit("g2 --gamma 1 --set g2.tau_points=11 --set g2.method=analytic" + out) == 0);
    CHECK(cqed_exit("g2 --set g2.nonsense=1" + out) == 4);
    CHECK(cqed_exit("g2 --gamma abc" + out) == 4);
    CHECK(cqed_exit("g2 --focusing 1.5 --gamma 1" + out) == 4);
    CHECK(cqed_exit("figure fig1" + out) == 4);
    CHECK(cqed_exit("nonsense") == 4);
    // A strongly driven cavity on two Fock levels fails the truncation check.
    CHECK(cqed_exit("steady-state --gamma 1 --g 1 --eps_d 5 --set numerics.n_fock=2" + out) == 3);

    {
        std::ofstream f(dir / "manifest.json");
        f << R"({"tool": "cqed", "command": "g2", "figure": "", "settings": {"g2.window": "1"}})";
    }
    CHECK(cqed_exit("rerun " + (dir / "manifest.json").string()) == 4);
    {
        std::ofstream f(dir / "broken.json");
        f << "{";
    }
    CHECK(cqed_exit("rerun " + (dir / "broken.json").string()) == 4);
}

TEST_CASE("validate exits nonzero when tolerances are corrupted") {
    CHECK(cqed_exit("validate --fast --inject-failure") == 2);
}
