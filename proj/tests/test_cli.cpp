#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "config.hpp"
#include "doctest.h"
#include "json.hpp"
#include "verify.hpp"

using namespace relpend;
using namespace relpend::cli;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() / ("relpend_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    fs::path write(const std::string& name, const std::string& content) const {
        std::ofstream(path / name) << content;
        return path / name;
    }
};

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "relpend");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), {out, err});
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), {}};
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

const char* kPendulum = R"({"params": {"a": 0.2, "T": 6.283185307179586, "N": 0}})";
const char* kForced = R"({"params": {"a": 0.2, "T": 6.283185307179586, "N": 0, "forcing": {"cos": [0.1]}}})";

}  // namespace

TEST_CASE("check reports admissibility and the twist regime") {
    TempDir d;
    auto r = run({"--config", d.write("n1.json", R"({"params": {"a": 0.2, "T": 6.283185307179586, "N": 1}})").string(), "check"});
    CHECK(r.code == exit_code::inadmissible);
    CHECK(r.out.find("inadmissible") != std::string::npos);
    r = run({"--config", d.write("n2.json", R"({"params": {"a": 0.2, "T": 6.283185307179586, "N": 2}})").string(), "check"});
    CHECK(r.code == exit_code::inadmissible);
    r = run({"--config", d.write("t10.json", R"({"params": {"a": 0.2, "T": 10, "N": 1}})").string(), "check"});
    CHECK(r.code == exit_code::ok);
    r = run({"--config", d.write("ok.json", kPendulum).string(), "check"});
    CHECK(r.code == exit_code::ok);
    CHECK(r.out.find("admissible; a < pi^2/T^2 (0.2 < 0.25): twist regime") != std::string::npos);
    r = run({"--config", d.write("a3.json", R"({"params": {"a": 0.3, "T": 6.283185307179586, "N": 0}})").string(), "check"});
    CHECK(r.code == exit_code::ok);
    CHECK(r.out.find("twist not guaranteed") != std::string::npos);
}

TEST_CASE("usage and configuration errors exit 64") {
    TempDir d;
    CHECK(run({}).code == exit_code::usage);
    CHECK(run({"bogus"}).code == exit_code::usage);
    CHECK(run({"--config", (d.path / "absent.json").string(), "check"}).code == exit_code::usage);
    CHECK(run({"--config", d.write("bad.json", "{not json").string(), "check"}).code == exit_code::usage);
    auto r = run({"--config", d.write("unknown.json", R"({"params": {"a": 0.2, "T": 1, "N": 0}, "extra": 1})").string(), "check"});
    CHECK(r.code == exit_code::usage);
    CHECK(r.err.find("extra") != std::string::npos);
    CHECK(run({"--config", d.write("nested.json", R"({"solver": {"grdi": 3}})").string(), "check"}).code == exit_code::usage);
    CHECK(run({"check"}).code == exit_code::usage);
    CHECK(run({"--help"}).code == exit_code::ok);
}

TEST_CASE("config parsing") {
    const auto cfg = parse_config(nlohmann::json::parse(R"({
        "params": {"a": 0.1, "T": 12.566370614359172, "N": 1},
        "integrator": {"rtol": 1e-9},
        "solver": {"grid": 90, "margin": 2},
        "output": "x.csv",
        "sweep": {"a": [0.1, 0.05], "forcing_scale": [0, 1]},
        "verify": {"assert_twist": true, "suites": ["model"]}
    })"));
    CHECK(cfg.require_params().winding() == 1);
    CHECK(cfg.integrator.rtol == 1e-9);
    CHECK(cfg.integrator.atol == 1e-12);
    CHECK(cfg.solver.grid == 90);
    CHECK(cfg.solver.margin == 2.0);
    CHECK(*cfg.output == "x.csv");
    const auto tuples = cfg.sweep.tuples(cfg.require_params());
    CHECK(tuples.size() == 4);
    CHECK(cfg.verify.assert_twist);
    CHECK_THROWS_AS((void)RunConfig{}.require_params(), ConfigError);
    CHECK_THROWS_AS((void)parse_config(nlohmann::json::parse(R"({"integrator": {"rtol": -1}})")), ConfigError);
}

TEST_CASE("find-periodic writes two orbits for the autonomous pendulum") {
    TempDir d;
    const auto out = d.path / "orbits.jsonl";
    const auto r = run({"--config", d.write("c.json", kPendulum).string(), "--out", out.string(), "find-periodic"});
    REQUIRE(r.code == exit_code::ok);
    const auto text = slurp(out);
    CHECK(lines(text) == 2);
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        const auto j = nlohmann::json::parse(line);
        for (const char* k : {"q0", "p0", "residual", "index", "trace", "class", "winding", "unstable"}) CHECK(j.contains(k));
    }
}

TEST_CASE("outputs are byte-identical across runs") {
    TempDir d;
    const auto cfg = d.write("c.json", R"({"params": {"a": 0.2, "T": 6.283185307179586, "N": 0, "forcing": {"cos": [0.1]}},
        "simulate": {"q0": 0.3, "p0": 0.1, "samples": 50},
        "poincare_grid": {"grid_q": 3, "grid_p": 3, "iterates": 5},
        "twist_map": {"grid": 6, "boundary_grid": 16},
        "autonomous": {"libration_levels": 5, "running_levels": 5}})").string();
    for (const char* cmd : {"simulate", "poincare-grid", "find-periodic", "twist-map", "autonomous"}) {
        CAPTURE(cmd);
        const auto a = d.path / (std::string(cmd) + ".1"), b = d.path / (std::string(cmd) + ".2");
        REQUIRE(run({"--config", cfg, "--out", a.string(), cmd}).code == exit_code::ok);
        REQUIRE(run({"--config", cfg, "--out", b.string(), "--jobs", "1", cmd}).code == exit_code::ok);
        CHECK(slurp(a) == slurp(b));
        CHECK_FALSE(slurp(a).empty());
    }
}

TEST_CASE("simulate and poincare-grid file shapes") {
    TempDir d;
    const auto cfg = d.write("c.json", R"({"params": {"a": 0.25, "T": 6.283185307179586, "N": 0},
        "simulate": {"q0": 0.5, "p0": 0, "samples": 3},
        "poincare_grid": {"seeds": [[0.1, 0.2], [1, -1]], "iterates": 4}})").string();
    const auto traj = d.path / "t.csv";
    REQUIRE(run({"--config", cfg, "--out", traj.string(), "simulate"}).code == exit_code::ok);
    const auto t = slurp(traj);
    CHECK(t.rfind("t,q,p,x,v,E\n", 0) == 0);
    CHECK(lines(t) == 4);
    const auto grid = d.path / "g.csv";
    REQUIRE(run({"--config", cfg, "--out", grid.string(), "poincare-grid"}).code == exit_code::ok);
    const auto g = slurp(grid);
    CHECK(g.rfind("seed,iterate,q,p\n", 0) == 0);
    CHECK(lines(g) == 1 + 2 * 5);
}

TEST_CASE("twist-map report with curve intersections") {
    TempDir d;
    std::ostringstream curve;
    curve << "q,p\n";
    for (int i = 0; i < 256; ++i) curve << 6.283185307179586 * i / 256 << "," << 0.2 * std::sin(6.283185307179586 * i / 256) << "\n";
    const auto csv = d.write("curve.csv", curve.str());
    const auto cfg = d.write("c.json", std::string(R"({"params": {"a": 0.2, "T": 6.283185307179586, "N": 0, "forcing": {"cos": [0.1]}},
        "twist_map": {"grid": 8, "boundary_grid": 16, "curves": [")") + csv.string() + R"("]}})");
    const auto out = d.path / "twist.json";
    REQUIRE(run({"--config", cfg.string(), "--out", out.string(), "twist-map"}).code == exit_code::ok);
    const auto j = nlohmann::json::parse(slurp(out));
    CHECK(j.at("min_twist").get<double>() > 0.0);
    CHECK(j.at("grid") == 8);
    CHECK(j.contains("params_hash"));
    CHECK(j.at("boundary").at("min_upper").get<double>() > 0.0);
    REQUIRE(j.at("intersections").size() == 1);
    CHECK(j.at("intersections")[0].at("count").get<int>() >= 2);
}

TEST_CASE("autonomous table in the free case matches the closed form") {
    TempDir d;
    const auto cfg = d.write("c.json", R"({"params": {"a": 0, "T": 12.566370614359172, "N": 1},
        "autonomous": {"libration_levels": 0, "running_levels": 20}})");
    const auto out = d.path / "auto.csv";
    const auto r = run({"--config", cfg.string(), "--out", out.string(), "autonomous"});
    REQUIRE(r.code == exit_code::ok);
    CHECK(r.err.find("warning") != std::string::npos);
    std::istringstream is(slurp(out));
    std::string line;
    std::getline(is, line);
    CHECK(line == "E,class,period_or_TN");
    int running = 0;
    while (std::getline(is, line)) {
        std::istringstream row(line);
        std::string e, cls, v;
        std::getline(row, e, ',');
        std::getline(row, cls, ',');
        std::getline(row, v, ',');
        if (cls != "running") continue;
        const double E = std::stod(e);
        CHECK(std::abs(std::stod(v) - 6.283185307179586 / std::sqrt(1.0 - 1.0 / (E * E))) < 1e-9);
        ++running;
    }
    CHECK(running == 20);
}

TEST_CASE("sweep reports two orbits for every forced row and ignores shuffling") {
    TempDir d;
    const auto cfg = d.write("c.json", R"({"params": {"a": 0.2, "T": 6.283185307179586, "N": 0, "forcing": {"cos": [0.1]}},
        "solver": {"grid": 180}, "sweep": {"a": [0.24, 0.05, 0.1], "N": [0, 1], "twist_grid": 6}})");
    const auto a = d.path / "a.csv", b = d.path / "b.csv";
    REQUIRE(run({"--config", cfg.string(), "--out", a.string(), "sweep"}).code == exit_code::ok);
    REQUIRE(run({"--config", cfg.string(), "--out", b.string(), "--seed", "7", "sweep"}).code == exit_code::ok);
    const auto text = slurp(a);
    CHECK(text == slurp(b));
    std::istringstream is(text);
    std::string line;
    std::getline(is, line);
    int ok = 0, inadmissible = 0;
    while (std::getline(is, line)) {
        if (line.find(",inadmissible,") != std::string::npos) {
            ++inadmissible;
            continue;
        }
        CHECK(line.find(",ok,") != std::string::npos);
        std::istringstream row(line);
        std::string cell;
        for (int c = 0; c < 6; ++c) std::getline(row, cell, ',');
        CHECK(std::stoi(cell) >= 2);
        ++ok;
    }
    CHECK(ok == 3);
    CHECK(inadmissible == 3);
}

TEST_CASE("a failing command leaves no partial file") {
    TempDir d;
    const auto cfg = d.write("c.json", R"({"params": {"a": 0.2, "T": 6.283185307179586, "N": 0},
        "integrator": {"max_steps": 2}, "simulate": {"q0": 0.5, "p0": 0}})");
    const auto out = d.path / "never.csv";
    const auto r = run({"--config", cfg.string(), "--out", out.string(), "simulate"});
    CHECK(r.code == exit_code::no_convergence);
    CHECK_FALSE(fs::exists(out));
    CHECK(std::distance(fs::directory_iterator(d.path), fs::directory_iterator{}) == 1);
}

TEST_CASE("inadmissible parameters exit 2 from the map commands") {
    TempDir d;
    const auto cfg = d.write("c.json", R"({"params": {"a": 0.2, "T": 6.283185307179586, "N": 1}})");
    CHECK(run({"--config", cfg.string(), "--out", (d.path / "x").string(), "poincare-grid"}).code == exit_code::inadmissible);
    CHECK(run({"--config", cfg.string(), "--out", (d.path / "y").string(), "find-periodic"}).code == exit_code::inadmissible);
}

TEST_CASE("verify passes by default and fails on deliberate degradation") {
    TempDir d;
    auto r = run({"verify"});
    CHECK(r.code == exit_code::ok);
    CHECK(r.out.find("all suites passed") != std::string::npos);
    for (const auto& s : suite_names()) CHECK(r.out.find("PASS " + s) != std::string::npos);

    CHECK(run({"--config", d.write("nope.json", R"({"verify": {"suites": ["nope"]}})").string(), "verify"}).code == exit_code::usage);

    r = run({"--config", d.write("loose.json", R"({"integrator": {"rtol": 1e-3, "atol": 1e-5}, "verify": {"suites": ["symplecticity"]}})").string(), "verify"});
    CHECK(r.code == exit_code::verify_failed);
    CHECK(r.out.find("FAIL symplecticity") != std::string::npos);
    CHECK(r.out.find("det") != std::string::npos);

    r = run({"--config", d.write("a3.json", R"({"params": {"a": 0.3, "T": 6.283185307179586, "N": 0}, "verify": {"assert_twist": true, "suites": ["twist"]}})").string(), "verify"});
    CHECK(r.code == exit_code::verify_failed);
    CHECK(r.out.find("FAIL twist") != std::string::npos);
}

TEST_CASE("suite results report their worst check") {
    SuiteResult s{"x", {{"a", 1e-12, 1e-8, false, true}, {"b", 1e-9, 1e-8, false, true}}, ""};
    CHECK(s.passed());
    CHECK(s.worst()->name == "b");
    s.checks.push_back({"c", 1.0, 0.0, true, false});
    CHECK_FALSE(s.passed());
    CHECK(s.worst()->name == "c");
    SuiteResult e{"y", {}, "boom"};
    CHECK_FALSE(e.passed());
}
