#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = PLRN_CLI_PATH;
const std::string kDomains = PLRN_DOMAIN_DIR;

struct RunResult {
    int exit_code{};
    std::string out;
    std::string err;
};

fs::path temp_dir() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "plrn_cli_test";
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

RunResult run_cli(const std::string& args) {
    const fs::path out = temp_dir() / "stdout.txt";
    const fs::path err = temp_dir() / "stderr.txt";
    const std::string cmd = kCli + " " + args + " > " + out.string() + " 2> " + err.string();
    const int rc = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WEXITSTATUS(rc);
    std::ostringstream so, se;
    so << std::ifstream(out).rdbuf();
    se << std::ifstream(err).rdbuf();
    r.out = so.str();
    r.err = se.str();
    return r;
}

} // namespace

TEST_CASE("eig-annulus: values and backend cross-check") {
    const auto r = run_cli("eig-annulus --p 2 --n 2 --beta 1 --r1 1 --r2 2");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["lambda"].get<double>() == doctest::Approx(0.99284535028836651).epsilon(1e-10));
    CHECK(j["bessel"]["rel_diff"].get<double>() < 1e-6);
    CHECK(j["bessel"]["alarm"].get<bool>() == false);
    CHECK(j["config"]["version"].is_string());
}

TEST_CASE("eig-annulus: input validation exit codes") {
    const auto r0 = run_cli("eig-annulus --p 2 --n 2 --beta 0 --r1 1 --r2 2");
    CHECK(r0.exit_code == 3);
    CHECK(r0.err.find("beta must be nonzero") != std::string::npos);

    const auto r1 = run_cli("eig-annulus --p 2 --n 2 --beta 1 --r1 2 --r2 1");
    CHECK(r1.exit_code == 3);
}

TEST_CASE("torsion-annulus: closed-form cross-check") {
    const auto r = run_cli("torsion-annulus --p 2 --n 2 --beta 1 --r1 1 --r2 2");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["torsion"].get<double>() == doctest::Approx(9.3354737608249714).epsilon(1e-10));
    CHECK(std::abs(j["closed_form"]["max_pointwise_diff"].get<double>()) < 1e-8);
    CHECK(std::abs(j["energy_identity_residual"].get<double>()) < 1e-10);
}

TEST_CASE("verify: bundled domain passes, reruns are byte-identical") {
    const fs::path out1 = temp_dir() / "report1.json";
    const fs::path out2 = temp_dir() / "report2.json";
    const std::string base = "verify --domain " + kDomains +
                             "/square_hole.dom --p 2 --beta 1 --h 0.1 --mode both --out ";
    CHECK(run_cli(base + out1.string()).exit_code == 0);
    CHECK(run_cli(base + out2.string()).exit_code == 0);
    std::ostringstream s1, s2;
    s1 << std::ifstream(out1).rdbuf();
    s2 << std::ifstream(out2).rdbuf();
    CHECK(s1.str() == s2.str());
    CHECK(s1.str().find("\"all_pass\": true") != std::string::npos);
}

TEST_CASE("verify: near-annulus domain passes with near-zero margins") {
    const auto r = run_cli("verify --domain " + kDomains +
                           "/annulus90.dom --p 2 --beta 1 --h 0.1 --mode eigen");
    CHECK(r.exit_code == 0);
}

TEST_CASE("verify: malformed domain file reports the line") {
    const fs::path bad = temp_dir() / "bad.dom";
    std::ofstream(bad) << "polygon 3\n0 0\nnot_a_number 1\n1 1\n";
    const auto r = run_cli("verify --domain " + bad.string() + " --p 2 --beta 1 --h 0.1");
    CHECK(r.exit_code == 3);
    CHECK(r.err.find("line 3") != std::string::npos);
}

TEST_CASE("sweep: increasing lambda column, grid validation") {
    const fs::path csv = temp_dir() / "sweep.csv";
    const auto r = run_cli(
        "sweep --p 2 --n 2 --beta-min 0.25 --beta-max 4 --count 20 --r1 1 --r2 2 --steps 1024 "
        "--threads 2 --csv " +
        csv.string());
    REQUIRE(r.exit_code == 0);
    std::ifstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "beta,value");
    double prev = -1e308;
    int rows = 0;
    while (std::getline(in, line)) {
        const auto comma = line.find(',');
        const double v = std::stod(line.substr(comma + 1));
        CHECK(v >= prev);
        prev = v;
        ++rows;
    }
    CHECK(rows == 20);

    CHECK(run_cli("sweep --p 2 --n 2 --betas -1,0,1 --r1 1 --r2 2").exit_code == 3);
    const auto single =
        run_cli("sweep --p 2 --n 2 --betas 1.5 --r1 1 --r2 2 --steps 512");
    CHECK(single.exit_code == 0);
    const auto js = nlohmann::json::parse(single.out);
    CHECK(js["result"]["points"].size() == 1);
}

TEST_CASE("geometry and mesh subcommands") {
    const auto g = run_cli("geometry --domain " + kDomains + "/hexagon_hole.dom --rho 0.5 --t 0.2");
    REQUIRE(g.exit_code == 0);
    const auto jg = nlohmann::json::parse(g.out);
    CHECK(jg["quermass"]["W"].size() == 3);
    CHECK(jg["w2_margin"].get<double>() == 0.0);
    CHECK(jg["outer_parallel"]["volume"].get<double>() > jg["quermass"]["volume"].get<double>());

    const fs::path meshfile = temp_dir() / "mesh.txt";
    const auto m = run_cli("mesh --domain " + kDomains + "/square_hole.dom --h 0.1 --out " +
                           meshfile.string());
    REQUIRE(m.exit_code == 0);
    const auto jm = nlohmann::json::parse(m.out);
    CHECK(jm["outer_loops"] == 1);
    CHECK(jm["hole_loops"] == 1);
    CHECK(jm["euler_characteristic"] == 0);
    CHECK(jm["min_angle_deg"].get<double>() >= 20.0 - 1e-9);

    const auto mi = run_cli("mesh --inspect " + meshfile.string());
    REQUIRE(mi.exit_code == 0);
    const auto jmi = nlohmann::json::parse(mi.out);
    CHECK(jmi["nodes"] == jm["nodes"]);
    CHECK(jmi["total_area"].get<double>() ==
          doctest::Approx(jm["total_area"].get<double>()).epsilon(1e-15));
}

TEST_CASE("eig-domain and torsion-domain") {
    const auto r = run_cli("eig-domain --domain " + kDomains +
                           "/square_hole.dom --p 2 --beta 1 --h 0.1");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["lambda"].get<double>() > 0.0);

    const auto t = run_cli("torsion-domain --domain " + kDomains +
                           "/square_hole.dom --p 2 --beta 1 --h 0.1");
    REQUIRE(t.exit_code == 0);
    const auto jt = nlohmann::json::parse(t.out);
    CHECK(jt["torsion"].get<double>() > 0.0);
    CHECK(std::abs(jt["energy_identity_residual"].get<double>()) < 1e-6);
}
