#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(DLSS_CLI) + " " + args + " > cli_log.txt 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

struct Csv {
    std::map<std::string, std::string> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::size_t col(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return i;
        FAIL("missing column " << name);
        return 0;
    }
};

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string f; std::getline(ss, f, ',');) out.push_back(f);
    return out;
}

Csv read_csv(const fs::path& p) {
    REQUIRE(fs::exists(p));
    Csv csv;
    std::ifstream in(p);
    for (std::string line; std::getline(in, line);) {
        if (line.starts_with("# ")) {
            const auto colon = line.find(": ");
            if (colon != std::string::npos) csv.meta[line.substr(2, colon - 2)] = line.substr(colon + 2);
        } else if (csv.columns.empty()) {
            csv.columns = split(line);
        } else {
            std::vector<double> row;
            for (const auto& f : split(line)) row.push_back(std::strtod(f.c_str(), nullptr));
            REQUIRE(row.size() == csv.columns.size());
            csv.rows.push_back(row);
        }
    }
    return csv;
}

json read_json(const fs::path& p) {
    REQUIRE(fs::exists(p));
    std::ifstream in(p);
    return json::parse(in);
}

}  // namespace

TEST_CASE("solve writes trajectory, diagnostics and manifest") {
    fs::remove_all("cli_solve");
    REQUIRE(run("solve -o cli_solve --alpha 2 --n 32 --dt 1e-7 --t-end 2e-6 --record-every 5") == 0);
    const auto traj = read_csv("cli_solve/trajectory.csv");
    CHECK(traj.meta.at("schema") == "dlss-trajectory/1");
    CHECK(traj.columns == std::vector<std::string>{"t", "k", "c_k", "J_k"});
    CHECK(traj.rows.size() == 5 * 32);
    const auto diag = read_csv("cli_solve/diagnostics.csv");
    CHECK(diag.meta.at("schema") == "dlss-diagnostics/1");
    CHECK(diag.meta.at("quadrature") == "trapezoidal");
    REQUIRE(diag.rows.size() == 5);
    const auto e = diag.col("energy"), m = diag.col("mass");
    for (std::size_t i = 1; i < diag.rows.size(); ++i) {
        CHECK(diag.rows[i][e] <= diag.rows[i - 1][e]);
        CHECK(std::abs(diag.rows[i][m] - diag.rows[0][m]) <= 1e-12);
    }
    // 17 significant digits round-trip the doubles
    CHECK(diag.rows[1][diag.col("t")] == 5e-7);

    const auto man = read_json("cli_solve/manifest.json");
    CHECK(man["schema"] == "dlss-manifest/1");
    CHECK(man["command"] == "solve");
    CHECK(man["config"]["activity"]["alpha"] == 2.0);
    CHECK(man["quadrature"]["dissipation_in_time"] == "trapezoidal");
    CHECK(man.contains("seed"));
    CHECK(man.contains("version"));
    CHECK(man["activity"]["family"] == "stolarsky-power");
    CHECK(man["files"].size() == 2);
}

TEST_CASE("dt sweep writes an EDB table") {
    fs::remove_all("cli_sweep");
    REQUIRE(run("solve -o cli_sweep --alpha 1 --n 32 --t-end 2e-5 --sweep-dt 4e-6 2e-6 1e-6") == 0);
    const auto t = read_csv("cli_sweep/edb_vs_dt.csv");
    CHECK(t.meta.at("schema") == "dlss-edb/1");
    REQUIRE(t.rows.size() == 3);
    CHECK(t.rows[2][t.col("order")] > 0.9);
    CHECK(fs::exists("cli_sweep/alpha1_n32_dt1e-06/trajectory.csv"));
}

TEST_CASE("profile, wave-check and converge") {
    fs::remove_all("cli_misc");
    REQUIRE(run("profile -o cli_misc --alpha 1") == 0);
    const auto p = read_csv("cli_misc/profile_alpha1.csv");
    CHECK(p.meta.at("schema") == "dlss-profile/1");
    CHECK(std::stod(p.meta.at("b_star")) == doctest::Approx(-0.5).epsilon(1e-6));
    CHECK(p.rows.front()[p.col("phi")] == 1.0);

    REQUIRE(run("wave-check -o cli_misc --alpha 1.5") == 0);
    const auto w = read_csv("cli_misc/wave_residual.csv");
    CHECK(w.meta.at("schema") == "dlss-wave/1");
    CHECK(w.rows.back()[w.col("order")] == doctest::Approx(4.0).epsilon(0.05));

    REQUIRE(run("converge -o cli_misc --n 32 64 128 --t-end 1e-5") == 0);
    const auto r = read_csv("cli_misc/refinement.csv");
    CHECK(r.meta.at("schema") == "dlss-refinement/1");
    REQUIRE(r.rows.size() == 3);
    CHECK(r.rows[1][r.col("order")] >= 1.8);
    CHECK(r.rows[0][r.col("dissipation_gap")] >= 0.0);
    CHECK(read_json("cli_misc/manifest.json")["command"] == "converge");
}

TEST_CASE("check --quick") {
    fs::remove_all("cli_check");
    REQUIRE(run("check --quick -o cli_check") == 0);
    const auto rep = read_json("cli_check/check_report.json");
    CHECK(rep["all_passed"] == true);
}

TEST_CASE("exit codes") {
    CHECK(run("solve -o cli_bad --family nope") == 2);
    std::ofstream("cli_bad.json") << R"({"grid": {"n": 16, "typo": 1}})";
    CHECK(run("solve -c cli_bad.json -o cli_bad") == 2);
    std::ofstream("cli_bad2.json") << "{not json";
    CHECK(run("solve -c cli_bad2.json -o cli_bad") == 2);
    CHECK(run("profile -o cli_bad --alpha 2 --b-lo -0.1") == 4);
    CHECK(run("solve -o cli_bad --damping 3") == 2);

    std::ofstream("cli_ok.json") << R"({"grid": {"n": 16}, "solver": {"dt": 1e-6, "t_end": 3e-6}})";
    fs::remove_all("cli_cfg");
    REQUIRE(run("solve -c cli_ok.json -o cli_cfg") == 0);
    CHECK(read_json("cli_cfg/manifest.json")["config"]["grid"]["n"] == 16);
}
