#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

using json = nlohmann::json;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output; // stdout + stderr
};

std::string cli_path() {
    const char* p = std::getenv("LACUNA_CLI");
    REQUIRE_MESSAGE(p != nullptr, "LACUNA_CLI must point at the lacuna binary");
    return p;
}

RunResult run(const std::string& args) {
    std::string cmd = cli_path() + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, n);
    int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string line;
    while (std::getline(is, line)) out.push_back(line);
    return out;
}

std::vector<double> split_csv_row(const std::string& row) {
    std::vector<double> vals;
    std::istringstream is(row);
    std::string cell;
    while (std::getline(is, cell, ',')) vals.push_back(std::stod(cell));
    return vals;
}

} // namespace

TEST_CASE("list: catalog text and json round-trip") {
    auto r = run("list");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("weierstrass_cos(a, b), requires b >= a > 1") != std::string::npos);
    CHECK(r.output.find("n=3 -> 16") != std::string::npos);
    CHECK(r.output.find("riemann") != std::string::npos);

    auto j = run("list --format json");
    CHECK(j.exit_code == 0);
    json parsed = json::parse(j.output);
    REQUIRE(parsed.is_array());
    CHECK(parsed.size() == 8);
    for (const auto& f : parsed) {
        CHECK(f.contains("family"));
        CHECK(f.contains("constraints"));
        CHECK(f.contains("formula"));
    }
}

TEST_CASE("sample: riemann imaginary part vanishes at t = 1") {
    auto r = run("sample --family riemann --t0 0 --t1 2 --points 3 --terms 100");
    CHECK(r.exit_code == 0);
    auto rows = lines_of(r.output);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == "t,re,im");
    auto mid = split_csv_row(rows[2]);
    REQUIRE(mid.size() == 3);
    CHECK(mid[0] == 1.0);
    CHECK(std::abs(mid[2]) <= 1e-15);
}

TEST_CASE("sample: json format") {
    auto r = run("sample --family f_theta --theta 1 --t0 0 --t1 1 --points 5 "
                 "--terms 10 --format json");
    CHECK(r.exit_code == 0);
    json arr = json::parse(r.output);
    REQUIRE(arr.is_array());
    REQUIRE(arr.size() == 5);
    CHECK(arr[0]["t"] == 0.0);
    CHECK(arr[4]["t"] == 1.0);
    CHECK(arr[0].contains("re"));
    CHECK(arr[0].contains("im"));
}

TEST_CASE("sample: identical flags give byte-identical output") {
    std::string flags = "sample --family f_theta --theta 0.7 --t0 0 --t1 3 --points 40";
    auto a = run(flags);
    auto b = run(flags);
    CHECK(a.exit_code == 0);
    CHECK(a.output == b.output);
}

TEST_CASE("sample: --out writes the same bytes atomically") {
    std::string path = "/tmp/lacuna_test_sample.csv";
    std::remove(path.c_str());
    std::string flags = "sample --family darboux --t0 0 --t1 1 --points 16 --terms 12";
    auto direct = run(flags);
    auto filed = run("--out " + path + " " + flags);
    CHECK(filed.exit_code == 0);
    std::ifstream is(path, std::ios::binary);
    REQUIRE(is.good());
    std::stringstream ss;
    ss << is.rdbuf();
    CHECK(ss.str() == direct.output);
    std::remove(path.c_str());
}

TEST_CASE("figure presets produce full grids") {
    auto r = run("figure f3");
    CHECK(r.exit_code == 0);
    auto rows = lines_of(r.output);
    CHECK(rows.size() == 1001); // header + 1000 points
    auto first = split_csv_row(rows[1]);
    auto last = split_csv_row(rows[1000]);
    CHECK(first[0] == 0.0);
    CHECK(last[0] == 150.0);

    auto dev = run("figure f4dev");
    CHECK(dev.exit_code == 0);
    CHECK(lines_of(dev.output).size() == 1001);
}

TEST_CASE("check: verdicts as data, exit 0") {
    auto w = run("check --family weierstrass_cos --a 2 --b 3");
    CHECK(w.exit_code == 0);
    json jw = json::parse(w.output);
    CHECK(jw["verdict"] == "nowhere_differentiable_non_lipschitz");
    CHECK(jw["verdict_basis"] == "symbolic_family_rule");
    for (const char* key :
         {"window", "ratio_min", "ratio_trend", "ab_sup", "ab_tailmax", "gap_sup",
          "gap_tailmax", "convexity_ok", "c1_bound", "holder_alpha_freq",
          "holder_alpha_gap", "verdict", "verdict_basis"})
        CHECK(jw.contains(key));

    auto p = run("check --family power --p 3 --q 1");
    CHECK(p.exit_code == 0);
    CHECK(json::parse(p.output)["verdict"] == "C1");

    auto r = run("check --family riemann");
    CHECK(r.exit_code == 0);
    CHECK(json::parse(r.output)["verdict"] == "inconclusive");

    auto win = run("check --family riemann --j0 10 --j1 80");
    CHECK(win.exit_code == 0);
    json jwin = json::parse(win.output);
    CHECK(jwin["window"][0] == 10);
    CHECK(jwin["window"][1] == 80);

    // lossless numeric round-trip: parse -> dump -> parse reproduces values
    json once = json::parse(w.output);
    json twice = json::parse(once.dump());
    CHECK(once["ratio_min"].get<double>() == twice["ratio_min"].get<double>());
    CHECK(once["ab_sup"].get<double>() == twice["ab_sup"].get<double>());
    CHECK(once == twice);
}

TEST_CASE("extract: dyadic sweep with both routes") {
    auto r = run("extract --family f_theta --theta 1 --k 3..12 --t0 0");
    CHECK(r.exit_code == 0);
    json arr = json::parse(r.output);
    REQUIRE(arr.is_array());
    REQUIRE(arr.size() == 10);
    for (const auto& row : arr) {
        CHECK(row["method"] == "frequency");
        CHECK(row["residual_analytic"].get<double>() <= 1e-6);
        REQUIRE(!row["residual_quadrature"].is_null());
        CHECK(row["residual_quadrature"].get<double>() <= 1e-6);
    }
}

TEST_CASE("extract: weierstrass coefficient value") {
    auto r = run("extract --family weierstrass_cos --a 2 --b 3 --k 6 --t0 0 --no-quadrature");
    CHECK(r.exit_code == 0);
    json arr = json::parse(r.output);
    double re = arr[0]["analytic"]["re"].get<double>();
    CHECK(std::abs(re - 1.0 / 128.0) <= 1e-10);
}

TEST_CASE("extract: ratio violation exits 1 and names the gap method") {
    auto r = run("extract --family power --p 2 --q 3 --k 5 --t0 0 --method frequency");
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("LambdaTooWide") != std::string::npos);
    CHECK(r.output.find("gap") != std::string::npos);

    auto ok = run("extract --family power --p 2 --q 3 --k 5..10 --t0 0 --method gap");
    CHECK(ok.exit_code == 0);
    json arr = json::parse(ok.output);
    CHECK(arr.size() == 6);
    CHECK(std::abs(arr[0]["analytic"]["re"].get<double>() - 0.04) <= 1e-10);

    auto autod = run("extract --family power --p 2 --q 3 --k 5 --t0 0");
    CHECK(autod.exit_code == 0);
    CHECK(json::parse(autod.output)[0]["method"] == "gap");
}

TEST_CASE("probe: riemann derivative") {
    auto r = run("probe riemann-derivative --r 1 --s 1 --h 1e-3 --terms 1e6");
    CHECK(r.exit_code == 0);
    double q = json::parse(r.output)["quotient"].get<double>();
    CHECK(std::abs(q - (-0.5)) <= 0.05);

    auto bad = run("probe riemann-derivative --r 2 --s 1 --h 1e-3 --terms 1e6");
    CHECK(bad.exit_code == 1);
}

TEST_CASE("probe: holder fit through the CLI") {
    auto r = run("probe holder --family f_theta --theta 0.5 --points 256");
    CHECK(r.exit_code == 0);
    double a = json::parse(r.output)["alpha_hat"].get<double>();
    CHECK(std::abs(a - 0.5) <= 0.1);
}

TEST_CASE("probe: oscillation through the CLI") {
    auto r = run("probe oscillation --family f_theta --theta 0.5 --h 0.001 --points 256");
    CHECK(r.exit_code == 0);
    json j = json::parse(r.output);
    CHECK(j["value"].get<double>() > 0.0);
    CHECK(j["h"] == 0.001);
    CHECK(j["points"] == 256);
}

TEST_CASE("probe: quotient divergence through the CLI") {
    auto r = run("probe quotients --family weierstrass_sin --a 2 --b 2.5 --t0 0 "
                 "--rule dyadic --k0 6 --k1 18");
    CHECK(r.exit_code == 0);
    json j = json::parse(r.output);
    auto qs = j["quotients"];
    REQUIRE(qs.size() == 13);
    double prev = 0.0;
    for (const auto& q : qs) {
        double mag = std::hypot(q["re"].get<double>(), q["im"].get<double>());
        CHECK(mag > prev);
        prev = mag;
    }
}

TEST_CASE("exit-code contract") {
    CHECK(run("sample --family f_theta --theta 1 --t0 0 --t1 1 --points 2").exit_code == 0);
    // flag violation -> 1
    CHECK(run("sample --family riemann --t0 0 --t1 1").exit_code == 1);
    CHECK(run("sample --family no_such --t0 0 --t1 1 --points 2").exit_code == 1);
    CHECK(run("nonsense").exit_code == 1);
    // numerical failure -> 2 (tail cap unreachable)
    CHECK(run("sample --family power --p 2 --q 3 --t0 0 --t1 1 --points 2 --eps 1e-9")
              .exit_code == 2);
}
