// test_cli.cpp — command dispatch, flag precedence, exit codes, CSV output

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "cli.hpp"

using namespace nmark;
namespace fs = std::filesystem;

namespace {
struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "nmark");
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::map<std::string, std::string> report(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        const auto eq = line.find('=');
        if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return kv;
}

std::vector<std::vector<double>> csv_rows(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    std::getline(is, line);  // header
    std::vector<std::vector<double>> rows;
    while (std::getline(is, line)) {
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}

std::string header(const std::string& text) { return text.substr(0, text.find('\n')); }

fs::path write_config(const std::string& name, const std::string& body) {
    const auto path = fs::temp_directory_path() / name;
    std::ofstream(path) << body;
    return path;
}
}  // namespace

TEST_CASE("parse_distance") {
    CHECK(std::isinf(cli::parse_distance("inf")));
    CHECK(std::isinf(cli::parse_distance("Inf")));
    CHECK(std::isinf(cli::parse_distance("infinity")));
    CHECK(cli::parse_distance("1.5") == 1.5);
    CHECK(cli::parse_distance("0") == 0.0);
    CHECK_THROWS(cli::parse_distance("-1"));
    CHECK_THROWS(cli::parse_distance("far"));
}

TEST_CASE("usage errors exit 1") {
    CHECK(run_cli({}).code == cli::kUsage);
    CHECK(run_cli({"bogus"}).code == cli::kUsage);
    CHECK(run_cli({"rates", "--lambda", "0.0165"}).code == cli::kUsage);
    CHECK(run_cli({"rates", "--gamma0", "0.01"}).code == cli::kUsage);
    CHECK(run_cli({"rates", "--gamma0", "-1", "--lambda", "0.0165"}).code == cli::kUsage);
    CHECK(run_cli({"rates", "--gamma0", "0.01", "--lambda", "0.0165", "--scheme", "euler"}).code == cli::kUsage);
    CHECK(run_cli({"rates", "--gamma0", "0.01", "--lambda", "0.0165", "--d", "x"}).code == cli::kUsage);
    CHECK(run_cli({"rates", "--gamma0", "0.01", "--lambda", "0.0165", "--dt", "0"}).code == cli::kUsage);
    CHECK(run_cli({"rates", "--gamma0", "0.01", "--lambda", "0.0165", "--config", "/nonexistent/x.cfg"}).code == cli::kUsage);
    const auto r = run_cli({"measure", "--gamma0", "0.01", "--lambda", "0.0165", "--t-end", "5", "--alpha", "0"});
    CHECK(r.code == cli::kUsage);
    CHECK_FALSE(r.err.empty());
}

TEST_CASE("rates") {
    const auto r = run_cli({"rates", "--gamma0", "0.01", "--lambda", "0.0165", "--d", "2.1", "--t-end", "350"});
    REQUIRE(r.code == cli::kOk);
    CHECK(header(r.out) == "t,gamma1,gamma2,S1,S2,g,g_uc");
    const auto rows = csv_rows(r.out);
    CHECK(rows.size() == 7001);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i][1] > 0.0);
        CHECK(rows[i][2] > 0.0);
    }
    const auto d0 = run_cli({"rates", "--gamma0", "0.01", "--lambda", "0.0165", "--d", "0", "--t-end", "100"});
    REQUIRE(d0.code == cli::kOk);
    for (const auto& row : csv_rows(d0.out)) CHECK(row[2] == 0.0);
    const auto inf = run_cli({"rates", "--gamma0", "0.01", "--lambda", "0.0165", "--d", "inf", "--t-end", "50"});
    REQUIRE(inf.code == cli::kOk);
    for (const auto& row : csv_rows(inf.out)) CHECK(row[1] == doctest::Approx(row[2]).epsilon(1e-12));
    // numerical failure: the implicit scheme runs away on this coarse grid
    const auto bad = run_cli({"rates", "--gamma0", "3", "--lambda", "0.01", "--d", "0.5", "--t-end", "100", "--dt", "5", "--scheme", "direct"});
    CHECK(bad.code == cli::kNumerical);
}

TEST_CASE("output file") {
    const auto path = fs::temp_directory_path() / "nmark_cli_rates.csv";
    fs::remove(path);
    const auto r = run_cli({"rates", "--gamma0", "0.01", "--lambda", "0.0165", "--t-end", "2", "--out", path.string()});
    REQUIRE(r.code == cli::kOk);
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(header(ss.str()) == "t,gamma1,gamma2,S1,S2,g,g_uc");
    CHECK(csv_rows(ss.str()).size() == 41);
}

TEST_CASE("flag precedence: command line > config file > default") {
    const auto cfg = write_config("nmark_precedence.cfg",
                                  "# test configuration\n"
                                  "gamma0 = 0.01\n"
                                  "lambda = 0.025\n"
                                  "d = 1.0   \n"
                                  "t-end = 20\n");
    const std::string c = cfg.string();
    struct Case {
        std::vector<std::string> extra;
        std::string key, expected;
    };
    const std::vector<Case> matrix{
        {{}, "t_end", "20"},                          // config over default
        {{"--t-end", "5"}, "t_end", "5"},             // flag over config
        {{}, "dt", "0.050000000000000003"},           // default when nobody sets it
        {{"--dt", "0.1"}, "dt", "0.10000000000000001"},
        {{}, "d", "1"},
        {{"--d", "inf"}, "d", "inf"},
        {{}, "scheme", "fast"},
        {{"--scheme", "direct"}, "scheme", "direct"},
    };
    for (const auto& m : matrix) {
        std::vector<std::string> args{"measure", "--config", c};
        args.insert(args.end(), m.extra.begin(), m.extra.end());
        const auto r = run_cli(args);
        CAPTURE(m.key);
        REQUIRE(r.code == cli::kOk);
        CHECK(report(r.out)[m.key] == m.expected);
    }
    // the flag may also come before the subcommand
    const auto r = run_cli({"--t-end", "7", "measure", "--config", c});
    REQUIRE(r.code == cli::kOk);
    CHECK(report(r.out)["t_end"] == "7");
    // config alone supplies the required parameters
    CHECK(run_cli({"rates", "--config", c, "--t-end", "1"}).code == cli::kOk);
    const auto partial = write_config("nmark_partial.cfg", "lambda = 0.0165\n");
    CHECK(run_cli({"rates", "--config", partial.string()}).code == cli::kUsage);
    CHECK(run_cli({"rates", "--config", partial.string(), "--gamma0", "0.01", "--t-end", "1"}).code == cli::kOk);
}

TEST_CASE("measure") {
    const auto m = run_cli({"measure", "--gamma0", "0.01", "--lambda", "0.025", "--d", "1", "--t-end", "200"});
    REQUIRE(m.code == cli::kOk);
    auto kv = report(m.out);
    for (const char* key : {"variant", "value", "measure_total", "measure_uncorrelated", "relaxation_estimate",
                            "pole_count", "t_end", "dt", "d", "scheme", "reg_order", "normalization"}) {
        CAPTURE(key);
        CHECK(kv.count(key) == 1);
    }
    CHECK(std::stod(kv["value"]) == 0.0);
    CHECK(kv["normalization"] == "finite-window");

    // between d_uc and d_c: the uncorrelated part vanishes while the total does not
    const auto u = run_cli({"measure", "--gamma0", "0.01", "--lambda", "0.0165", "--d", "1.88", "--t-end", "4000", "--dt", "0.1", "--uncorrelated"});
    REQUIRE(u.code == cli::kOk);
    kv = report(u.out);
    CHECK(kv["variant"] == "sqrt_weighted_uncorrelated");
    CHECK(std::stod(kv["value"]) == 0.0);
    CHECK(std::stod(kv["measure_total"]) > 0.0);

    const auto path = fs::temp_directory_path() / "nmark_cli_measure.csv";
    fs::remove(path);
    REQUIRE(run_cli({"measure", "--gamma0", "0.01", "--lambda", "0.0165", "--t-end", "10", "--out", path.string()}).code == cli::kOk);
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,F,logF,w,sqrt_g");
}

TEST_CASE("scan") {
    const auto s = run_cli({"scan", "--gamma0", "0.01", "--lambda", "0.0165", "--t-end", "200", "--dt", "0.1",
                            "--d-min", "0.5", "--d-max", "2.5", "--points", "5", "--include-inf"});
    REQUIRE(s.code == cli::kOk);
    CHECK(header(s.out) == "d,measure_total,measure_uncorrelated,min_gamma1,min_gamma_sum,t_end");
    const auto rows = csv_rows(s.out);
    REQUIRE(rows.size() == 6);
    CHECK(rows[0][0] == 0.5);
    CHECK(rows[4][0] == 2.5);
    CHECK(std::isinf(rows[5][0]));
    const auto lg = run_cli({"scan", "--gamma0", "0.01", "--lambda", "0.0165", "--t-end", "50", "--d-min", "0.01",
                             "--d-max", "1", "--points", "3", "--log-spacing"});
    REQUIRE(lg.code == cli::kOk);
    const auto lr = csv_rows(lg.out);
    CHECK(lr[1][0] == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(run_cli({"scan", "--gamma0", "0.01", "--lambda", "0.0165", "--points", "0"}).code == cli::kUsage);
    CHECK(run_cli({"scan", "--gamma0", "0.01", "--lambda", "0.0165", "--d-min", "0", "--log-spacing"}).code == cli::kUsage);
    // every row failing is a numerical failure
    const auto bad = run_cli({"scan", "--gamma0", "3", "--lambda", "0.01", "--t-end", "100", "--dt", "5",
                              "--scheme", "direct", "--d-min", "0.5", "--d-max", "0.5", "--points", "1"});
    CHECK(bad.code == cli::kNumerical);
}

TEST_CASE("critical and natoms") {
    const auto c = run_cli({"critical", "--gamma0", "0.01", "--lambda", "0.0165"});
    REQUIRE(c.code == cli::kOk);
    auto kv = report(c.out);
    CHECK(std::stod(kv["d_c"]) == doctest::Approx(1.904).epsilon(0.02 / 1.904));
    CHECK(std::stod(kv["d_uc"]) == doctest::Approx(1.870).epsilon(0.02 / 1.870));
    CHECK(run_cli({"critical", "--gamma0", "0.01", "--lambda", "0.025"}).code == cli::kNumerical);
    CHECK(run_cli({"critical", "--gamma0", "0.01", "--lambda", "0.0165", "--kind", "sideways"}).code == cli::kUsage);

    const auto n = run_cli({"natoms", "--gamma0", "0.01", "--lambda", "0.03", "--n-max", "6"});
    REQUIRE(n.code == cli::kOk);
    CHECK(header(n.out) == "N,omega_N_sq,nonmarkovian,N_c");
    const auto rows = csv_rows(n.out);
    REQUIRE(rows.size() == 6);
    for (const auto& r : rows) {
        CHECK(r[3] == 5.0);
        CHECK(r[2] == (r[0] >= 5 ? 1.0 : 0.0));
    }
}

TEST_CASE("validate") {
    cli::ValidateOptions quick;
    quick.quick = true;
    std::ostringstream os;
    CHECK(cli::run_validate(quick, os) == cli::kOk);
    CHECK(os.str().find("FAIL") == std::string::npos);
    const auto broken = run_cli({"validate", "--quick", "--dt", "1.0"});
    CHECK(broken.code == cli::kValidation);
    CHECK(broken.out.find("FAIL") != std::string::npos);
    CHECK(run_cli({"validate", "--quick"}).code == cli::kOk);
}
