#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "lbsieve/cli.hpp"

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string tmp_path(const std::string& name) {
    return std::string("cli_test_") + name;
}

} // namespace

TEST_CASE("exit codes") {
    CHECK(lbsieve::cli::run({"arith", "pi", "--limit", "1000",
                             "--out", tmp_path("pi.json")}) == 0);
    CHECK(lbsieve::cli::run({"arith", "pi", "--bogus-flag"}) == 2);
    CHECK(lbsieve::cli::run({"no-such-command"}) == 2);
    CHECK(lbsieve::cli::run({}) == 2);
}

TEST_CASE("artifacts echo their configuration") {
    std::string out = tmp_path("first.json");
    REQUIRE(lbsieve::cli::run({"deficit", "run", "--integral", "first", "--samples",
                               "100000", "--seed", "5", "--out", out}) == 0);
    std::string body = slurp(out);
    CHECK(body.find("\"command\": \"deficit run\"") != std::string::npos);
    CHECK(body.find("\"samples\": 100000") != std::string::npos);
    CHECK(body.find("\"seed\": 5") != std::string::npos);
    CHECK(body.find("\"value\":") != std::string::npos);
}

TEST_CASE("equal seeds give byte-identical bodies") {
    std::string a = tmp_path("det_a.json"), b = tmp_path("det_b.json");
    REQUIRE(lbsieve::cli::run({"deficit", "run", "--integral", "second", "--samples",
                               "150000", "--seed", "99", "--out", a}) == 0);
    REQUIRE(lbsieve::cli::run({"deficit", "run", "--integral", "second", "--samples",
                               "150000", "--seed", "99", "--out", b}) == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(!slurp(a).empty());

    SUBCASE("and across thread caps") {
        std::string c = tmp_path("det_c.json");
        REQUIRE(lbsieve::cli::run({"--threads", "1", "deficit", "run", "--integral",
                                   "second", "--samples", "150000", "--seed", "99",
                                   "--out", c}) == 0);
        CHECK(slurp(a) == slurp(c));
    }
    SUBCASE("a different seed changes the body") {
        std::string d = tmp_path("det_d.json");
        REQUIRE(lbsieve::cli::run({"deficit", "run", "--integral", "second",
                                   "--samples", "150000", "--seed", "100", "--out",
                                   d}) == 0);
        CHECK(slurp(a) != slurp(d));
    }
}

TEST_CASE("config files supply defaults, flags win") {
    std::string cfg = tmp_path("cfg.ini");
    {
        std::ofstream out(cfg);
        out << "[arith.pi]\nlimit=10000\n";
    }
    std::string a = tmp_path("cfg_a.json");
    REQUIRE(lbsieve::cli::run({"--config", cfg, "arith", "pi", "--out", a}) == 0);
    CHECK(slurp(a).find("\"pi\": 1229") != std::string::npos);
    std::string b = tmp_path("cfg_b.json");
    REQUIRE(lbsieve::cli::run({"--config", cfg, "arith", "pi", "--limit", "1000",
                               "--out", b}) == 0);
    CHECK(slurp(b).find("\"pi\": 168") != std::string::npos);
}

TEST_CASE("a decomposition file reproduces the built-in profile") {
    std::string d1_path = std::string(LBSIEVE_SOURCE_DIR) + "/data/decomposition_d1.json";
    std::string a = tmp_path("prof_builtin.json"), b = tmp_path("prof_file.json");
    REQUIRE(lbsieve::cli::run({"lambda", "profile", "--x", "10000000", "--window",
                               "20000", "--out", a}) == 0);
    REQUIRE(lbsieve::cli::run({"lambda", "profile", "--x", "10000000", "--window",
                               "20000", "--decomposition", d1_path, "--out", b}) == 0);
    std::string body_a = slurp(a), body_b = slurp(b);
    // bodies differ only in the echoed decomposition path
    auto strip = [](std::string s) {
        auto pos = s.find("\"decomposition\"");
        auto end = s.find("}", pos);
        return s.substr(0, pos) + s.substr(end);
    };
    CHECK(strip(body_a) == strip(body_b));
    CHECK(body_a.find("\"sum_lambda\":") != std::string::npos);
}

TEST_CASE("verify scan emits the documented CSV columns") {
    std::string out = tmp_path("scan.csv");
    REQUIRE(lbsieve::cli::run({"verify", "scan", "--lo", "100000", "--hi", "100050",
                               "--delta", "0.01", "--budget", "0.56", "--out",
                               out}) == 0);
    std::string body = slurp(out);
    CHECK(body.find("n,p,a,b,theta") != std::string::npos);
    CHECK(body.find("# failures=0") != std::string::npos);
    CHECK(body.find("100000,") != std::string::npos);
}
