#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

// Drives the built binary through its documented invocations. The build
// bakes the binary's location in as CARDINAL_CLI_PATH; every case shells
// out and inspects the exit code and the merged output.

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run_cli(const std::string& args) {
    std::string cmd = std::string(CARDINAL_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    std::size_t n = 0;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0)
        out.append(buf, n);
    int status = pclose(pipe);
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.output = out;
    return r;
}

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

} // namespace

TEST_CASE("card reports value, valuation and invertibility") {
    RunResult r = run_cli("card --prime 2 --ring en --height 2 \"B1\"");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.output, "value: 2\n"));
    CHECK(contains(r.output, "valuation: 1\n"));
    CHECK(contains(r.output, "invertible: no\n"));
    CHECK(contains(r.output, "rule: em_box_morava"));

    r = run_cli("card --prime 3 --ring q \"B2\"");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.output, "value: 3\n"));
    CHECK(contains(r.output, "invertible: yes\n"));
    CHECK(contains(r.output, "rule: homotopy_cardinality"));

    r = run_cli("card --prime 2 --ring en --height 2 \"W(B1)\"");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.output, "value: 5\n"));
    CHECK(contains(r.output, "valuation: 0\n"));
    CHECK(contains(r.output, "invertible: yes\n"));
}

TEST_CASE("dim reports the loop-space dimension") {
    RunResult r = run_cli("dim --prime 2 --height 2 \"B1\"");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.output, "value: 4\n"));
    CHECK(contains(r.output, "rule: morava_dimension_em"));

    CHECK(contains(run_cli("dim --prime 5 --height 0 \"B3\"").output, "value: 1\n"));
    CHECK(contains(run_cli("dim --prime 2 --height 3 \"pt\"").output, "value: 1\n"));
}

TEST_CASE("bootstrap prints the descent trace") {
    RunResult r = run_cli("bootstrap --prime 2 --height 3 --target 1");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.output, "step 0: B1 = 4 (valuation 2)\n"));
    CHECK(contains(r.output, "step 1: W(B1) = 22 (valuation 1)\n"));
    CHECK(contains(r.output, "step 2: W(W(B1)) = 319 (valuation 0)\n"));
    CHECK(contains(r.output, "verdict: amenable-witness(W(W(B1)))\n"));
    CHECK(contains(r.output, "observed_length: 2\n"));

    r = run_cli("bootstrap --prime 2 --height 1 --target 1");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.output, "verdict: already-invertible\n"));
    CHECK_FALSE(contains(r.output, "step 0"));

    // A starved truncation fails the descent; the trace still prints.
    r = run_cli("bootstrap --prime 2 --height 3 --target 1 --mode truncated --precision 2");
    CHECK(r.exit_code == 1);
    CHECK(contains(r.output, "verdict: failed(precision-exhausted)\n"));
}

TEST_CASE("seeded JSON reports are byte-identical across reruns") {
    for (const std::string& invocation :
         {std::string("card --prime 2 --ring en --height 2 --seed 9 --json \"W(B1) + pt\""),
          std::string("bootstrap --prime 3 --height 2 --target 2 --seed 9 --json"),
          std::string("bootstrap --prime 2 --height 4 --target 1 --json"),
          std::string("check --suite span --seed 11 --json"),
          std::string("check --suite delta --seed 11 --json")}) {
        CAPTURE(invocation);
        RunResult a = run_cli(invocation);
        RunResult b = run_cli(invocation);
        CHECK(a.exit_code == 0);
        CHECK(a.exit_code == b.exit_code);
        CHECK(a.output == b.output);
    }
}

TEST_CASE("JSON reports parse and record the session") {
    RunResult r = run_cli("card --prime 2 --ring en --height 2 --seed 77 --json \"B1\"");
    nlohmann::json j = nlohmann::json::parse(r.output);
    CHECK(j["seed"] == 77);
    CHECK(j["rule"] == "em_box_morava");
    CHECK(j["expression"] == "B1");
    CHECK(j["value"] == "2");
    CHECK(j["valuation"] == 1);
    CHECK(j["invertible"] == false);

    r = run_cli("bootstrap --prime 2 --height 2 --target 1 --json");
    j = nlohmann::json::parse(r.output);
    CHECK(j["seed"] == 0);
    CHECK(j["prime"] == 2);
    CHECK(j["height"] == 2);
    CHECK(j["target"] == 1);
    CHECK(j["mode"] == "exact");
    REQUIRE(j["steps"].size() == 2);
    CHECK(j["steps"][1]["value"] == "5");
    CHECK(j["verdict"] == "amenable-witness(W(B1))");
    CHECK(j["predicted_length"] == 1);

    r = run_cli("check --suite groupoid --prime 2 --seed 3 --json");
    CHECK(r.exit_code == 0);
    j = nlohmann::json::parse(r.output);
    CHECK(j["seed"] == 3);
    CHECK(j["suite"] == "groupoid");
    CHECK(j["passed"] == true);
    REQUIRE(j["sections"].size() == 1);
    CHECK(j["sections"][0]["rule"] == "alpha_box");
    CHECK(j["sections"][0]["instances"] == 19); // 14 groups up to order 8 plus 5 discrete sets
    CHECK(j["sections"][0]["failures"] == 0);

    // Different seeds must show up in the report, and only there.
    std::string a = run_cli("check --suite span --seed 1 --json").output;
    std::string b = run_cli("check --suite span --seed 2 --json").output;
    CHECK(a != b);
    nlohmann::json ja = nlohmann::json::parse(a);
    nlohmann::json jb = nlohmann::json::parse(b);
    CHECK(ja["seed"] == 1);
    CHECK(jb["seed"] == 2);
    CHECK(ja["passed"] == jb["passed"]);
}

TEST_CASE("check suites pass and report counts") {
    RunResult r = run_cli("check --suite delta --prime 3");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.output, "[delta_laws] Q(fermat, p=3): "));
    CHECK(contains(r.output, "[delta_functoriality]"));
    CHECK(contains(r.output, "result: PASS"));

    r = run_cli("check --suite span --seed 7");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.output, "fubini: 100 instances, 0 failures"));
    CHECK(contains(r.output, "homogeneity: 50 instances, 0 failures"));
    CHECK(contains(r.output, "distributivity: 50 instances, 0 failures"));
    CHECK(contains(r.output, "additivity: 50 instances, 0 failures"));

    r = run_cli("check --suite all --seed 5");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.output, "result: PASS"));
}

TEST_CASE("negative control fails loudly") {
    RunResult r = run_cli("check --suite delta --negative-control");
    CHECK(r.exit_code == 1);
    CHECK(contains(r.output, "[corrupted]"));
    CHECK(contains(r.output, "result: FAIL"));
    CHECK(contains(r.output, "additivity"));

    // The control is only meaningful for the delta suite.
    CHECK(run_cli("check --suite span --negative-control").exit_code == 2);
}

TEST_CASE("usage and parse errors exit 2") {
    CHECK(run_cli("card --prime 4 \"B1\"").exit_code == 2);
    CHECK(run_cli("").exit_code == 2);
    CHECK(run_cli("frobnicate").exit_code == 2);
    CHECK(run_cli("card").exit_code == 2);
    CHECK(run_cli("card --prime 2 --ring q --height 2 \"B1\"").exit_code == 2);
    CHECK(run_cli("card --prime 2 --ring en \"B1\"").exit_code == 2);
    CHECK(run_cli("bootstrap --prime 2 --target 1").exit_code == 2);
    CHECK(run_cli("bootstrap --prime 2 --height 0 --target 1").exit_code == 2);
    CHECK(run_cli("check --suite nonsense").exit_code == 2);

    RunResult r = run_cli("card --prime 2 --ring en --height 2 \"B(\"");
    CHECK(r.exit_code == 2);
    CHECK(contains(r.output, "position"));

    CHECK(run_cli("--help").exit_code == 0);
}

TEST_CASE("guards exit 3") {
    // One digit cannot absorb the quotient's precision cost.
    RunResult r =
        run_cli("card --prime 2 --ring en --height 2 --mode truncated --precision 1 \"W(B1)\"");
    CHECK(r.exit_code == 3);
    CHECK(contains(r.output, "guard"));

    // Height 25 seeds at valuation 24 and squares past the digit budget.
    CHECK(run_cli("bootstrap --prime 2 --height 25 --target 1").exit_code == 3);
}
