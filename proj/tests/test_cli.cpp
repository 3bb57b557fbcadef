#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "filtlab/suites.hpp"

using nlohmann::json;
using Catch::Approx;

namespace {

struct CliResult {
    int exit = -1;
    std::string output;
};

CliResult run_cli(const std::string& args) {
    const std::string cmd = std::string("\"") + FILTLAB_CLI_PATH + "\" " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CliResult r;
    char buf[4096];
    while (std::fgets(buf, sizeof buf, pipe)) r.output += buf;
    const int status = pclose(pipe);
    r.exit = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string temp_path(const char* stem) {
    return std::string(FILTLAB_CLI_PATH) + "." + stem + ".json";
}

} // namespace

TEST_CASE("compute emits structured results") {
    const CliResult r =
        run_cli("compute ap-constant --model dyadic --depth 1 --weight 1,3 --p 2 --json");
    REQUIRE(r.exit == 0);
    const json doc = json::parse(r.output);
    CHECK(doc.at("command") == "compute");
    CHECK(doc.at("op") == "ap-constant");
    CHECK(doc.at("result").at("value").get<double>() == Approx(4.0 / 3.0));
    CHECK(doc.at("tool").at("name") == "filtlab");
    CHECK(doc.contains("configHash"));
}

TEST_CASE("compute handles degenerate inputs") {
    const CliResult wolff =
        run_cli("compute wolff-norm --alpha zeros --p 2 --q 1 --depth 1 --weight 1,3 --json");
    REQUIRE(wolff.exit == 0);
    CHECK(json::parse(wolff.output).at("result").at("value").get<double>() == 0.0);

    const CliResult carleson = run_cli("compute carleson-constant --depth 1 --json");
    REQUIRE(carleson.exit == 0);
    CHECK(json::parse(carleson.output).at("result").at("value").get<double>() == 0.0);
}

TEST_CASE("compute prints plain text without --json") {
    const CliResult r = run_cli("compute ainfty-constant --depth 1 --weight 1,3");
    REQUIRE(r.exit == 0);
    CHECK(r.output.find("value = 1.1547") != std::string::npos);
}

TEST_CASE("usage errors exit with code 2") {
    CHECK(run_cli("suite bogus --seed 1").exit == 2);
    CHECK(run_cli("suite lemma2.3 --trials 4").exit == 2);            // randomized: seed required
    CHECK(run_cli("compute ap-constant --depth 1 --weight 1,2,3 --p 2").exit == 2);
    CHECK(run_cli("nonsense").exit == 2);
}

TEST_CASE("capacity overruns exit with code 3") {
    const CliResult r = run_cli("compute sawyer-max --depth 4 --exhaustive-sets --p 2");
    CHECK(r.exit == 3);
}

TEST_CASE("suite runs succeed and report pass") {
    const CliResult r = run_cli("suite ineq2.1 --seed 9 --trials 5 --json");
    REQUIRE(r.exit == 0);
    const json doc = json::parse(r.output);
    CHECK(doc.at("pass").get<bool>());
    CHECK(doc.at("suites").at(0).at("suite") == "ineq2.1");
    CHECK(doc.at("suites").at(0).at("trials").get<int>() == 5);
}

TEST_CASE("zero-trial suite runs pass vacuously") {
    const CliResult r = run_cli("suite thm4.1 --seed 1 --trials 0 --json");
    REQUIRE(r.exit == 0);
    const json doc = json::parse(r.output);
    CHECK(doc.at("suites").at(0).at("pass").get<bool>());
    CHECK(doc.at("suites").at(0).at("failures").empty());
}

TEST_CASE("reports written with --out replay cleanly") {
    const std::string path = temp_path("report");
    const CliResult run =
        run_cli("suite ineq2.1 --seed 9 --trials 3 --json --out \"" + path + "\"");
    REQUIRE(run.exit == 0);
    const CliResult rep = run_cli("replay \"" + path + "\"");
    CHECK(rep.exit == 0);
    CHECK(rep.output.find("DIFFER") == std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("single-trial payload files replay through the cli") {
    const json payload = filtlab::dump_trial(filtlab::find_suite("thm4.1"), 1, 13,
                                             filtlab::SuiteConfig{});
    const std::string path = temp_path("payload");
    {
        std::ofstream f(path);
        f << payload.dump(2) << "\n";
    }
    const CliResult ok = run_cli("replay \"" + path + "\"");
    CHECK(ok.exit == 0);
    CHECK(ok.output.find("verdicts match") != std::string::npos);

    json doctored = payload; // flip one recorded verdict without rehashing
    doctored["checks"][0]["pass"] = !doctored["checks"][0]["pass"].get<bool>();
    {
        std::ofstream f(path);
        f << doctored.dump(2) << "\n";
    }
    const CliResult bad = run_cli("replay \"" + path + "\"");
    CHECK(bad.exit == 1);
    CHECK(bad.output.find("hash mismatch") != std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("sweep prints a csv table") {
    const CliResult r = run_cli("sweep --p-list 2 --steps 2 --depth 3 --seed 1");
    REQUIRE(r.exit == 0);
    CHECK(r.output.rfind("p,delta,ap,ainfty_dual", 0) == 0);
}
