#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <string>

#include "filtlab/suites.hpp"

using namespace filtlab;
using Catch::Approx;

TEST_CASE("registry exposes every suite once") {
    std::set<std::string> names;
    for (const Suite& s : suite_registry()) names.insert(s.name);
    const std::set<std::string> expected = {
        "identities", "ineq2.1",        "lemma2.3", "thm3.1", "thm3.5",
        "thm4.1",     "lemma4.2",       "cor4.5",   "thm5.1", "thm1.1",
        "thm1.2",     "carleson-equiv", "principal-props"};
    CHECK(names == expected);
    CHECK(suite_registry().size() == 13);
    CHECK_THROWS_AS(find_suite("bogus"), UsageError);
}

TEST_CASE("check helpers") {
    const Check pass = make_check("x", 1.0, 1.0, 1.0);
    CHECK(pass.pass);
    const Check fail = make_check("x", 2.0, 1.0, 1.0);
    CHECK_FALSE(fail.pass);
    const Check flag = make_flag("x", 2.0, 1.0, 1.0);
    CHECK(flag.pass);
    CHECK(flag.flagged);
    CHECK(make_check("inf", 3.0, kInf, 1.0).pass);
    CHECK(check_ratio(make_check("r", 1.0, 2.0, 1.0)) == Approx(0.5));
    CHECK(check_ratio(make_check("r", 1.0, 0.0, 1.0)) == kInf);
    CHECK(check_ratio(make_check("r", 0.0, 0.0, 1.0)) == 0.0);

    const Check viaJson = check_from_json(check_to_json(fail));
    CHECK(viaJson.name == "x");
    CHECK(viaJson.lhs == 2.0);
    CHECK_FALSE(viaJson.pass);
    CHECK(json_to_double(json_number(kInf)) == kInf);
}

TEST_CASE("every suite passes a short smoke run") {
    for (const Suite& s : suite_registry()) {
        INFO("suite " << s.name);
        const SuiteRunResult r = run_suite(s, 3, 7, SuiteConfig{}, 1);
        CHECK(r.pass);
        CHECK(r.failures.empty());
        CHECK(r.checksRun > 0);
    }
}

TEST_CASE("zero trials pass vacuously") {
    const SuiteRunResult r = run_suite(find_suite("thm4.1"), 0, 1, SuiteConfig{}, 1);
    CHECK(r.pass);
    CHECK(r.failures.empty());
    CHECK(r.checksRun == 0);
}

TEST_CASE("suite runs are reproducible") {
    const Suite& s = find_suite("thm3.1");
    const SuiteRunResult a = run_suite(s, 5, 42, SuiteConfig{}, 1);
    const SuiteRunResult b = run_suite(s, 5, 42, SuiteConfig{}, 1);
    std::string diff;
    CHECK(numeric_fields_identical(suite_result_to_json(a), suite_result_to_json(b), &diff));
    INFO(diff);
}

TEST_CASE("instances survive a json round trip") {
    const Suite& s = find_suite("thm4.1");
    Rng rng = trial_rng(11, 0);
    const Instance inst = s.generate(rng, SuiteConfig{});
    const Instance back = instance_from_json(instance_to_json(inst));
    const auto c1 = s.run(inst);
    const auto c2 = s.run(back);
    REQUIRE(c1.size() == c2.size());
    for (std::size_t k = 0; k < c1.size(); ++k) {
        CHECK(c1[k].name == c2[k].name);
        CHECK(c1[k].lhs == c2[k].lhs); // bitwise: same arithmetic on same data
        CHECK(c1[k].rhs == c2[k].rhs);
    }
}

TEST_CASE("replay reproduces a recorded trial") {
    const nlohmann::json payload = dump_trial(find_suite("lemma4.2"), 2, 99, SuiteConfig{});
    const ReplayOutcome out = replay_payload(payload);
    CHECK(out.hashOk);
    CHECK(out.verdictMatch);
    CHECK(out.ratiosMatch);
}

TEST_CASE("tampered payloads are detected by the hash") {
    nlohmann::json payload = dump_trial(find_suite("lemma4.2"), 0, 5, SuiteConfig{});
    payload["instance"]["weight"]["values"][0] =
        payload["instance"]["weight"]["values"][0].get<double>() * 2.0;
    const ReplayOutcome out = replay_payload(payload);
    CHECK_FALSE(out.hashOk); // the verdict itself may or may not change
}

TEST_CASE("a doctored bound replays as an honest failure") {
    nlohmann::json payload = dump_trial(find_suite("lemma4.2"), 1, 5, SuiteConfig{});
    auto& checks = payload["checks"];
    REQUIRE(!checks.empty());
    checks[0]["bound"] = 1e-12; // impossible bound: the recorded verdict is a failure
    checks[0]["pass"] = false;
    payload.erase("payloadHash");
    payload["payloadHash"] = hash_hex(fnv1a64(payload.dump()));

    const ReplayOutcome out = replay_payload(payload);
    CHECK(out.hashOk);
    CHECK(out.verdictMatch); // re-evaluated under the recorded bound: still a failure
    CHECK(out.ratiosMatch);  // and the measured ratios reproduce bit-for-bit
    CHECK_FALSE(out.recomputed[0].pass);
}

TEST_CASE("trial errors are captured as failure payloads") {
    Suite broken;
    broken.name = "synthetic";
    broken.generate = [](Rng& rng, const SuiteConfig&) {
        Instance inst;
        inst.params["x"] = rng.uniform(0.0, 1.0);
        return inst;
    };
    broken.run = [](const Instance&) -> std::vector<Check> {
        throw ValidationError("synthetic failure");
    };
    const SuiteRunResult r = run_suite(broken, 2, 3, SuiteConfig{}, 1);
    CHECK_FALSE(r.pass);
    REQUIRE(r.failures.size() == 2);
    CHECK(r.failures[0].at("error").get<std::string>() == "synthetic failure");
    CHECK(r.failures[0].contains("payloadHash"));
}

TEST_CASE("error payloads match on replay when the error recurs") {
    nlohmann::json payload = dump_trial(find_suite("thm3.1"), 0, 3, SuiteConfig{});
    payload["instance"]["params"].erase("theta"); // run() needs theta: rerun will throw
    payload["checks"] = nlohmann::json::array();
    payload["error"] = "instance is missing parameter \"theta\"";
    payload.erase("payloadHash");
    payload["payloadHash"] = hash_hex(fnv1a64(payload.dump()));

    const ReplayOutcome out = replay_payload(payload);
    CHECK(out.hashOk);
    CHECK(out.verdictMatch);
}

TEST_CASE("worker counts do not change the numbers") {
    const Suite& s = find_suite("lemma2.3");
    const SuiteRunResult a = run_suite(s, 12, 4242, SuiteConfig{}, 1);
    const SuiteRunResult b = run_suite(s, 12, 4242, SuiteConfig{}, 8);
    std::string diff;
    CHECK(numeric_fields_identical(suite_result_to_json(a), suite_result_to_json(b), &diff));
    INFO(diff);
}

TEST_CASE("reports carry a stable config hash") {
    const SuiteRunResult r = run_suite(find_suite("ineq2.1"), 4, 8, SuiteConfig{}, 1);
    const nlohmann::json cfg{{"suite", "ineq2.1"}, {"trials", 4}, {"seed", 8}};
    const nlohmann::json rep = suite_report_json("suite", cfg, {r}, "0.1s");
    CHECK(rep.at("configHash").get<std::string>() ==
          hash_hex(fnv1a64(rep.at("config").dump())));
    CHECK(rep.at("pass").get<bool>());
    CHECK(rep.at("suites").size() == 1);
}
