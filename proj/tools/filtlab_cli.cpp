// filtlab command-line driver.
//
//   filtlab compute <op> [model/weight/exponent flags]
//   filtlab suite   <name> --seed S [--trials N --workers K ...]
//   filtlab replay  <file.json>
//   filtlab sweep   [--p-list ... --delta-min ... --delta-max ... --steps ...]
//
// Exit codes: 0 success / replay reproduced, 1 assertion failure or mismatch,
// 2 usage or input error, 3 capacity exceeded.

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "filtlab/suites.hpp"

namespace fl = filtlab;
using nlohmann::json;

namespace {

std::vector<std::string> split(const std::string& s, char delim) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, delim)) out.push_back(cur);
    return out;
}

double to_double(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw fl::UsageError("cannot parse \"" + s + "\" as a number for " + what);
    }
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw fl::UsageError("cannot open file \"" + path + "\"");
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw fl::UsageError("cannot parse JSON from \"" + path + "\": " + e.what());
    }
    return j;
}

struct Options {
    std::string model = "dyadic";
    int depth = 1;
    std::string weight = "const:1";
    std::string weight2;
    std::string alpha = "ones";
    std::string nu = "zeros";
    double p = 2.0;
    double q = 0.0; // 0: follow p where a q is needed
    double s = 2.0;
    double theta = 1.0;
    bool pSet = false, qSet = false, sSet = false, thetaSet = false, depthSet = false;
    std::uint64_t seed = 0;
    bool seedSet = false;
    int trials = 100;
    int workers = 1;
    bool jsonOut = false;
    bool exhaustive = false;
    std::int64_t cap = 100000;
    int level = 0;
    int block = 0;
    std::string out;

    mutable std::optional<fl::Rng> rng;

    fl::Rng& random() const {
        if (!seedSet) throw fl::UsageError("this configuration is randomized; provide --seed");
        if (!rng) rng.emplace(seed);
        return *rng;
    }
    double qOrP() const { return q > 0.0 ? q : p; }
};

void add_common(CLI::App* sub, Options& o) {
    sub->add_option("--model", o.model, "space model: 'dyadic' or a path to a space JSON file");
    auto* depthOpt =
        sub->add_option("--depth", o.depth, "levels of the dyadic model")->check(CLI::Range(0, 20));
    sub->add_option("--weight", o.weight,
                    "weight: const:V | power:DELTA | lognormal:SIGMA | spike | json:PATH | v1,v2,...");
    sub->add_option("--weight2", o.weight2, "second weight (same grammar); defaults per operation");
    sub->add_option("--alpha", o.alpha,
                    "multipliers: zeros | ones | single:LEVEL:VALUE | geometric:RATIO[:SCALE] | "
                    "sparse:PROB:SIGMA | random:SIGMA | json:PATH");
    sub->add_option("--nu", o.nu, "level-block masses: zeros | random:PROB:SIGMA | json:PATH");
    auto* pOpt = sub->add_option("--p", o.p, "primary exponent");
    auto* qOpt = sub->add_option("--q", o.q, "secondary exponent (defaults to p)");
    auto* sOpt = sub->add_option("--s", o.s, "exponent for the scalar-sequence checks");
    auto* thetaOpt = sub->add_option("--theta", o.theta, "tent-condition exponent");
    auto* seedOpt = sub->add_option("--seed", o.seed, "base seed for every randomized choice");
    sub->parse_complete_callback([&o, seedOpt, pOpt, qOpt, sOpt, thetaOpt, depthOpt] {
        o.seedSet = seedOpt->count() > 0;
        o.pSet = pOpt->count() > 0;
        o.qSet = qOpt->count() > 0;
        o.sSet = sOpt->count() > 0;
        o.thetaSet = thetaOpt->count() > 0;
        o.depthSet = depthOpt->count() > 0;
    });
    sub->add_option("--trials", o.trials, "number of randomized trials")->check(CLI::Range(0, 1000000));
    sub->add_option("--workers", o.workers, "worker threads")->check(CLI::Range(1, 64));
    sub->add_flag("--json", o.jsonOut, "emit a JSON document instead of text");
    sub->add_flag("--exhaustive-sets", o.exhaustive, "scan unions of blocks, not just single blocks");
    sub->add_option("--cap", o.cap, "enumeration capacity limit");
    sub->add_option("--level", o.level, "level selecting a block");
    sub->add_option("--block", o.block, "block index at --level");
    sub->add_option("--out", o.out, "also write the JSON document to this file");
}

fl::FilteredSpace load_space(const Options& o) {
    if (o.model == "dyadic") return fl::build_dyadic(o.depth);
    const json j = load_json_file(o.model);
    return fl::space_from_json(j.contains("space") ? j.at("space") : j);
}

fl::WeightVector parse_weight(const std::string& spec, const fl::FilteredSpace& sp, const Options& o) {
    if (spec.rfind("const:", 0) == 0) return fl::weight_constant(sp, to_double(spec.substr(6), "--weight"));
    if (spec.rfind("power:", 0) == 0) {
        if (o.model != "dyadic")
            throw fl::UsageError("power weights are defined on the dyadic model; use --model dyadic");
        return fl::weight_power_dyadic(o.depth, to_double(spec.substr(6), "--weight"));
    }
    if (spec.rfind("lognormal:", 0) == 0)
        return fl::weight_lognormal(o.random(), sp, to_double(spec.substr(10), "--weight"));
    if (spec == "spike") return fl::weight_spike(o.random(), sp);
    if (spec.rfind("json:", 0) == 0) return fl::weight_from_json(load_json_file(spec.substr(5)), sp);
    std::vector<double> vals;
    for (const std::string& tok : split(spec, ',')) vals.push_back(to_double(tok, "--weight"));
    if (static_cast<int>(vals.size()) != sp.atom_count())
        throw fl::UsageError("weight list has " + std::to_string(vals.size()) + " entries; the space has " +
                             std::to_string(sp.atom_count()) + " atoms");
    return fl::WeightVector{vals};
}

fl::AdaptedFamily parse_alpha(const std::string& spec, const fl::FilteredSpace& sp, const Options& o) {
    if (spec == "zeros") return fl::constant_family(sp, 0.0);
    if (spec == "ones") return fl::constant_family(sp, 1.0);
    if (spec.rfind("single:", 0) == 0) {
        const auto parts = split(spec.substr(7), ':');
        if (parts.size() != 2) throw fl::UsageError("--alpha single takes LEVEL:VALUE");
        return fl::alpha_single_level(sp, static_cast<int>(to_double(parts[0], "--alpha")),
                                      to_double(parts[1], "--alpha"));
    }
    if (spec.rfind("geometric:", 0) == 0) {
        const auto parts = split(spec.substr(10), ':');
        if (parts.empty() || parts.size() > 2) throw fl::UsageError("--alpha geometric takes RATIO[:SCALE]");
        const double scale = parts.size() == 2 ? to_double(parts[1], "--alpha") : 1.0;
        return fl::alpha_geometric(sp, to_double(parts[0], "--alpha"), scale);
    }
    if (spec.rfind("sparse:", 0) == 0) {
        const auto parts = split(spec.substr(7), ':');
        if (parts.size() != 2) throw fl::UsageError("--alpha sparse takes PROB:SIGMA");
        return fl::alpha_random_sparse(o.random(), sp, to_double(parts[0], "--alpha"),
                                       to_double(parts[1], "--alpha"));
    }
    if (spec.rfind("random:", 0) == 0)
        return fl::adapted_lognormal(o.random(), sp, to_double(spec.substr(7), "--alpha"));
    if (spec.rfind("json:", 0) == 0) return fl::adapted_family_from_json(load_json_file(spec.substr(5)), sp);
    throw fl::UsageError("unrecognized --alpha \"" + spec + "\"");
}

fl::CarlesonFamily parse_nu(const std::string& spec, const fl::FilteredSpace& sp, const Options& o) {
    if (spec == "zeros") {
        fl::CarlesonFamily nu;
        nu.level.resize(static_cast<std::size_t>(sp.levels()) + 1);
        for (int i = 0; i <= sp.levels(); ++i)
            nu.level[static_cast<std::size_t>(i)].assign(static_cast<std::size_t>(sp.block_count(i)), 0.0);
        return nu;
    }
    if (spec.rfind("random:", 0) == 0) {
        const auto parts = split(spec.substr(7), ':');
        if (parts.size() != 2) throw fl::UsageError("--nu random takes PROB:SIGMA");
        return fl::carleson_random(o.random(), sp, to_double(parts[0], "--nu"),
                                   to_double(parts[1], "--nu"));
    }
    if (spec.rfind("json:", 0) == 0) return fl::carleson_family_from_json(load_json_file(spec.substr(5)), sp);
    throw fl::UsageError("unrecognized --nu \"" + spec + "\"");
}

json config_echo(const Options& o, const std::string& extra = {}) {
    json cfg{{"model", o.model},     {"depth", o.depth},       {"weight", o.weight},
             {"alpha", o.alpha},     {"nu", o.nu},             {"p", o.p},
             {"q", o.q},             {"s", o.s},               {"theta", o.theta},
             {"trials", o.trials},   {"cap", o.cap},           {"exhaustiveSets", o.exhaustive},
             {"level", o.level},     {"block", o.block},
             {"workers", std::to_string(o.workers)}};
    if (!o.weight2.empty()) cfg["weight2"] = o.weight2;
    if (o.seedSet) cfg["seed"] = o.seed;
    if (!extra.empty()) cfg["suite"] = extra;
    return cfg;
}

void emit(const json& doc, const Options& o) {
    if (!o.out.empty()) {
        std::ofstream f(o.out);
        if (!f) throw fl::UsageError("cannot write to \"" + o.out + "\"");
        f << doc.dump(2) << "\n";
    }
    if (o.jsonOut) {
        std::printf("%s\n", doc.dump(2).c_str());
        return;
    }
    // text: flat "key = value" lines from the result object
    const json& res = doc.contains("result") ? doc.at("result") : doc;
    for (const auto& [k, v] : res.items()) {
        if (v.is_number())
            std::printf("%s = %s\n", k.c_str(), fl::format_double(v.get<double>()).c_str());
        else
            std::printf("%s = %s\n", k.c_str(), v.dump().c_str());
    }
}

json report_to_json(const fl::ConstantReport& rep) {
    return fl::constant_report_to_json(rep);
}

json norm_estimate_json(const fl::NormEstimate& est) {
    json w = json::array();
    for (double x : est.witness.v) w.push_back(fl::json_number(x));
    return json{{"lower", fl::json_number(est.lower)}, {"method", est.method}, {"witness", w}};
}

json suite_config_echo(const std::string& name, const Options& o, const fl::SuiteConfig& cfg) {
    return json{{"suite", name},
                {"trials", o.trials},
                {"seed", o.seed},
                {"depth", cfg.depth},
                {"p", cfg.p},
                {"q", cfg.q},
                {"s", cfg.s},
                {"theta", cfg.theta},
                {"exhaustiveSets", cfg.exhaustiveSets},
                {"cap", cfg.cap},
                {"workers", std::to_string(o.workers)}};
}

int do_compute(const std::string& op, const Options& o) {
    const fl::FilteredSpace sp = load_space(o);
    const double p = o.p;
    const double q = o.qOrP();
    fl::SetTestOptions setOpt;
    setOpt.exhaustiveSets = o.exhaustive;

    json result;
    if (op == "ap-constant") {
        result = report_to_json(fl::ap_constant(sp, parse_weight(o.weight, sp, o), p));
    } else if (op == "ainfty-constant") {
        result = report_to_json(fl::ainfty_constant(sp, parse_weight(o.weight, sp, o)));
    } else if (op == "condition15-ratio") {
        result = report_to_json(fl::condition15_ratio(sp, parse_alpha(o.alpha, sp, o)));
    } else if (op == "wolff-norm") {
        if (!(q < p)) throw fl::UsageError("wolff-norm needs q < p");
        const fl::WeightVector w = parse_weight(o.weight, sp, o);
        const fl::AdaptedFamily alpha = parse_alpha(o.alpha, sp, o);
        const double pc = fl::conjugate_exponent(p);
        const double r = 1.0 / (1.0 / q - 1.0 / p);
        fl::AtomFunction wp = fl::wolff_potential(sp, alpha, w, p);
        fl::AtomFunction root(sp.atom_count());
        for (int a = 0; a < sp.atom_count(); ++a) root[a] = std::pow(wp[a], 1.0 / pc);
        result = json{{"value", fl::json_number(fl::lp_norm(sp, root, r, &w))},
                      {"r", fl::json_number(r)}};
    } else if (op == "carleson-constant") {
        result = report_to_json(fl::carleson_constant(sp, parse_nu(o.nu, sp, o), o.theta, setOpt));
    } else if (op == "carleson-stopping") {
        result = report_to_json(fl::carleson_constant_stopping(sp, parse_nu(o.nu, sp, o), o.theta, o.cap));
    } else if (op == "carleson-qlp") {
        result = json{{"value", fl::json_number(fl::carleson_qlp_constant(
                                    sp, parse_alpha(o.alpha, sp, o), parse_weight(o.weight, sp, o), o.theta))}};
    } else if (op == "sawyer-trace") {
        result = report_to_json(fl::sawyer_trace_constant(sp, parse_alpha(o.alpha, sp, o),
                                                          parse_weight(o.weight, sp, o), p, q, setOpt));
    } else if (op == "sawyer-max" || op == "cor43-test") {
        const fl::WeightVector u = parse_weight(o.weight, sp, o);
        const fl::WeightVector sigma = o.weight2.empty()
                                           ? fl::dual_weight(sp, u, p)
                                           : parse_weight(o.weight2, sp, o);
        const fl::AdaptedFamily alpha = parse_alpha(o.alpha, sp, o);
        result = op == "sawyer-max"
                     ? report_to_json(fl::sawyer_max_constant(sp, alpha, u, sigma, p, q, setOpt))
                     : report_to_json(fl::cor43_test_constant(sp, alpha, u, sigma, p));
    } else if (op == "count-stopping") {
        result = json{{"value", fl::json_number(fl::count_stopping_times(sp))}};
    } else if (op == "duality-gap") {
        fl::NormSearchOptions nopt;
        nopt.seed = o.seedSet ? o.seed : 1;
        const fl::DualityGap g = fl::duality_gap(sp, parse_alpha(o.alpha, sp, o),
                                                 parse_weight(o.weight, sp, o), p, q, nopt);
        result = json{{"primal", fl::json_number(g.primal)},
                      {"dual", fl::json_number(g.dual)},
                      {"relGap", fl::json_number(g.relGap)}};
    } else if (op == "norm-lb-talpha" || op == "norm-lb-malpha" || op == "norm-lb-doob") {
        const fl::WeightVector w = parse_weight(o.weight, sp, o);
        const fl::AdaptedFamily alpha =
            op == "norm-lb-doob" ? fl::constant_family(sp, 1.0) : parse_alpha(o.alpha, sp, o);
        fl::NormSearchOptions nopt;
        nopt.seed = o.seedSet ? o.seed : 1;
        fl::WeightVector ones{std::vector<double>(static_cast<std::size_t>(sp.atom_count()), 1.0)};
        fl::NormEstimate est;
        if (op == "norm-lb-talpha") {
            fl::ApplyFn apply = [&](const fl::AtomFunction& f) { return fl::pos_op(sp, alpha, f); };
            fl::LinearizeFn lin = [&](const fl::AtomFunction&) { return fl::pos_op_matrix(sp, alpha); };
            est = fl::norm_lower_bound(sp, apply, lin, p, q, ones, w, nopt);
        } else if (op == "norm-lb-malpha") {
            fl::ApplyFn apply = [&](const fl::AtomFunction& f) { return fl::gen_max(sp, alpha, f); };
            fl::LinearizeFn lin = [&](const fl::AtomFunction& f) {
                return fl::frozen_max_matrix(sp, alpha, f);
            };
            est = fl::norm_lower_bound(sp, apply, lin, p, q, ones, w, nopt);
        } else {
            fl::ApplyFn apply = [&](const fl::AtomFunction& f) { return fl::doob_max(sp, f); };
            fl::LinearizeFn lin = [&](const fl::AtomFunction& f) {
                return fl::frozen_max_matrix(sp, alpha, f);
            };
            est = fl::norm_lower_bound(sp, apply, lin, p, q, w, w, nopt);
        }
        result = norm_estimate_json(est);
    } else if (op == "principal-tree") {
        const fl::WeightVector w = parse_weight(o.weight, sp, o);
        fl::check_level(sp, o.level);
        if (o.block < 0 || o.block >= sp.block_count(o.level))
            throw fl::UsageError("--block out of range at --level");
        const fl::PrincipalNode tree =
            fl::principal_sets(sp, w, fl::MeasurableSet{o.level, {o.block}}, o.level);
        result = json{{"tree", fl::principal_node_to_json(tree)}};
    } else {
        throw fl::UsageError("unknown compute operation \"" + op + "\"");
    }

    const json cfg = config_echo(o);
    json doc{{"tool", {{"name", "filtlab"}, {"version", "0.1.0"}}},
             {"command", "compute"},
             {"op", op},
             {"config", cfg},
             {"configHash", fl::hash_hex(fl::fnv1a64(cfg.dump()))},
             {"result", result}};
    emit(doc, o);
    return 0;
}

int do_suite(const std::string& name, const Options& o) {
    const fl::Suite& suite = fl::find_suite(name); // unknown -> UsageError -> exit 2
    if (!o.seedSet) throw fl::UsageError("suite runs are randomized; provide --seed");
    fl::SuiteConfig cfg;
    cfg.depth = o.depthSet ? o.depth : -1; // -1: each suite picks its own depths
    cfg.p = o.pSet ? o.p : 0.0;            // 0: cycle through the suite's default grid
    cfg.q = o.qSet ? o.q : 0.0;
    cfg.s = o.sSet ? o.s : 0.0;
    cfg.theta = o.thetaSet ? o.theta : 0.0;
    cfg.exhaustiveSets = o.exhaustive;
    cfg.cap = o.cap;

    const auto t0 = std::chrono::steady_clock::now();
    const fl::SuiteRunResult r = fl::run_suite(suite, o.trials, o.seed, cfg, o.workers);
    const auto t1 = std::chrono::steady_clock::now();
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3fs",
                  std::chrono::duration_cast<std::chrono::duration<double>>(t1 - t0).count());

    const json report = fl::suite_report_json("suite", suite_config_echo(name, o, cfg), {r}, buf);
    if (!o.out.empty()) {
        std::ofstream f(o.out);
        if (!f) throw fl::UsageError("cannot write to \"" + o.out + "\"");
        f << report.dump(2) << "\n";
    }
    if (o.jsonOut) {
        std::printf("%s\n", report.dump(2).c_str());
    } else {
        std::printf("suite %s: trials=%d checks=%d failures=%zu flagged=%zu pass=%s elapsed=%s\n",
                    r.suite.c_str(), r.trials, r.checksRun, r.failures.size(), r.flaggedTrials.size(),
                    r.pass ? "true" : "false", r.elapsed.c_str());
        if (!r.worst.empty()) {
            std::printf("worst ratios (share of each bound's budget):\n");
            for (const auto& [k, v] : r.worst)
                std::printf("  %-28s %s\n", k.c_str(), fl::format_double(v).c_str());
        }
        for (const json& f : r.failures) std::printf("failure: %s\n", f.dump().c_str());
    }
    return r.pass ? 0 : 1;
}

int do_replay(const std::string& path, const Options& o) {
    const json doc = load_json_file(path);

    if (doc.contains("instance")) { // a single trial payload
        const fl::ReplayOutcome out = fl::replay_payload(doc);
        json checks = json::array();
        for (const fl::Check& c : out.recomputed) checks.push_back(fl::check_to_json(c));
        json rep{{"command", "replay"},
                 {"payloadHashIntact", out.hashOk},
                 {"verdictMatch", out.verdictMatch},
                 {"ratiosMatch", out.ratiosMatch},
                 {"recomputedChecks", checks}};
        if (!out.note.empty()) rep["note"] = out.note;
        if (o.jsonOut) {
            std::printf("%s\n", rep.dump(2).c_str());
        } else {
            if (!out.hashOk) std::printf("warning: payload hash mismatch (file was edited)\n");
            std::printf("verdicts %s, ratios %s\n", out.verdictMatch ? "match" : "DIFFER",
                        out.ratiosMatch ? "reproduce bit-for-bit" : "differ");
            for (const fl::Check& c : out.recomputed)
                std::printf("  %-28s lhs=%s rhs=%s bound=%s %s\n", c.name.c_str(),
                            fl::format_double(c.lhs).c_str(), fl::format_double(c.rhs).c_str(),
                            fl::format_double(c.bound).c_str(), c.pass ? "ok" : "FAIL");
        }
        return out.verdictMatch ? 0 : 1;
    }

    if (doc.contains("suites")) { // a full suite report: re-run its config
        const json& cfgEcho = doc.at("config");
        const std::string recordedHash = doc.value("configHash", "");
        const bool hashOk = recordedHash == fl::hash_hex(fl::fnv1a64(cfgEcho.dump()));
        fl::SuiteConfig cfg;
        cfg.depth = cfgEcho.value("depth", -1);
        cfg.p = cfgEcho.value("p", 0.0);
        cfg.q = cfgEcho.value("q", 0.0);
        cfg.s = cfgEcho.value("s", 0.0);
        cfg.theta = cfgEcho.value("theta", 0.0);
        cfg.exhaustiveSets = cfgEcho.value("exhaustiveSets", false);
        cfg.cap = cfgEcho.value("cap", static_cast<std::int64_t>(100000));

        bool allMatch = true;
        json fresh = json::array();
        for (const json& rec : doc.at("suites")) {
            const fl::Suite& suite = fl::find_suite(rec.at("suite").get<std::string>());
            const fl::SuiteRunResult r = fl::run_suite(suite, rec.at("trials").get<int>(),
                                                       rec.at("seed").get<std::uint64_t>(), cfg, 1);
            fresh.push_back(fl::suite_result_to_json(r));
            std::string diff;
            if (!fl::numeric_fields_identical(rec, fresh.back(), &diff) ||
                rec.at("pass").get<bool>() != r.pass) {
                allMatch = false;
                if (!o.jsonOut)
                    std::printf("suite %s: first differing numeric field: %s\n", r.suite.c_str(),
                                diff.empty() ? "(pass verdict)" : diff.c_str());
            }
        }
        json rep{{"command", "replay"},
                 {"configHashIntact", hashOk},
                 {"numericFieldsMatch", allMatch},
                 {"suites", fresh}};
        if (o.jsonOut) {
            std::printf("%s\n", rep.dump(2).c_str());
        } else {
            if (!hashOk) std::printf("warning: config hash mismatch (file was edited)\n");
            std::printf("numeric fields %s\n", allMatch ? "reproduce bit-for-bit" : "DIFFER");
        }
        return allMatch ? 0 : 1;
    }

    throw fl::UsageError("\"" + path + "\" is neither a trial payload nor a suite report");
}

struct SweepOptions {
    std::string pList = "2";
    double deltaMin = -0.5;
    double deltaMax = 1e9; // sentinel: p - 1.05 per row
    int steps = 8;
    int depth = 5;
    std::uint64_t seed = 1;
    bool jsonOut = false;
    std::string csv;
};

int do_sweep(const SweepOptions& so) {
    std::vector<double> ps;
    for (const std::string& tok : split(so.pList, ',')) ps.push_back(to_double(tok, "--p-list"));
    if (ps.empty()) throw fl::UsageError("--p-list is empty");
    if (so.steps < 1) throw fl::UsageError("--steps must be at least 1");

    std::ostringstream csv;
    csv << "p,delta,ap,ainfty_dual,ap_dual,norm_lb,bound_sharp,bound_classical,"
           "tightness_sharp,tightness_classical\n";
    json rows = json::array();
    for (double p : ps) {
        if (!(p > 1.0)) throw fl::UsageError("sweep exponents must exceed 1");
        const double dmax = so.deltaMax < 1e8 ? so.deltaMax : p - 1.05;
        for (int k = 0; k < so.steps; ++k) {
            const double delta =
                so.steps == 1 ? so.deltaMin
                              : so.deltaMin + (dmax - so.deltaMin) * k / (so.steps - 1.0);
            const fl::FilteredSpace sp = fl::build_dyadic(so.depth);
            const fl::WeightVector w = fl::weight_power_dyadic(so.depth, delta);
            const fl::WeightVector sigma = fl::dual_weight(sp, w, p);
            const double ap = fl::ap_constant(sp, w, p).value;
            const double ainf = fl::ainfty_constant(sp, sigma).value;
            const double apDual = fl::ap_constant(sp, sigma, fl::conjugate_exponent(p)).value;

            fl::ApplyFn apply = [&](const fl::AtomFunction& f) { return fl::doob_max(sp, f); };
            const fl::AdaptedFamily ones = fl::constant_family(sp, 1.0);
            fl::LinearizeFn lin = [&](const fl::AtomFunction& f) {
                return fl::frozen_max_matrix(sp, ones, f);
            };
            fl::NormSearchOptions nopt;
            nopt.seed = so.seed;
            nopt.extraTests = fl::detail::scaled_block_tests(sp, sigma);
            const double lb = fl::norm_lower_bound(sp, apply, lin, p, p, w, w, nopt).lower;

            const double boundSharp = std::pow(ap * ainf, 1.0 / p);
            const double boundClassical = std::pow(ap * apDual, 1.0 / p);
            char line[512];
            std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                          p, delta, ap, ainf, apDual, lb, boundSharp, boundClassical,
                          lb / boundSharp, lb / boundClassical);
            csv << line;
            rows.push_back(json{{"p", p},
                                {"delta", delta},
                                {"ap", ap},
                                {"ainftyDual", ainf},
                                {"apDual", apDual},
                                {"normLb", lb},
                                {"boundSharp", boundSharp},
                                {"boundClassical", boundClassical}});
        }
    }
    if (!so.csv.empty()) {
        std::ofstream f(so.csv);
        if (!f) throw fl::UsageError("cannot write to \"" + so.csv + "\"");
        f << csv.str();
        std::printf("wrote %s\n", so.csv.c_str());
    } else if (so.jsonOut) {
        std::printf("%s\n", json{{"command", "sweep"}, {"rows", rows}}.dump(2).c_str());
    } else {
        std::printf("%s", csv.str().c_str());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"filtlab: a laboratory for weighted inequalities on finite filtered measure spaces"};
    app.require_subcommand(1);

    Options computeOpts, suiteOpts, replayOpts;
    SweepOptions sweepOpts;
    std::string computeOp, suiteName, replayPath;
    int exitCode = 0;

    CLI::App* cmp = app.add_subcommand("compute", "evaluate one quantity on one configuration");
    cmp->add_option("op", computeOp, "operation name")->required();
    add_common(cmp, computeOpts);
    cmp->callback([&] { exitCode = do_compute(computeOp, computeOpts); });

    CLI::App* sut = app.add_subcommand("suite", "run a randomized verification suite");
    sut->add_option("name", suiteName, "suite name")->required();
    add_common(sut, suiteOpts);
    sut->callback([&] { exitCode = do_suite(suiteName, suiteOpts); });

    CLI::App* rep = app.add_subcommand("replay", "re-execute a recorded payload or report");
    rep->add_option("file", replayPath, "JSON file produced by suite runs")->required();
    add_common(rep, replayOpts);
    rep->callback([&] { exitCode = do_replay(replayPath, replayOpts); });

    CLI::App* swp = app.add_subcommand("sweep", "grid sweep of power weights for sharpness plots");
    swp->add_option("--p-list", sweepOpts.pList, "comma-separated exponents");
    swp->add_option("--delta-min", sweepOpts.deltaMin, "smallest power exponent (> -1)");
    swp->add_option("--delta-max", sweepOpts.deltaMax, "largest power exponent (default p-1.05)");
    swp->add_option("--steps", sweepOpts.steps, "grid points per exponent");
    swp->add_option("--depth", sweepOpts.depth, "dyadic depth")->check(CLI::Range(0, 12));
    swp->add_option("--seed", sweepOpts.seed, "norm-search seed");
    swp->add_flag("--json", sweepOpts.jsonOut, "emit JSON rows");
    swp->add_option("--csv", sweepOpts.csv, "write the CSV to this file");
    swp->callback([&] { exitCode = do_sweep(sweepOpts); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const fl::CapacityError& e) {
        std::fprintf(stderr, "capacity error: %s\n", e.what());
        return 3;
    } catch (const fl::UsageError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const fl::ValidationError& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return 2;
    } catch (const fl::ParameterError& e) {
        std::fprintf(stderr, "parameter error: %s\n", e.what());
        return 2;
    } catch (const fl::DegenerateWeightError& e) {
        std::fprintf(stderr, "degenerate weight: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return exitCode;
}
