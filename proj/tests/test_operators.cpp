#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "filtlab/functions.hpp"
#include "filtlab/operators.hpp"

using namespace filtlab;
using Catch::Approx;

namespace {
const FilteredSpace& half() {
    static const FilteredSpace sp = build_dyadic(1);
    return sp;
}
} // namespace

TEST_CASE("conditional expectation averages against mu") {
    const AtomFunction f(std::vector<double>{1.0, 3.0});
    const AtomFunction e0 = cond_exp(half(), 0, f);
    CHECK(e0[0] == Approx(2.0));
    CHECK(e0[1] == Approx(2.0));
    const AtomFunction e1 = cond_exp(half(), 1, f);
    CHECK(e1[0] == 1.0);
    CHECK(e1[1] == 3.0);

    const FilteredSpace skew({0.25, 0.75}, {{0, 0}, {0, 1}});
    CHECK(cond_exp(skew, 0, f)[0] == Approx(2.5));
}

TEST_CASE("weighted conditional expectation") {
    const WeightVector w{{1.0, 3.0}};
    const AtomFunction g(std::vector<double>{1.0, 0.0});
    const AtomFunction e = cond_exp_weighted(half(), 0, g, w);
    CHECK(e[0] == Approx(0.25));
    CHECK(e[1] == Approx(0.25));
}

TEST_CASE("doob maximal function takes the running sup of averages") {
    const AtomFunction f(std::vector<double>{1.0, 0.0});
    const AtomFunction m = doob_max(half(), f);
    CHECK(m[0] == Approx(1.0));
    CHECK(m[1] == Approx(0.5));
}

TEST_CASE("weighted maximal and summed operators") {
    AdaptedFamily alpha = constant_family(half(), 1.0);
    const AtomFunction f(std::vector<double>{1.0, 0.0});

    const AtomFunction t = pos_op(half(), alpha, f);
    CHECK(t[0] == Approx(1.5));
    CHECK(t[1] == Approx(0.5));

    alpha.level[0][0] = 2.0;
    const AtomFunction m = gen_max(half(), alpha, f);
    CHECK(m[0] == Approx(1.0));
    CHECK(m[1] == Approx(1.0));

    const AtomFunction signedF(std::vector<double>{-1.0, 1.0});
    const AtomFunction ms = gen_max(half(), alpha, signedF);
    CHECK(ms[0] == Approx(1.0)); // |f| at the finest level
    CHECK(ms[1] == Approx(1.0));
}

TEST_CASE("tail sums accumulate from the given level down") {
    AdaptedFamily alpha = constant_family(half(), 0.0);
    alpha.level[0][0] = 2.0;
    alpha.level[1] = {1.0, 1.0};
    const LevelFamily tails = tail_sums(half(), alpha);
    CHECK(tails[0][0] == Approx(3.0));
    CHECK(tails[0][1] == Approx(3.0));
    CHECK(tails[1][0] == Approx(1.0));
}

TEST_CASE("discrete wolff potential") {
    const WeightVector w{{1.0, 3.0}};
    const AdaptedFamily alpha = constant_family(half(), 1.0);
    const AtomFunction wp = wolff_potential(half(), alpha, w, 2.0);
    CHECK(wp[0] == Approx(5.0));
    CHECK(wp[1] == Approx(7.0));
}

TEST_CASE("lp norms, including the quasi-norm range") {
    const WeightVector w{{1.0, 3.0}};
    CHECK(lp_norm(half(), AtomFunction(std::vector<double>{1.0, 3.0}), 2.0, &w) == Approx(std::sqrt(14.0)));
    CHECK(lp_norm(half(), AtomFunction(std::vector<double>{1.0, 4.0}), 0.5) == Approx(2.25));
    CHECK(lp_norm(half(), AtomFunction(std::vector<double>{0.0, 0.0}), 1.0) == 0.0);
    CHECK_THROWS_AS(lp_norm(half(), AtomFunction(std::vector<double>{1.0, 1.0}), kInf), ParameterError);
}

TEST_CASE("dual weight") {
    const WeightVector w{{1.0, 3.0}};
    const WeightVector s2 = dual_weight(half(), w, 2.0);
    CHECK(s2.v[0] == Approx(1.0));
    CHECK(s2.v[1] == Approx(1.0 / 3.0));
    const WeightVector s3 = dual_weight(half(), w, 3.0);
    CHECK(s3.v[1] == Approx(std::pow(3.0, -0.5)));
    CHECK_THROWS_AS(dual_weight(half(), w, 1.0), ParameterError);
}

TEST_CASE("adapted family shape is validated") {
    AdaptedFamily bad = constant_family(half(), 1.0);
    bad.level[1].pop_back();
    CHECK_THROWS_AS(check_adapted(half(), bad), ValidationError);
    const AdaptedFamily fam = constant_family(half(), 2.5);
    const AdaptedFamily back = adapted_family_from_json(adapted_family_to_json(fam), half());
    CHECK(back.level[1][1] == 2.5);
}
