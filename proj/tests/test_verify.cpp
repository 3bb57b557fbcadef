#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "filtlab/generators.hpp"
#include "filtlab/verify.hpp"

using namespace filtlab;
using Catch::Approx;

namespace {
const FilteredSpace& half() {
    static const FilteredSpace sp = build_dyadic(1);
    return sp;
}
WeightVector unit(const FilteredSpace& sp) {
    return WeightVector{std::vector<double>(static_cast<std::size_t>(sp.atom_count()), 1.0)};
}
} // namespace

TEST_CASE("elementary tail inequality") {
    const Ineq21Check r = check_ineq_2_1({1.0, 1.0}, 2.0);
    CHECK(r.lhs == Approx(4.0));
    CHECK(r.rhs == Approx(6.0));
    CHECK_THROWS_AS(check_ineq_2_1({1.0}, 1.0), ParameterError);
    CHECK_THROWS_AS(check_ineq_2_1({-1.0}, 2.0), ValidationError);
    const Ineq21Check empty = check_ineq_2_1({}, 2.0);
    CHECK(empty.lhs == 0.0);
    CHECK(empty.rhs == 0.0);
}

TEST_CASE("three-quantity lemma values") {
    SECTION("single atom") {
        const FilteredSpace one({1.0}, {{0}});
        const Lemma23Quantities q =
            lemma23_quantities(one, constant_family(one, 1.0), WeightVector{{2.0}}, 2.0);
        CHECK(q.a1 == Approx(4.0));
        CHECK(q.a2 == Approx(4.0));
        CHECK(q.a3 == Approx(4.0));
    }
    SECTION("two atoms, uneven weight") {
        const Lemma23Quantities q =
            lemma23_quantities(half(), constant_family(half(), 1.0), WeightVector{{1.0, 3.0}}, 2.0);
        CHECK(q.a1 == Approx(17.0));
        CHECK(q.a2 == Approx(13.0));
        CHECK(q.a3 == Approx(16.0));
    }
}

TEST_CASE("tracked constants") {
    CHECK(ineq21_constant(2.0) == 2.0);
    CHECK(doob_constant(2.0) == Approx(2.0));
    CHECK(doob_constant(1.5) == Approx(3.0));
    CHECK(lemma23_step1_constant(2.0) == Approx(2.0));
    CHECK(lemma23_step1_constant(3.0) == Approx(36.0)); // (3*2)^{(3-1)/(3-1-1)}
    CHECK(lemma23_step3_constant(2.0) == Approx(4.0));
    CHECK(lemma23_composite_constant(2.0) == Approx(2.0));
    CHECK(thm41_constant(2.0, 2.0) == Approx(4.0));
    CHECK(thm41_constant(2.0, 3.0) == Approx(4.0 * std::pow(1.5, 1.0 / 3.0)));
    CHECK(lemma42_converse_constant(2.0) == Approx(2.0));
    CHECK(cor45_constant(2.0) == Approx(8.0));
    CHECK(thm51_core_constant(2.0) == Approx(32.0 * std::exp(1.0)));
    CHECK(thm51_norm_constant(2.0) == Approx(16.0 * std::sqrt(2.0 * std::exp(1.0))));
    CHECK(thm11_constant(2.0, 2.0, 1.0) == Approx(4.0));
    CHECK(lemma24_constant(2.0, 1.0) == Approx(std::sqrt(8.0)));
    CHECK(thm12_formal_converse_constant(2.0, 1.5, 1.0) == Approx(std::sqrt(6.0)));
}

TEST_CASE("matrix forms agree with the direct operators") {
    Rng rng(3);
    const FilteredSpace sp = random_space(rng);
    const AdaptedFamily alpha = adapted_lognormal(rng, sp, 0.7);
    const AtomFunction f = function_lognormal(rng, sp, 1.0);

    const DenseOp T = pos_op_matrix(sp, alpha);
    const AtomFunction direct = pos_op(sp, alpha, f);
    const AtomFunction viaMatrix = T.apply(f);
    for (int a = 0; a < sp.atom_count(); ++a) CHECK(viaMatrix[a] == Approx(direct[a]).margin(1e-12));

    const DenseOp frozen = frozen_max_matrix(sp, alpha, f);
    const AtomFunction mf = gen_max(sp, alpha, f);
    const AtomFunction frozenAtF = frozen.apply(f);
    for (int a = 0; a < sp.atom_count(); ++a) CHECK(frozenAtF[a] == Approx(mf[a]).margin(1e-12));
}

TEST_CASE("norm search recovers known operator norms") {
    SECTION("single projection has norm one") {
        AdaptedFamily alpha = alpha_single_level(half(), 0, 1.0);
        ApplyFn apply = [&](const AtomFunction& f) { return pos_op(half(), alpha, f); };
        LinearizeFn lin = [&](const AtomFunction&) { return pos_op_matrix(half(), alpha); };
        const NormEstimate est =
            norm_lower_bound(half(), apply, lin, 2.0, 2.0, unit(half()), unit(half()));
        CHECK(est.lower == Approx(1.0).epsilon(1e-9));
    }
    SECTION("identity plus projection has norm two") {
        AdaptedFamily alpha = constant_family(half(), 1.0);
        ApplyFn apply = [&](const AtomFunction& f) { return pos_op(half(), alpha, f); };
        LinearizeFn lin = [&](const AtomFunction&) { return pos_op_matrix(half(), alpha); };
        const NormEstimate est =
            norm_lower_bound(half(), apply, lin, 2.0, 2.0, unit(half()), unit(half()));
        CHECK(est.lower == Approx(2.0).epsilon(1e-9));

        const NormEstimate grid = norm_exhaustive_grid(half(), apply, 2.0, 2.0, unit(half()), unit(half()));
        CHECK(std::abs(grid.lower - est.lower) <= 1e-6 * est.lower);
    }
}

TEST_CASE("norm witnesses reproduce their claimed ratio") {
    Rng rng(17);
    const FilteredSpace sp = random_space(rng);
    const AdaptedFamily alpha = alpha_geometric(sp, 0.6);
    const WeightVector w = weight_lognormal(rng, sp, 0.8);
    const WeightVector ones = unit(sp);
    ApplyFn apply = [&](const AtomFunction& f) { return pos_op(sp, alpha, f); };
    LinearizeFn lin = [&](const AtomFunction&) { return pos_op_matrix(sp, alpha); };
    NormSearchOptions opt;
    opt.seed = 5;
    const NormEstimate est = norm_lower_bound(sp, apply, lin, 2.0, 2.5, ones, w, opt);
    const double again = evaluate_ratio(sp, apply, est.witness, 2.0, 2.5, ones, w);
    CHECK(again == Approx(est.lower).epsilon(1e-10));
    CHECK((est.method == "indicator-tests" || est.method == "random-search" ||
           est.method == "ascent-fixed-point"));
}

TEST_CASE("exhaustive grid is capacity limited") {
    const FilteredSpace sp = build_dyadic(2);
    ApplyFn apply = [&](const AtomFunction& f) { return doob_max(sp, f); };
    CHECK_THROWS_AS(norm_exhaustive_grid(sp, apply, 2.0, 2.0, unit(sp), unit(sp)), CapacityError);
}

TEST_CASE("primal and dual searches agree on a solvable instance") {
    const WeightVector w{{1.0, 3.0}};
    NormSearchOptions opt;
    opt.seed = 2;
    const DualityGap gap = duality_gap(half(), constant_family(half(), 1.0), w, 2.0, 2.0, opt);
    CHECK(gap.primal > 0.0);
    CHECK(gap.dual > 0.0);
    CHECK(gap.relGap <= 1e-6);
}
