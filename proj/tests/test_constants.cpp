#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "filtlab/constants.hpp"
#include "filtlab/generators.hpp"

using namespace filtlab;
using Catch::Approx;

namespace {
const FilteredSpace& half() {
    static const FilteredSpace sp = build_dyadic(1);
    return sp;
}
const WeightVector& w13() {
    static const WeightVector w{{1.0, 3.0}};
    return w;
}
} // namespace

TEST_CASE("muckenhoupt constant on the two-atom space") {
    const ConstantReport rep = ap_constant(half(), w13(), 2.0);
    CHECK(rep.value == Approx(4.0 / 3.0));
    CHECK(rep.witnessLevel == 0);
    CHECK(rep.witnessBlock == 0);
    CHECK_FALSE(rep.infinite);
    CHECK(ap_constant(half(), weight_constant(half(), 5.0), 2.0).value == Approx(1.0));
    CHECK_THROWS_AS(ap_constant(half(), WeightVector{{1.0, 0.0}}, 2.0), DegenerateWeightError);
}

TEST_CASE("muckenhoupt constants do not increase in p") {
    Rng rng(11);
    const FilteredSpace sp = build_dyadic(3);
    const WeightVector w = weight_spike(rng, sp);
    const double a = ap_constant(sp, w, 1.5).value;
    const double b = ap_constant(sp, w, 2.0).value;
    const double c = ap_constant(sp, w, 3.0).value;
    CHECK(a >= b);
    CHECK(b >= c);
    CHECK(c >= 1.0 - 1e-12);
}

TEST_CASE("hruscev constant") {
    CHECK(ainfty_constant(half(), w13()).value == Approx(2.0 / std::sqrt(3.0)));
    CHECK(ainfty_constant(half(), weight_constant(half(), 2.0)).value == Approx(1.0));
}

TEST_CASE("tail-ratio condition") {
    SECTION("level-constant multipliers give exactly 1") {
        CHECK(condition15_ratio(half(), constant_family(half(), 1.0)).value == 1.0);
        CHECK(condition15_ratio(half(), alpha_geometric(half(), 0.5)).value == 1.0);
        CHECK(condition15_ratio(half(), alpha_single_level(half(), 1, 2.0)).value == 1.0);
    }
    SECTION("one-sided vanishing tail is infinite") {
        AdaptedFamily alpha = constant_family(half(), 0.0);
        alpha.level[1] = {1.0, 0.0};
        const ConstantReport rep = condition15_ratio(half(), alpha);
        CHECK(rep.infinite);
        CHECK(std::isinf(rep.value));
    }
}

TEST_CASE("trace-form test constant") {
    const AdaptedFamily alpha = alpha_single_level(half(), 0, 1.0);
    const ConstantReport rep = sawyer_trace_constant(half(), alpha, w13(), 2.0, 2.0);
    CHECK(rep.value == Approx(std::sqrt(2.0)));
    CHECK(rep.witnessLevel == 0);
    CHECK_THROWS_AS(sawyer_trace_constant(half(), alpha, w13(), 3.0, 2.0), ParameterError);
}

TEST_CASE("maximal-form test constant and its pointwise twin") {
    const AdaptedFamily alpha = alpha_single_level(half(), 0, 1.0);
    const WeightVector sigma = dual_weight(half(), w13(), 2.0);
    const double expected = 2.0 / std::sqrt(3.0);

    const ConstantReport rep = sawyer_max_constant(half(), alpha, w13(), sigma, 2.0, 2.0);
    CHECK(rep.value == Approx(expected));

    const ConstantReport pt = cor43_test_constant(half(), alpha, w13(), sigma, 2.0);
    CHECK(pt.value == Approx(expected));

    SetTestOptions opt;
    opt.exhaustiveSets = true;
    CHECK(sawyer_max_constant(half(), alpha, w13(), sigma, 2.0, 2.0, opt).value == Approx(expected));
}

TEST_CASE("exhaustive set scans are capacity limited") {
    const FilteredSpace sp = build_dyadic(4); // 16 blocks at the finest level
    SetTestOptions opt;
    opt.exhaustiveSets = true;
    CHECK_THROWS_AS(
        sawyer_max_constant(sp, constant_family(sp, 1.0), weight_constant(sp, 1.0),
                            weight_constant(sp, 1.0), 2.0, 2.0, opt),
        CapacityError);
}

TEST_CASE("tent constants") {
    CarlesonFamily nu;
    nu.level = {{0.5}, {0.0, 0.0}};
    SECTION("mass at the root only") {
        CHECK(carleson_constant(half(), nu, 1.0).value == Approx(0.5));
        CHECK(carleson_constant_stopping(half(), nu, 1.0).value == Approx(0.5));
        CHECK(carleson_constant(half(), nu, 2.0).value == Approx(0.5));
    }
    SECTION("deeper mass dominates through the suffix sums") {
        nu.level = {{0.1}, {0.3, 0.2}};
        const ConstantReport rep = carleson_constant(half(), nu, 1.0);
        CHECK(rep.value == Approx(0.6)); // root tent: (0.1 + 0.3 + 0.2) / 1
        CHECK(carleson_constant_stopping(half(), nu, 1.0).value == Approx(rep.value));
    }
    SECTION("zero family") {
        nu.level = {{0.0}, {0.0, 0.0}};
        CHECK(carleson_constant(half(), nu, 1.5).value == 0.0);
        CHECK(carleson_constant_stopping(half(), nu, 1.5).value == 0.0);
    }
}

TEST_CASE("dual-norm tent constant") {
    const AdaptedFamily ones = constant_family(half(), 1.0);
    CHECK(carleson_qlp_constant(half(), ones, w13(), 2.0) == Approx(std::sqrt(13.0 / 6.0)));
    CHECK_THROWS_AS(carleson_qlp_constant(half(), ones, w13(), 1.0), ParameterError);
}
