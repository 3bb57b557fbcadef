#include <catch2/catch_amalgamated.hpp>

#include "filtlab/space.hpp"

using namespace filtlab;
using Catch::Approx;

TEST_CASE("dyadic spaces have equal masses and nested halves") {
    const FilteredSpace sp = build_dyadic(2);
    REQUIRE(sp.atom_count() == 4);
    REQUIRE(sp.levels() == 2);
    CHECK(sp.mass(0) == Approx(0.25));
    CHECK(sp.total_mass() == Approx(1.0));
    CHECK(sp.block_count(0) == 1);
    CHECK(sp.block_count(1) == 2);
    CHECK(sp.block_count(2) == 4);
    CHECK(sp.block_of(3, 1) == 1);
    CHECK(sp.parent_block(2, 3) == 1);
    CHECK(sp.block_mass(1, 0) == Approx(0.5));

    const FilteredSpace leaf = build_dyadic(0);
    CHECK(leaf.atom_count() == 1);
    CHECK(leaf.levels() == 0);
}

TEST_CASE("construction validates masses and refinement") {
    SECTION("nonpositive mass") {
        CHECK_THROWS_AS(FilteredSpace({1.0, 0.0}, {{0, 0}, {0, 1}}), ValidationError);
        CHECK_THROWS_AS(FilteredSpace({1.0, -2.0}, {{0, 0}, {0, 1}}), ValidationError);
    }
    SECTION("coarser level must not split finer blocks") {
        CHECK_THROWS_AS(FilteredSpace({1.0, 1.0}, {{0, 1}, {0, 0}}), ValidationError);
    }
    SECTION("no partitions at all") {
        CHECK_THROWS_AS(FilteredSpace({1.0}, {}), ValidationError);
    }
    SECTION("several roots are allowed") {
        const FilteredSpace sp({1.0, 2.0, 3.0}, {{0, 1, 1}, {0, 1, 2}});
        CHECK(sp.levels() == 1);
        CHECK(sp.block_count(0) == 2);
        CHECK(sp.block_mass(0, 1) == Approx(5.0));
    }
}

TEST_CASE("space json round trip") {
    const FilteredSpace sp({0.5, 1.5, 2.0}, {{0, 0, 0}, {0, 0, 1}, {0, 1, 2}});
    const FilteredSpace back = space_from_json(space_to_json(sp));
    REQUIRE(back.atom_count() == 3);
    REQUIRE(back.levels() == 2);
    for (int a = 0; a < 3; ++a) CHECK(back.mass(a) == sp.mass(a));
    for (int i = 0; i <= 2; ++i)
        for (int a = 0; a < 3; ++a) CHECK(back.block_of(a, i) == sp.block_of(a, i));
}

TEST_CASE("measures of block sets") {
    const FilteredSpace sp = build_dyadic(1);
    const WeightVector w{{1.0, 3.0}};
    const MeasurableSet left{1, {0}};
    CHECK(measure(sp, left) == Approx(0.5));
    CHECK(measure(sp, left, &w) == Approx(0.5));
    const MeasurableSet whole{0, {0}};
    CHECK(measure(sp, whole, &w) == Approx(2.0));
    CHECK_THROWS_AS(measure(sp, MeasurableSet{3, {0}}, nullptr), ValidationError);
}

TEST_CASE("atom function and weight json") {
    const FilteredSpace sp = build_dyadic(1);
    const AtomFunction f(std::vector<double>{1.5, -2.0});
    const AtomFunction back = atom_function_from_json(atom_function_to_json(f), sp);
    CHECK(back[0] == 1.5);
    CHECK(back[1] == -2.0);
    CHECK_THROWS_AS(atom_function_from_json(atom_function_to_json(AtomFunction(std::vector<double>{1.0})), sp),
                    ValidationError);
    CHECK_THROWS_AS(weight_from_json(weight_to_json(WeightVector{{-1.0, 1.0}}), sp), ValidationError);
}
