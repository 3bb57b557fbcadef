#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "filtlab/stopping.hpp"

using namespace filtlab;
using Catch::Approx;

TEST_CASE("stopping time counts on dyadic spaces") {
    CHECK(count_stopping_times(build_dyadic(0)) == 2.0);
    CHECK(count_stopping_times(build_dyadic(1)) == 5.0);
    CHECK(count_stopping_times(build_dyadic(2)) == 26.0);
}

TEST_CASE("enumeration matches the count and yields valid stopping times") {
    const FilteredSpace sp = build_dyadic(2);
    const auto all = enumerate_stopping_times(sp);
    CHECK(all.size() == 26);
    for (const StoppingTime& t : all) CHECK(is_stopping_time(sp, t).ok);
    CHECK_THROWS_AS(enumerate_stopping_times(sp, 10), CapacityError);
}

TEST_CASE("hitting times stop at the first level crossing the threshold") {
    const FilteredSpace sp = build_dyadic(2);
    // block averages of the indicator of atom 0, level by level
    AdaptedFamily fam;
    fam.level = {{0.25}, {0.5, 0.0}, {1.0, 0.0, 0.0, 0.0}};
    const StoppingTime tau = hitting_time(sp, fam, 0.3);
    CHECK(tau[0] == 1);
    CHECK(tau[1] == 1);
    CHECK(tau[2] == StoppingTime::kNever);
    CHECK(tau[3] == StoppingTime::kNever);
    CHECK(is_stopping_time(sp, tau).ok);

    const auto decomp = level_decomposition(sp, fam, 0.3);
    REQUIRE(decomp.size() == 3);
    CHECK(decomp[1].level == 1);
    CHECK(decomp[1].blocks == std::vector<int>{0});
    CHECK(decomp[0].blocks.empty());
    CHECK(decomp[2].blocks.empty());
}

TEST_CASE("dyadic band decomposition covers the positive part once") {
    const FilteredSpace sp = build_dyadic(2);
    const AdaptedFamily alpha = constant_family(sp, 1.0);
    const AtomFunction f(std::vector<double>{4.0, 1.0, 0.25, 0.0});
    // M f = (4, 2.5, 1.3125, 1.3125): window j in [-1, 2]
    const SawyerDecomposition dec = sawyer_decomposition(sp, alpha, f);
    CHECK(dec.jMin == -1);
    CHECK(dec.jMax == 2);
    std::vector<int> covered(4, 0);
    for (const SawyerCell& cell : dec.cells)
        for (int a : cell.atoms) covered[a] += 1;
    CHECK(covered == std::vector<int>{1, 1, 1, 1});

    const AtomFunction zero(4, 0.0);
    CHECK(sawyer_decomposition(sp, alpha, zero).cells.empty());
    CHECK_THROWS_AS(sawyer_decomposition(sp, alpha, AtomFunction(std::vector<double>{1.0, -1.0, 0.0, 0.0})),
                    ValidationError);
}

TEST_CASE("principal tree of a concentrated weight") {
    const FilteredSpace sp = build_dyadic(2);
    const WeightVector sigma{{8.0, 0.0, 0.0, 0.0}};
    const PrincipalNode root = principal_sets(sp, sigma, MeasurableSet{0, {0}}, 0);

    CHECK(root.kappa1 == 0);
    CHECK(root.kappa2 == 1); // 1 < E_0 sigma = 2 <= 2
    REQUIRE(root.children.size() == 1);
    const PrincipalNode& child = root.children[0];
    CHECK(child.kappa1 == 2);
    CHECK(child.kappa2 == 3); // 4 < 8 <= 8
    CHECK(child.atoms == std::vector<int>{0});
    CHECK(child.stoppedAtoms == std::vector<int>{0});

    std::vector<int> rootStopped = root.stoppedAtoms;
    std::sort(rootStopped.begin(), rootStopped.end());
    CHECK(rootStopped == std::vector<int>{1, 2, 3});
}

TEST_CASE("principal tree needs positive mass on the root") {
    const FilteredSpace sp = build_dyadic(2);
    const WeightVector sigma{{8.0, 0.0, 0.0, 0.0}};
    CHECK_THROWS_AS(principal_sets(sp, sigma, MeasurableSet{1, {1}}, 1), DegenerateWeightError);
}

TEST_CASE("principal tree json") {
    const FilteredSpace sp = build_dyadic(1);
    const WeightVector sigma{{1.0, 1.0}};
    const PrincipalNode root = principal_sets(sp, sigma, MeasurableSet{0, {0}}, 0);
    const auto j = principal_node_to_json(root);
    CHECK(j.at("kappa1").get<int>() == 0);
    CHECK(j.contains("children"));
}
