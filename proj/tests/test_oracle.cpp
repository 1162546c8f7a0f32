#include <catch2/catch_amalgamated.hpp>

#include "support/bruteforce.hpp"
#include "support/testutil.hpp"
#include "vrptw/oracle.hpp"

using namespace vrptw;
using testutil::make_instance;

TEST_CASE("oracle on one customer", "[oracle]") {
    auto inst = make_instance(10.0, {{0, 0, 0, 0, 1000, 0}, {3, 4, 5, 0, 1000, 10}});
    auto best = oracle_solve(inst);
    CHECK(best.k == 1);
    CHECK_THAT(best.t, Catch::Matchers::WithinAbs(10.0, 1e-9));
}

TEST_CASE("oracle on two co-located customers", "[oracle]") {
    auto inst = make_instance(10.0, {
                                        {0, 0, 0, 0, 1000, 0},
                                        {3, 4, 5, 0, 1000, 1},
                                        {3, 4, 5, 0, 1000, 1},
                                    });
    auto best = oracle_solve(inst);
    CHECK(best.k == 1);
    CHECK_THAT(best.t, Catch::Matchers::WithinAbs(10.0, 1e-9));
}

TEST_CASE("oracle refuses large instances", "[oracle]") {
    Rng rng(1);
    testutil::RandomInstanceOptions opt;
    opt.n = 10;
    auto inst = testutil::random_instance(rng, opt);
    CHECK_THROWS_AS(oracle_solve(inst, 9), Error);
}

TEST_CASE("oracle agrees with the permutation-based enumerator", "[oracle][property]") {
    Rng rng(20240814);
    for (int trial = 0; trial < 12; ++trial) {
        testutil::RandomInstanceOptions opt;
        opt.n = 4 + static_cast<int>(rng.uniform(4));  // 4..7 keeps this quick
        opt.capacity = 22.0;
        opt.tight_windows = rng.chance(0.5);
        auto inst = testutil::random_instance(rng, opt);
        auto a = oracle_solve(inst);
        auto b = testutil::brute_force_best(inst);
        CHECK(a.k == b.k);
        CHECK_THAT(a.t, Catch::Matchers::WithinAbs(b.t, 1e-6));
    }
}
