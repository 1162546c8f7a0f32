#include <catch2/catch_amalgamated.hpp>

#include "support/testutil.hpp"
#include "vrptw/parallel.hpp"

using namespace vrptw;
using testutil::make_instance;

TEST_CASE("delta schedules follow the published settings", "[parallel]") {
    SECTION("rare at 800 customers starts at 160") {
        CooperationConfig cfg = cooperation_defaults(800);
        CHECK(cfg.mode == FrequencyMode::rare);
        CHECK(next_delta(cfg, 800) == 160);  // ceil(800 / 5)
    }

    SECTION("frequent at 200 halves after four phases") {
        CooperationConfig cfg = cooperation_defaults(200);
        CHECK(cfg.mode == FrequencyMode::frequent);
        CHECK(next_delta(cfg, 200) == 20);  // ceil(200 / 10)
        CHECK(next_delta(cfg, 200) == 20);
        CHECK(next_delta(cfg, 200) == 20);
        CHECK(next_delta(cfg, 200) == 20);
        CHECK(next_delta(cfg, 200) == 10);  // fourth completed phase divides
        for (int i = 0; i < 3; ++i) CHECK(next_delta(cfg, 200) == 10);
        CHECK(next_delta(cfg, 200) == 5);
    }

    SECTION("delta never drops below the minimal frequency") {
        CooperationConfig cfg = cooperation_defaults(200);
        int delta = 0;
        for (int i = 0; i < 200; ++i) delta = next_delta(cfg, 200);
        CHECK(delta == cfg.mfr);
        CHECK(delta == 1);
    }

    SECTION("constant mode never changes") {
        CooperationConfig cfg;
        cfg.mode = FrequencyMode::constant;
        cfg.cf = 10.0;
        const int first = next_delta(cfg, 300);
        CHECK(first == 30);
        for (int i = 0; i < 20; ++i) CHECK(next_delta(cfg, 300) == first);
    }

    SECTION("adaptive divides by the timing ratio, by CF without history") {
        CooperationConfig cfg = cooperation_defaults(600);
        CHECK(cfg.mode == FrequencyMode::adaptive);
        CHECK(next_delta(cfg, 600) == 60);  // ceil(600 / 10)
        cfg.t_avg_prev = 0.0;
        cfg.t_avg_last = 0.5;
        CHECK(next_delta(cfg, 600) == 6);  // no previous average: divide by CF
        cfg.t_avg_prev = 0.5;
        cfg.t_avg_last = 1.0;  // calls got slower: ratio 2
        CHECK(next_delta(cfg, 600) == 3);
        cfg.t_avg_prev = 1.0;
        cfg.t_avg_last = 0.25;  // faster: delta may grow again
        CHECK(next_delta(cfg, 600) == 12);
    }

    SECTION("sizes between rows map to the nearest, ties rounding down") {
        CHECK(cooperation_defaults(250).mode == FrequencyMode::frequent);
        CHECK(cooperation_defaults(500).mode == FrequencyMode::frequent);  // tie -> 400
        CHECK(cooperation_defaults(620).mode == FrequencyMode::adaptive);
        CHECK(cooperation_defaults(900).mode == FrequencyMode::rare);  // tie -> 800
        CHECK(cooperation_defaults(5000).mode == FrequencyMode::rare);
    }
}

TEST_CASE("cyclic acceptance probability of one is rejected", "[parallel]") {
    CooperationConfig cfg;
    cfg.scheme = CooperationScheme::cyclic;
    cfg.accept_probability = 1.0;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg.accept_probability = 0.9;
    CHECK_NOTHROW(cfg.validate());
}

namespace {

Team team_of(const std::vector<Solution>& sols) {
    Team team;
    for (std::size_t i = 0; i < sols.size(); ++i) {
        Component c;
        c.solution = sols[i];
        c.seed = i + 1;
        team.components.push_back(std::move(c));
    }
    return team;
}

}  // namespace

TEST_CASE("chain cooperation", "[parallel]") {
    Rng rng(31);
    testutil::RandomInstanceOptions opt;
    opt.n = 8;
    auto inst = testutil::random_instance(rng, opt);

    SECTION("equal solutions stay put") {
        auto s = testutil::random_feasible_solution(inst, rng);
        auto team = team_of({s, s, s});
        cooperate_chain(team);
        for (int i = 0; i < 3; ++i) CHECK(team.solution(i).signature() == s.signature());
    }

    SECTION("a best solution in slot 0 floods the team") {
        auto good = testutil::random_feasible_solution(inst, rng);
        // make strictly worse variants by appending detours
        Neighborhoods nbrs(inst, 1.0);
        for (int trial = 0; trial < 10; ++trial) {
            auto worse1 = testutil::random_feasible_solution(inst, rng);
            auto worse2 = testutil::random_feasible_solution(inst, rng);
            if (!cost_less(good.cost(), worse1.cost()) ||
                !cost_less(good.cost(), worse2.cost())) {
                continue;
            }
            auto team = team_of({good, worse1, worse2});
            cooperate_chain(team);
            for (int i = 0; i < 3; ++i) {
                CHECK(team.solution(i).signature() == good.signature());
            }
            break;
        }
    }

    SECTION("last slot always ends with the team minimum (randomized)") {
        for (int trial = 0; trial < 200; ++trial) {
            std::vector<Solution> sols;
            const int p = 2 + static_cast<int>(rng.uniform(4));
            for (int i = 0; i < p; ++i) {
                sols.push_back(testutil::random_feasible_solution(inst, rng));
            }
            Cost best = sols[0].cost();
            for (const auto& s : sols) {
                if (cost_less(s.cost(), best)) best = s.cost();
            }
            auto team = team_of(sols);
            cooperate_chain(team);  // throws on a postcondition breach
            CHECK(compare_cost(team.solution(p - 1).cost(), best) == 0);
        }
    }
}

TEST_CASE("cyclic cooperation", "[parallel]") {
    Rng rng(32);
    testutil::RandomInstanceOptions opt;
    opt.n = 8;
    auto inst = testutil::random_instance(rng, opt);

    SECTION("wrap link ignores same-K distance improvements") {
        auto a = testutil::random_feasible_solution(inst, rng);
        Solution b;
        for (int trial = 0; trial < 50; ++trial) {
            b = testutil::random_feasible_solution(inst, rng);
            if (b.route_count() == a.route_count() &&
                b.total_distance() < a.total_distance()) {
                break;
            }
        }
        if (b.route_count() == a.route_count() && b.total_distance() < a.total_distance()) {
            auto team = team_of({a, b});
            const auto sig = a.signature();
            cooperate_cyclic(team, rng, 0.9);
            CHECK(team.solution(0).signature() == sig);  // slot 0 unchanged
        }
    }

    SECTION("wrap link adopts a smaller fleet") {
        auto fewer = testutil::random_feasible_solution(inst, rng);
        auto team = team_of({Solution::singletons(inst), fewer});
        if (fewer.route_count() < inst.size()) {
            cooperate_cyclic(team, rng, 0.9);
            CHECK(team.solution(0).signature() == team.solution(1).signature());
        }
    }

    SECTION("better neighbors are taken with frequency ~q") {
        auto good = testutil::random_feasible_solution(inst, rng);
        Solution bad = Solution::singletons(inst);
        REQUIRE(cost_less(good.cost(), bad.cost()));
        const int trials = 10000;
        int taken = 0;
        for (int t = 0; t < trials; ++t) {
            auto team = team_of({good, bad});
            cooperate_cyclic(team, rng, 0.9);
            if (team.solution(1).signature() == good.signature()) ++taken;
        }
        const double freq = static_cast<double>(taken) / trials;
        CHECK(freq > 0.88);
        CHECK(freq < 0.92);
    }
}

TEST_CASE("PHA on a single component produces a feasible solution", "[parallel]") {
    Rng rng(33);
    testutil::RandomInstanceOptions opt;
    opt.n = 10;
    auto inst = testutil::random_instance(rng, opt);
    Neighborhoods nbrs(inst, 0.8);
    PhaOptions pha;
    pha.threads = 1;
    pha.time_limit_s = 3.0;
    pha.route_min.route_time_limit_s = 1.0;
    auto sol = run_pha(inst, nbrs, pha, 606);
    CHECK(sol.complete());
    CHECK(is_feasible(sol, inst).feasible);
    CHECK(sol.route_count() < inst.size());  // merged something
}

TEST_CASE("PHA stops immediately when the start already meets K_min", "[parallel]") {
    auto inst = make_instance(10.0, {{0, 0, 0, 0, 1000, 0}, {3, 4, 5, 0, 1000, 10}});
    REQUIRE(k_min(inst) == 1);
    Neighborhoods nbrs(inst, 1.0);
    PhaOptions pha;
    pha.threads = 1;
    pha.time_limit_s = 60.0;
    const auto t0 = std::chrono::steady_clock::now();
    auto sol = run_pha(inst, nbrs, pha, 1);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(sol.route_count() == 1);
    CHECK(secs < 5.0);
}

TEST_CASE("PHA teams do not lose to a single component (median over trials)",
          "[parallel]") {
    Rng rng(34);
    testutil::RandomInstanceOptions opt;
    opt.n = 12;
    opt.tight_windows = true;
    auto inst = testutil::random_instance(rng, opt);
    Neighborhoods nbrs(inst, 0.8);
    auto median_k = [&](int threads) {
        std::vector<int> ks;
        for (int trial = 0; trial < 5; ++trial) {
            PhaOptions pha;
            pha.threads = threads;
            pha.time_limit_s = 1.0;
            pha.route_min.route_time_limit_s = 0.3;
            ks.push_back(run_pha(inst, nbrs, pha, 1000 + trial).route_count());
        }
        std::sort(ks.begin(), ks.end());
        return ks[ks.size() / 2];
    };
    CHECK(median_k(4) <= median_k(1));
}

TEST_CASE("PMA with one thread matches the sequential MA bit for bit", "[parallel]") {
    Rng rng(35);
    testutil::RandomInstanceOptions opt;
    opt.n = 10;
    auto inst = testutil::random_instance(rng, opt);
    Neighborhoods nbrs(inst, 0.8);
    auto base = testutil::random_feasible_solution(inst, rng);
    std::vector<Solution> members;
    for (int i = 0; i < 6; ++i) {
        Solution copy = base;
        perturb(copy, inst, nbrs, 25, rng);
        members.push_back(std::move(copy));
    }
    auto pop_seq = Population::of(members);
    auto pop_par = Population::of(members);
    MAParams params;
    params.n_ch = 4;
    params.max_generations = 8;
    params.g_stagnation = 1000;
    params.time_limit_s = 1e6;
    auto a = run_sequential_ma(pop_seq, inst, nbrs, params, 512, {});
    auto b = run_pma(pop_par, inst, nbrs, params, 1, 512);
    CHECK(a.route_count() == b.route_count());
    CHECK(a.total_distance() == b.total_distance());
    CHECK(a.signature() == b.signature());
}

TEST_CASE("PMA with several threads keeps invariants and the same output", "[parallel]") {
    Rng rng(36);
    testutil::RandomInstanceOptions opt;
    opt.n = 10;
    auto inst = testutil::random_instance(rng, opt);
    Neighborhoods nbrs(inst, 0.8);
    auto base = testutil::random_feasible_solution(inst, rng);
    std::vector<Solution> members;
    for (int i = 0; i < 8; ++i) {
        Solution copy = base;
        perturb(copy, inst, nbrs, 25, rng);
        members.push_back(std::move(copy));
    }
    auto pop1 = Population::of(members);
    auto pop4 = Population::of(members);
    MAParams params;
    params.n_ch = 3;
    params.max_generations = 5;
    params.g_stagnation = 1000;
    params.time_limit_s = 1e6;
    auto a = run_pma(pop1, inst, nbrs, params, 1, 99);
    auto b = run_pma(pop4, inst, nbrs, params, 4, 99);
    CHECK(is_feasible(b, inst).feasible);
    CHECK(b.route_count() == base.route_count());
    // per-slot RNG streams make the outcome independent of the partitioning
    CHECK(a.signature() == b.signature());
}

TEST_CASE("population bootstrap", "[parallel]") {
    Rng rng(37);
    testutil::RandomInstanceOptions opt;
    opt.n = 10;
    auto inst = testutil::random_instance(rng, opt);
    Neighborhoods nbrs(inst, 0.8);
    MAParams ma;

    PhaOptions pha;
    pha.threads = 1;
    pha.time_limit_s = 1.0;
    pha.route_min.route_time_limit_s = 0.3;
    auto seed_sol = run_pha(inst, nbrs, pha, 42);

    SECTION("zero budget fills with perturbed copies of the seed") {
        PopulationInitOptions init;
        init.size = 8;
        init.time_budget_s = 0.0;
        init.pha = pha;
        auto pop = build_initial_population(inst, nbrs, seed_sol, init, ma, 7);
        REQUIRE(pop.size() == 8);
        CHECK(pop.route_count == seed_sol.route_count());
        for (const auto& m : pop.members) {
            CHECK(m.route_count() == pop.route_count);
            CHECK(is_feasible(m, inst).feasible);
        }
    }

    SECTION("size one keeps just the seed") {
        PopulationInitOptions init;
        init.size = 1;
        init.time_budget_s = 0.0;
        init.pha = pha;
        auto pop = build_initial_population(inst, nbrs, seed_sol, init, ma, 7);
        REQUIRE(pop.size() == 1);
        CHECK(pop.members[0].signature() == seed_sol.signature());
    }

    SECTION("collection gathers distinct equal-K solutions when time allows") {
        PopulationInitOptions init;
        init.size = 4;
        init.time_budget_s = 5.0;
        init.pha = pha;
        auto pop = build_initial_population(inst, nbrs, seed_sol, init, ma, 7);
        REQUIRE(pop.size() == 4);
        for (const auto& m : pop.members) {
            CHECK(m.route_count() == pop.route_count);
            CHECK(is_feasible(m, inst).feasible);
        }
    }

    SECTION("no seed and no budget is a refusal") {
        PopulationInitOptions init;
        init.size = 4;
        init.time_budget_s = 0.0;
        init.pha = pha;
        CHECK_THROWS_AS(build_initial_population(inst, nbrs, std::nullopt, init, ma, 7),
                        Error);
    }
}
