#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include "support/testutil.hpp"
#include "vrptw/io.hpp"

using namespace vrptw;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

const std::string kFixtures = VRPTW_FIXTURES_DIR;

}  // namespace

TEST_CASE("parse a hand-built two-customer file", "[io]") {
    auto inst = parse_instance(read_file(kFixtures + "/tiny_2.txt"));
    CHECK(inst.name == "tiny2");
    CHECK(inst.size() == 2);
    CHECK(inst.capacity == 100.0);
    CHECK(inst.vehicle_hint == 2);
    CHECK(inst.demand(1) == 20.0);
    CHECK(inst.tw_open(2) == 100.0);
    CHECK(inst.tw_close(0) == 1000.0);
    CHECK(inst.service(1) == 10.0);
}

TEST_CASE("parse errors carry line numbers", "[io]") {
    SECTION("inverted window") {
        CHECK_THROWS_AS(parse_instance(read_file(kFixtures + "/bad_window.txt")), ParseError);
    }
    SECTION("non-numeric field") {
        std::string text =
            "t\nVEHICLE\nNUMBER CAPACITY\n1 50\nCUSTOMER\nCUST NO. X Y D R DD S\n"
            "0 0 0 0 0 100 0\n1 5 x 1 0 100 0\n";
        try {
            parse_instance(text);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 8);
        }
    }
    SECTION("short row") {
        std::string text =
            "t\nVEHICLE\nNUMBER CAPACITY\n1 50\nCUSTOMER\nCUST NO. X Y D R DD S\n"
            "0 0 0 0 0 100 0\n1 5 5\n";
        CHECK_THROWS_AS(parse_instance(text), ParseError);
    }
    SECTION("duplicate id") {
        std::string text =
            "t\nVEHICLE\nNUMBER CAPACITY\n1 50\nCUSTOMER\nCUST NO. X Y D R DD S\n"
            "0 0 0 0 0 100 0\n1 5 5 1 0 100 0\n1 6 6 1 0 100 0\n";
        CHECK_THROWS_AS(parse_instance(text), ParseError);
    }
    SECTION("missing capacity block") {
        std::string text =
            "t\nCUSTOMER\nCUST NO. X Y D R DD S\n0 0 0 0 0 100 0\n1 5 5 1 0 100 0\n";
        CHECK_THROWS_AS(parse_instance(text), ParseError);
    }
}

TEST_CASE("whitespace-tolerant parsing", "[io]") {
    std::string text =
        "spaced\n\n\nVEHICLE\n  NUMBER\tCAPACITY  \n\t3   77\n\nCUSTOMER\n"
        "CUST NO. XCOORD. YCOORD. DEMAND READY DUE SERVICE\n\n"
        "0\t0\t0\t0\t0\t500\t0\n"
        "  1   3    4   7    0  400  5  \n\n\n";
    auto inst = parse_instance(text);
    CHECK(inst.size() == 1);
    CHECK(inst.capacity == 77.0);
    CHECK(inst.demand(1) == 7.0);
}

TEST_CASE("solution write/parse round trip", "[io]") {
    auto inst = parse_instance(read_file(kFixtures + "/tiny_2.txt"));
    Solution sol;
    sol.reset(inst);
    sol.add_route(inst, {1});
    sol.add_route(inst, {2});
    auto text = write_solution(sol, inst);
    auto doc = parse_solution(text);
    CHECK(doc.instance_name == "tiny2");
    REQUIRE(doc.routes.size() == 2);
    CHECK(doc.routes[0] == std::vector<int>{1});
    CHECK(doc.routes[1] == std::vector<int>{2});
    CHECK(doc.stated_vehicles == 2);
    CHECK_THAT(doc.stated_distance, Catch::Matchers::WithinAbs(sol.total_distance(), 0.005 + 1e-9));

    // parse(write(sol)) reproduces routes and cost
    auto again = Solution::from_routes(inst, doc.routes);
    CHECK(again.signature() == sol.signature());
    CHECK_THAT(again.total_distance(), Catch::Matchers::WithinAbs(sol.total_distance(), 1e-6));
    CHECK(parse_solution(write_solution(again, inst)).routes == doc.routes);
}

TEST_CASE("write refuses incomplete or infeasible solutions", "[io]") {
    auto inst = parse_instance(read_file(kFixtures + "/tiny_2.txt"));
    Solution empty;
    empty.reset(inst);
    CHECK_THROWS_AS(write_solution(empty, inst), Error);

    Solution partial;
    partial.reset(inst);
    partial.add_route(inst, {1});
    CHECK_THROWS_AS(write_solution(partial, inst), Error);
}

TEST_CASE("validate_solution_file catches violations", "[io]") {
    auto inst = parse_instance(read_file(kFixtures + "/tiny_2.txt"));

    SECTION("valid file") {
        Solution sol;
        sol.reset(inst);
        sol.add_route(inst, {1, 2});
        auto v = validate_solution_file(inst, write_solution(sol, inst));
        CHECK(v.feasible);
        CHECK(v.recomputed_vehicles == 1);
        CHECK_THAT(v.recomputed_distance,
                   Catch::Matchers::WithinAbs(sol.total_distance(), 1e-6));
    }

    SECTION("customer listed twice") {
        auto v = validate_solution_file(inst,
                                        "Route 1 : 1 2\nRoute 2 : 1\nVehicles: 2\n");
        CHECK_FALSE(v.feasible);
        bool found = false;
        for (const auto& p : v.problems) found |= p.find("served 2 times") != std::string::npos;
        CHECK(found);
    }

    SECTION("unknown id and unserved customer") {
        auto v = validate_solution_file(inst, "Route 1 : 1 9\nVehicles: 1\n");
        CHECK_FALSE(v.feasible);
        REQUIRE(v.problems.size() >= 2);
    }

    SECTION("tardy visit names the customer") {
        // Serve 2 (window opens 100) then 1 (window closes 900): forcing a
        // very late start at 1 needs a tighter instance, so shrink 1itself.
        std::vector<testutil::VertexSpec> rows = {
            {50, 50, 0, 0, 1000, 0},
            {10, 10, 20, 0, 60, 10},
            {90, 90, 30, 100, 800, 10},
        };
        auto tight = testutil::make_instance(100.0, rows);
        auto v = validate_solution_file(tight, "Route 1 : 2 1\nVehicles: 1\n");
        CHECK_FALSE(v.feasible);
        bool found = false;
        for (const auto& p : v.problems) {
            found |= p.find("customer 1 served after its due time") != std::string::npos;
        }
        CHECK(found);
    }
}

TEST_CASE("file validator agrees with is_feasible on random solutions", "[io][property]") {
    Rng rng(555);
    auto inst = parse_instance(read_file(kFixtures + "/tiny_2.txt"));
    testutil::RandomInstanceOptions opt;
    opt.n = 9;
    opt.tight_windows = true;
    auto big = testutil::random_instance(rng, opt);
    for (const Instance* ip : {&inst, &big}) {
        const Instance& in = *ip;
        for (int trial = 0; trial < 100; ++trial) {
            std::vector<std::vector<int>> routes(1 + rng.uniform(3));
            for (int v = 1; v <= in.size(); ++v) routes[rng.index(routes.size())].push_back(v);
            std::vector<std::vector<int>> nonempty;
            for (auto& r : routes) {
                if (!r.empty()) nonempty.push_back(r);
            }
            auto sol = Solution::from_routes(in, nonempty);
            std::ostringstream os;
            for (std::size_t r = 0; r < nonempty.size(); ++r) {
                os << "Route " << (r + 1) << " :";
                for (int v : nonempty[r]) os << ' ' << v;
                os << '\n';
            }
            auto filev = validate_solution_file(in, os.str());
            CHECK(filev.feasible == is_feasible(sol, in).feasible);
        }
    }
}
