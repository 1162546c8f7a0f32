#pragma once

// Shared test helpers: instance builders, random generators, and naive
// re-computations used as oracles against the library's cached paths.
// Everything here recomputes from raw instance data on purpose.

#include <algorithm>
#include <cmath>
#include <vector>

#include "vrptw/core.hpp"
#include "vrptw/rng.hpp"
#include "vrptw/solution.hpp"

namespace testutil {

using vrptw::Instance;
using vrptw::Rng;
using vrptw::Solution;

struct VertexSpec {
    double x, y, demand, open, close, service;
};

inline Instance make_instance(double capacity, const std::vector<VertexSpec>& rows,
                              const std::string& name = "test") {
    std::vector<double> xs, ys, ds, es, ls, ss;
    for (const auto& r : rows) {
        xs.push_back(r.x);
        ys.push_back(r.y);
        ds.push_back(r.demand);
        es.push_back(r.open);
        ls.push_back(r.close);
        ss.push_back(r.service);
    }
    return Instance(name, capacity, xs, ys, ds, es, ls, ss);
}

struct RandomInstanceOptions {
    int n = 8;
    double coord_span = 100.0;
    double capacity = 50.0;
    int max_demand = 15;
    double horizon = 600.0;
    double service = 10.0;
    bool tight_windows = false;  // narrow windows when true, wide otherwise
};

/// Random instance where every customer is individually reachable, so the
/// all-singletons solution is always feasible.
inline Instance random_instance(Rng& rng, const RandomInstanceOptions& opt) {
    std::vector<VertexSpec> rows;
    const double cx = opt.coord_span / 2.0;
    rows.push_back({cx, cx, 0.0, 0.0, opt.horizon, 0.0});
    for (int i = 0; i < opt.n; ++i) {
        VertexSpec v{};
        v.x = rng.uniform01() * opt.coord_span;
        v.y = rng.uniform01() * opt.coord_span;
        v.demand = 1 + static_cast<int>(rng.uniform(opt.max_demand));
        v.service = opt.service;
        const double from_depot = std::hypot(v.x - cx, v.y - cx);
        const double lo = from_depot;                                   // earliest reachable
        const double hi = opt.horizon - v.service - from_depot;          // latest that returns
        const double width = opt.tight_windows ? 20.0 + rng.uniform01() * 40.0
                                               : 120.0 + rng.uniform01() * 250.0;
        double center = lo + rng.uniform01() * std::max(1.0, hi - lo);
        double open = std::max(0.0, center - width / 2.0);
        double close = std::min(opt.horizon, center + width / 2.0);
        if (close < lo) close = lo;           // keep singleton route feasible
        if (close > hi) close = std::max(hi, open);
        if (open > close) open = std::max(0.0, close - width);
        v.open = open;
        v.close = close;
        rows.push_back(v);
    }
    return make_instance(opt.capacity, rows, "random");
}

struct NaiveRouteStats {
    double distance = 0.0;
    double load = 0.0;
    double lateness = 0.0;  // includes depot return
    bool feasible = false;
};

inline NaiveRouteStats naive_route(const Instance& inst, const std::vector<int>& ids) {
    NaiveRouteStats s;
    int prev = 0;
    double depart = inst.tw_open(0);
    for (int v : ids) {
        s.distance += inst.dist(prev, v);
        s.load += inst.demand(v);
        const double start = std::max(depart + inst.dist(prev, v), inst.tw_open(v));
        if (start > inst.tw_close(v) + vrptw::kTimeTol) s.lateness += start - inst.tw_close(v);
        depart = start + inst.service(v);
        prev = v;
    }
    s.distance += inst.dist(prev, 0);
    const double back = depart + inst.dist(prev, 0);
    if (back > inst.tw_close(0) + vrptw::kTimeTol) s.lateness += back - inst.tw_close(0);
    s.feasible = s.lateness == 0.0 && s.load <= inst.capacity + vrptw::kTimeTol;
    return s;
}

inline double naive_penalty(const Instance& inst, const std::vector<std::vector<int>>& routes) {
    double p = 0.0;
    for (const auto& ids : routes) {
        auto s = naive_route(inst, ids);
        p += s.lateness;
        if (s.load > inst.capacity + vrptw::kTimeTol) p += s.load - inst.capacity;
    }
    return p;
}

inline double naive_total_distance(const Instance& inst, const std::vector<std::vector<int>>& routes) {
    double t = 0.0;
    for (const auto& ids : routes) t += naive_route(inst, ids).distance;
    return t;
}

struct NaiveInsertion {
    bool feasible = false;
    double delta_distance = 0.0;
};

/// Full-route recomputation of an insertion: the oracle for the O(1) check.
inline NaiveInsertion naive_insertion(const Instance& inst, const std::vector<int>& ids,
                                      int pos, int v) {
    std::vector<int> mod = ids;
    mod.insert(mod.begin() + pos, v);
    auto before = naive_route(inst, ids);
    auto after = naive_route(inst, mod);
    NaiveInsertion out;
    out.feasible = after.feasible;
    out.delta_distance = after.distance - before.distance;
    return out;
}

/// Second, separately written solution checker (kept deliberately distinct
/// from vrptw::is_feasible): returns true iff the route lists form a valid
/// complete solution of the instance.
inline bool second_checker(const Instance& inst, const std::vector<std::vector<int>>& routes) {
    std::vector<int> count(inst.size() + 1, 0);
    for (const auto& ids : routes) {
        double t = inst.tw_open(0);
        double load = 0.0;
        int at = 0;
        for (int v : ids) {
            if (v < 1 || v > inst.size()) return false;
            count[v] += 1;
            t += inst.dist(at, v);
            if (t < inst.tw_open(v)) t = inst.tw_open(v);
            if (t > inst.tw_close(v) + vrptw::kTimeTol) return false;
            t += inst.service(v);
            load += inst.demand(v);
            at = v;
        }
        if (load > inst.capacity + vrptw::kTimeTol) return false;
        t += inst.dist(at, 0);
        if (t > inst.tw_close(0) + vrptw::kTimeTol) return false;
    }
    for (int v = 1; v <= inst.size(); ++v) {
        if (count[v] != 1) return false;
    }
    return true;
}

/// Builds a random complete feasible solution by inserting customers in
/// random order at random feasible positions, opening routes as needed.
inline Solution random_feasible_solution(const Instance& inst, Rng& rng) {
    Solution sol;
    sol.reset(inst);
    std::vector<int> order(inst.size());
    for (int i = 0; i < inst.size(); ++i) order[i] = i + 1;
    rng.shuffle(order);
    for (int v : order) {
        struct Slot {
            int r, pos;
        };
        std::vector<Slot> slots;
        for (int r = 0; r < sol.route_count(); ++r) {
            for (int pos = 0; pos <= sol.route(r).length(); ++pos) {
                if (vrptw::check_insertion(sol.route(r), pos, v, inst).feasible) {
                    slots.push_back({r, pos});
                }
            }
        }
        if (slots.empty()) {
            sol.add_route(inst, {v});
        } else {
            auto s = slots[rng.index(slots.size())];
            sol.insert(inst, v, s.r, s.pos);
        }
    }
    return sol;
}

}  // namespace testutil
