#pragma once

#include <algorithm>
#include <cassert>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "vrptw/core.hpp"
#include "vrptw/moves.hpp"
#include "vrptw/rng.hpp"
#include "vrptw/solution.hpp"

namespace vrptw {

enum class EaxStrategy { single, block };

struct EaxResult {
    Solution child;
    bool noop = false;                // parents were edge-wise identical
    std::vector<int> modified_routes;  // child routes not inherited verbatim from pA
    int merged_subtours = 0;
    std::vector<std::pair<int, int>> reconnection_arcs;  // two per merged subtour
};

namespace eax_detail {

struct Arc {
    int tail;
    int head;
    bool from_a;
};

/// Directed arc set of a solution, depot legs included (one pair per route).
inline std::vector<std::pair<int, int>> arcs_of(const Solution& sol) {
    std::vector<std::pair<int, int>> arcs;
    for (const auto& r : sol.routes()) {
        if (r.empty()) continue;
        int prev = 0;
        for (int v : r.ids) {
            arcs.push_back({prev, v});
            prev = v;
        }
        arcs.push_back({prev, 0});
    }
    return arcs;
}

}  // namespace eax_detail

/// Edge-assembly crossover. Builds the multigraph of the parents' arc
/// symmetric difference, partitions it into AB-cycles by alternate tracing
/// (parent-A arcs along their direction, parent-B arcs against), picks an
/// E-set (one random cycle, or a random cycle plus every cycle sharing a
/// vertex with it), applies it to parent A and reconnects any detached
/// subtours into the routes by the cheapest 2-opt*-style splice.
inline EaxResult eax_crossover(const Solution& pa, const Solution& pb, const Instance& inst,
                               EaxStrategy strategy, Rng& rng) {
    using eax_detail::Arc;
    EaxResult result;

    auto ea = eax_detail::arcs_of(pa);
    auto eb = eax_detail::arcs_of(pb);
    std::set<std::pair<int, int>> set_a(ea.begin(), ea.end());
    std::set<std::pair<int, int>> set_b(eb.begin(), eb.end());

    std::vector<Arc> arcs;
    for (const auto& [u, v] : ea) {
        if (!set_b.count({u, v})) arcs.push_back({u, v, true});
    }
    for (const auto& [u, v] : eb) {
        if (!set_a.count({u, v})) arcs.push_back({u, v, false});
    }
    if (arcs.empty()) {
        result.child = pa;
        result.noop = true;
        return result;
    }

    const int n = inst.size();
    std::vector<std::vector<int>> a_out(n + 1), b_in(n + 1);
    for (int i = 0; i < static_cast<int>(arcs.size()); ++i) {
        if (arcs[i].from_a) {
            a_out[arcs[i].tail].push_back(i);
        } else {
            b_in[arcs[i].head].push_back(i);
        }
    }
    std::vector<char> used(arcs.size(), 0);

    auto pick_unused = [&](const std::vector<int>& list) -> int {
        int count = 0;
        int chosen = -1;
        for (int idx : list) {
            if (!used[idx] && rng.index(++count) == 0) chosen = idx;
        }
        return chosen;
    };

    // Alternate tracing with a parity stack: whenever the walk returns to a
    // vertex already visited at even parity, the arcs in between close one
    // AB-cycle.
    std::vector<std::vector<int>> cycles;  // arc indices per cycle
    std::vector<int> a_starts;
    for (int i = 0; i < static_cast<int>(arcs.size()); ++i) {
        if (arcs[i].from_a) a_starts.push_back(i);
    }
    rng.shuffle(a_starts);
    std::vector<int> path;                       // consumed arcs, alternating A,B
    std::vector<int> anchors;                    // vertex before each A-arc
    std::unordered_map<int, std::vector<int>> occ;  // vertex -> anchor indices
    for (int start_arc : a_starts) {
        if (used[start_arc]) continue;
        int cur = arcs[start_arc].tail;
        path.clear();
        anchors.clear();
        occ.clear();
        while (true) {
            const auto it = occ.find(cur);
            if (it != occ.end() && !it->second.empty()) {
                const int j0 = it->second.back();
                cycles.emplace_back(path.begin() + 2 * j0, path.end());
                for (int j = j0; j < static_cast<int>(anchors.size()); ++j) {
                    occ[anchors[j]].pop_back();
                }
                anchors.resize(j0);
                path.resize(2 * j0);
                if (path.empty()) {
                    const int next = pick_unused(a_out[cur]);
                    if (next < 0) break;  // start a fresh walk elsewhere
                }
            }
            const int a_arc = pick_unused(a_out[cur]);
            assert(a_arc >= 0);
            if (a_arc < 0) throw std::logic_error("eax: tracing stuck on an A-arc");
            occ[cur].push_back(static_cast<int>(anchors.size()));
            anchors.push_back(cur);
            used[a_arc] = 1;
            path.push_back(a_arc);
            const int w = arcs[a_arc].head;
            const int b_arc = pick_unused(b_in[w]);
            assert(b_arc >= 0);
            if (b_arc < 0) throw std::logic_error("eax: tracing stuck on a B-arc");
            used[b_arc] = 1;
            path.push_back(b_arc);
            cur = arcs[b_arc].tail;
        }
    }
    assert(std::all_of(used.begin(), used.end(), [](char c) { return c == 1; }));

    // E-set selection.
    std::vector<int> chosen;
    const int seed_cycle = static_cast<int>(rng.index(cycles.size()));
    chosen.push_back(seed_cycle);
    if (strategy == EaxStrategy::block && cycles.size() > 1) {
        std::vector<char> in_seed(n + 1, 0);
        for (int a : cycles[seed_cycle]) {
            in_seed[arcs[a].tail] = 1;
            in_seed[arcs[a].head] = 1;
        }
        for (int c = 0; c < static_cast<int>(cycles.size()); ++c) {
            if (c == seed_cycle) continue;
            for (int a : cycles[c]) {
                if (in_seed[arcs[a].tail] || in_seed[arcs[a].head]) {
                    chosen.push_back(c);
                    break;
                }
            }
        }
    }

    // Child arcs: E_A minus the E-set's A-arcs plus its B-arcs.
    std::vector<int> succ(n + 1, -1);
    std::vector<int> depot_heads;
    for (const auto& [u, v] : ea) {
        if (u == 0) {
            depot_heads.push_back(v);
        } else {
            succ[u] = v;
        }
    }
    for (int c : chosen) {
        for (int ai : cycles[c]) {
            const auto& arc = arcs[ai];
            if (arc.from_a) {
                if (arc.tail == 0) {
                    auto it = std::find(depot_heads.begin(), depot_heads.end(), arc.head);
                    assert(it != depot_heads.end());
                    depot_heads.erase(it);
                } else {
                    succ[arc.tail] = -1;
                }
            }
        }
    }
    for (int c : chosen) {
        for (int ai : cycles[c]) {
            const auto& arc = arcs[ai];
            if (!arc.from_a) {
                if (arc.tail == 0) {
                    depot_heads.push_back(arc.head);
                } else {
                    assert(succ[arc.tail] == -1);
                    succ[arc.tail] = arc.head;
                }
            }
        }
    }

    // Follow successors from each depot departure; anything left is a subtour.
    std::vector<char> placed(n + 1, 0);
    std::vector<std::vector<int>> routes;
    for (int head : depot_heads) {
        std::vector<int> ids;
        int v = head;
        while (v != 0) {
            assert(!placed[v]);
            placed[v] = 1;
            ids.push_back(v);
            v = succ[v];
            if (v < 0) throw std::logic_error("eax: broken successor chain");
        }
        routes.push_back(std::move(ids));
    }
    std::vector<std::vector<int>> subtours;
    for (int v = 1; v <= n; ++v) {
        if (placed[v]) continue;
        std::vector<int> tour;
        int u = v;
        while (!placed[u]) {
            placed[u] = 1;
            tour.push_back(u);
            u = succ[u];
        }
        subtours.push_back(std::move(tour));
    }

    // Merge subtours into routes, smallest first, by the splice that adds
    // the least distance. Feasibility is repair's job.
    std::sort(subtours.begin(), subtours.end(),
              [](const auto& a, const auto& b) { return a.size() < b.size(); });
    for (const auto& tour : subtours) {
        const int m = static_cast<int>(tour.size());
        double best_delta = std::numeric_limits<double>::infinity();
        int best_route = -1, best_at = -1, best_cut = -1;
        for (int r = 0; r < static_cast<int>(routes.size()); ++r) {
            const auto& ids = routes[r];
            const int len = static_cast<int>(ids.size());
            for (int i = -1; i < len; ++i) {  // arc (u -> x), depot legs included
                const int u = i < 0 ? 0 : ids[i];
                const int x = i + 1 < len ? ids[i + 1] : 0;
                for (int j = 0; j < m; ++j) {  // cut subtour arc (tour[j] -> tour[j+1])
                    const int sa = tour[j];
                    const int sb = tour[(j + 1) % m];
                    const double delta = inst.dist(u, sb) + inst.dist(sa, x) -
                                         inst.dist(u, x) - inst.dist(sa, sb);
                    if (delta < best_delta) {
                        best_delta = delta;
                        best_route = r;
                        best_at = i;
                        best_cut = j;
                    }
                }
            }
        }
        assert(best_route >= 0);
        std::vector<int> spliced;
        for (int t = 0; t < m; ++t) spliced.push_back(tour[(best_cut + 1 + t) % m]);
        const auto& ids = routes[best_route];
        const int u = best_at < 0 ? 0 : ids[best_at];
        const int x = best_at + 1 < static_cast<int>(ids.size()) ? ids[best_at + 1] : 0;
        result.reconnection_arcs.push_back({u, spliced.front()});
        result.reconnection_arcs.push_back({spliced.back(), x});
        ++result.merged_subtours;
        routes[best_route].insert(routes[best_route].begin() + best_at + 1, spliced.begin(),
                                  spliced.end());
    }

    std::vector<std::vector<int>> nonempty;
    for (auto& r : routes) {
        if (!r.empty()) nonempty.push_back(std::move(r));
    }
    result.child = Solution::from_routes(inst, nonempty);
    if (!result.child.complete()) throw std::logic_error("eax: child does not serve everyone");

    std::set<std::vector<int>> pa_routes;
    for (const auto& r : pa.routes()) pa_routes.insert(r.ids);
    for (int r = 0; r < result.child.route_count(); ++r) {
        if (!pa_routes.count(result.child.route(r).ids)) result.modified_routes.push_back(r);
    }
    return result;
}

struct RepairResult {
    bool feasible = false;
    std::vector<int> touched_routes;
};

/// Feasibility repair for crossover children: the same penalty descent used
/// while squeezing. Empty routes left by the crossover are dropped first
/// (the one place the route count may shrink).
inline RepairResult repair(Solution& child, const Instance& inst, const Neighborhoods& nbrs,
                           Rng& rng, int max_moves = 1000, int escalation_candidates = 500) {
    RepairResult out;
    child.erase_empty_routes(inst);
    DescentOptions opt;
    opt.max_moves = max_moves;
    opt.escalation_candidates = escalation_candidates;
    opt.touched_routes = &out.touched_routes;
    out.feasible = penalty_descent(child, inst, nbrs, rng, opt).feasible;
    std::sort(out.touched_routes.begin(), out.touched_routes.end());
    out.touched_routes.erase(std::unique(out.touched_routes.begin(), out.touched_routes.end()),
                             out.touched_routes.end());
    return out;
}

}  // namespace vrptw
