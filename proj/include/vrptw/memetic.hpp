#pragma once

#include <algorithm>
#include <chrono>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "vrptw/core.hpp"
#include "vrptw/eax.hpp"
#include "vrptw/moves.hpp"
#include "vrptw/rng.hpp"
#include "vrptw/solution.hpp"

namespace vrptw {

struct MAParams {
    int n_ch = 20;              // children generated per parent pair
    int i_c = 100;              // improving moves allowed per child
    int i_p = 50;               // moves applied when copying and perturbing
    int g_stagnation = 50;      // generations without improvement before stopping
    int max_generations = 500;  // hard generation cap (10x the stagnation limit)
    double time_limit_s = 300.0;
    int repair_max_moves = 1000;
    int escalation_candidates = 500;
};

/// Fitness of a feasible equal-K solution: higher is better, and the argmax
/// over a set is exactly the argmin of total distance.
inline double fitness(const Solution& sol) { return -sol.total_distance(); }

struct Population {
    std::vector<Solution> members;
    std::vector<std::optional<Solution>> best_child;  // per-slot buffers
    int route_count = 0;
    int generation = 0;
    int stagnation = 0;

    int size() const { return static_cast<int>(members.size()); }

    int best_index() const {
        int best = 0;
        for (int i = 1; i < size(); ++i) {
            if (members[i].total_distance() < members[best].total_distance()) best = i;
        }
        return best;
    }

    double best_distance() const { return members[best_index()].total_distance(); }

    static Population of(std::vector<Solution> solutions) {
        Population pop;
        pop.members = std::move(solutions);
        if (pop.members.empty()) throw Error("population: no members");
        pop.route_count = pop.members.front().route_count();
        for (const auto& m : pop.members) {
            if (m.route_count() != pop.route_count) {
                throw Error("population: members must share one route count");
            }
        }
        pop.best_child.assign(pop.members.size(), std::nullopt);
        return pop;
    }
};

/// AB pre-selection: a uniform random permutation r pairs member r(i) with
/// r(i+1 mod N), so every member serves once as p_A and once as p_B.
inline std::vector<std::pair<int, int>> pair_parents(int n, Rng& rng) {
    if (n < 2) throw Error("pair_parents: reproduction needs at least two members");
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    rng.shuffle(perm);
    std::vector<std::pair<int, int>> pairs(n);
    for (int i = 0; i < n; ++i) pairs[i] = {perm[i], perm[(i + 1) % n]};
    return pairs;
}

/// Generates N_ch children for one pair (EAX with a random strategy, then
/// repair, then scoped local search) and keeps the fittest feasible one.
/// Children that fail repair, change the route count, or come from a no-op
/// crossover are discarded; with none left the result is empty.
inline std::optional<Solution> best_child(const Solution& pa, const Solution& pb,
                                          const Instance& inst, const Neighborhoods& nbrs,
                                          const MAParams& params, Rng& rng) {
    std::optional<Solution> best;
    for (int t = 0; t < params.n_ch; ++t) {
        const auto strategy = rng.chance(0.5) ? EaxStrategy::single : EaxStrategy::block;
        auto ex = eax_crossover(pa, pb, inst, strategy, rng);
        if (ex.noop) continue;
        auto rep = repair(ex.child, inst, nbrs, rng, params.repair_max_moves,
                          params.escalation_candidates);
        if (!rep.feasible) continue;
        if (ex.child.route_count() != pa.route_count()) continue;
        std::vector<int> modified = ex.modified_routes;
        modified.insert(modified.end(), rep.touched_routes.begin(), rep.touched_routes.end());
        std::sort(modified.begin(), modified.end());
        modified.erase(std::unique(modified.begin(), modified.end()), modified.end());
        local_search(ex.child, inst, Scope::of_routes(nbrs, ex.child, modified), params.i_c,
                     rng);
        if (!best || fitness(ex.child) > fitness(*best)) best = std::move(ex.child);
    }
    return best;
}

/// One generation's reproduction slots, runnable by any executor that calls
/// fn(i) for every i in [0, n) and joins before returning.
struct SequentialExecutor {
    template <typename Fn>
    void operator()(int n, Fn&& fn) const {
        for (int i = 0; i < n; ++i) fn(i);
    }
};

/// Post-selection: the best child for a pair replaces its p_A slot when it
/// is strictly shorter. Slots are independent, so the replacement sweep can
/// run under any executor. Increments the stagnation counter unless the
/// best member improved.
template <typename Executor>
inline void form_next_population(Population& pop, Executor&& exec) {
    const double before = pop.best_distance();
    exec(pop.size(), [&](int i) {
        if (pop.best_child[i]) {
            if (pop.best_child[i]->total_distance() < pop.members[i].total_distance()) {
                pop.members[i] = std::move(*pop.best_child[i]);
            }
            pop.best_child[i] = std::nullopt;
        }
    });
    const double after = pop.best_distance();
    if (after < before) {
        pop.stagnation = 0;
    } else {
        ++pop.stagnation;
    }
    ++pop.generation;
}

inline void form_next_population(Population& pop) {
    form_next_population(pop, SequentialExecutor{});
}

inline bool check_termination(const Population& pop, const MAParams& params,
                              double elapsed_s) {
    return pop.stagnation >= params.g_stagnation || pop.generation >= params.max_generations ||
           elapsed_s >= params.time_limit_s;
}

/// The generation loop shared by the sequential MA and the parallel PMA.
/// Per-slot RNG streams are derived from (master seed, generation, slot),
/// which makes the outcome independent of how slots are scheduled.
template <typename Executor>
inline Solution run_ma(Population& pop, const Instance& inst, const Neighborhoods& nbrs,
                       const MAParams& params, std::uint64_t master_seed, Executor&& exec,
                       const std::function<void(const Population&)>& on_generation = {}) {
    using Clock = std::chrono::steady_clock;
    const auto t0 = Clock::now();
    if (pop.size() >= 2) {
        Rng orch(derive_seed(master_seed, 0, 0x0AC5));
        while (true) {
            const double elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
            if (check_termination(pop, params, elapsed)) break;
            const auto pairs = pair_parents(pop.size(), orch);
            const int gen = pop.generation;
            exec(pop.size(), [&](int i) {
                Rng slot_rng(derive_seed(master_seed, static_cast<std::uint64_t>(i) + 1,
                                         static_cast<std::uint64_t>(gen) + 1));
                auto child = best_child(pop.members[pairs[i].first], pop.members[pairs[i].second],
                                        inst, nbrs, params, slot_rng);
                pop.best_child[pairs[i].first] = std::move(child);
            });
            form_next_population(pop, exec);
            if (on_generation) on_generation(pop);
        }
    }
    return pop.members[pop.best_index()];
}

/// The sequential memetic algorithm: the generation loop on one thread.
inline Solution run_sequential_ma(Population& pop, const Instance& inst,
                                  const Neighborhoods& nbrs, const MAParams& params,
                                  std::uint64_t master_seed,
                                  const std::function<void(const Population&)>& on_generation = {}) {
    return run_ma(pop, inst, nbrs, params, master_seed, SequentialExecutor{}, on_generation);
}

}  // namespace vrptw
