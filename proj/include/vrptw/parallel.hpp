#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <memory>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "vrptw/core.hpp"
#include "vrptw/memetic.hpp"
#include "vrptw/moves.hpp"
#include "vrptw/rng.hpp"
#include "vrptw/route_min.hpp"
#include "vrptw/solution.hpp"
#include "vrptw/stats.hpp"

namespace vrptw {

enum class CooperationScheme { chain, cyclic };
enum class FrequencyMode { constant, rare, frequent, adaptive };

/// Cooperation settings and the live state of the delta schedule.
struct CooperationConfig {
    CooperationScheme scheme = CooperationScheme::chain;
    FrequencyMode mode = FrequencyMode::frequent;
    double cf = 10.0;  // co-operation factor
    double uf = 2.0;   // update factor
    int ufr = 4;       // update frequency (in cooperation phases)
    int mfr = 1;       // minimal frequency: delta never drops below this
    double accept_probability = 0.9;  // cyclic: chance of taking a better neighbor

    // schedule state
    int delta = 0;  // 0 = not initialized yet
    int phase_count = 0;
    double t_avg_prev = 0.0;  // average RemoveRoute time, previous phase
    double t_avg_last = 0.0;  // averaged over the calls since the last phase

    void validate() const {
        if (cf <= 0.0) throw Error("cooperation: CF must be positive");
        if (mfr < 1) throw Error("cooperation: Mfr must be at least 1");
        if (scheme == CooperationScheme::cyclic &&
            (accept_probability <= 0.0 || accept_probability >= 1.0)) {
            throw Error("cooperation: cyclic acceptance probability must lie in (0, 1)");
        }
        if ((mode == FrequencyMode::rare || mode == FrequencyMode::frequent) && uf <= 1.0) {
            throw Error("cooperation: UF must exceed 1 for rare/frequent modes");
        }
    }
};

/// Cooperation frequency defaults keyed by instance size; sizes between the
/// published rows map to the nearest one, ties rounding down.
inline CooperationConfig cooperation_defaults(int instance_size) {
    struct Row {
        int size;
        FrequencyMode mode;
        double cf;
        double uf;
        int ufr;
        int mfr;
    };
    static const Row rows[] = {
        {200, FrequencyMode::frequent, 10.0, 2.0, 4, 1},
        {400, FrequencyMode::frequent, 10.0, 2.0, 4, 1},
        {600, FrequencyMode::adaptive, 10.0, 2.0, 1, 1},
        {800, FrequencyMode::rare, 5.0, 2.0, 3, 1},
        {1000, FrequencyMode::rare, 5.0, 2.0, 3, 1},
    };
    const Row* best = &rows[0];
    for (const Row& row : rows) {
        const int d = std::abs(instance_size - row.size);
        const int bd = std::abs(instance_size - best->size);
        if (d < bd || (d == bd && row.size < best->size)) best = &row;
    }
    CooperationConfig cfg;
    cfg.mode = best->mode;
    cfg.cf = best->cf;
    cfg.uf = best->uf;
    cfg.ufr = best->ufr;
    cfg.mfr = best->mfr;
    return cfg;
}

/// Advances the delta schedule and returns the number of RemoveRoute calls
/// for the next work phase. The first call initializes delta to
/// ceil(N / CF); afterwards rare/frequent divide by UF every Ufr phases and
/// adaptive divides by the ratio of the last two average call times (by CF
/// when there is no previous average). Never drops below Mfr.
inline int next_delta(CooperationConfig& cfg, int instance_size) {
    auto floor_clamp = [&](double value) {
        return std::max(cfg.mfr, static_cast<int>(std::ceil(value - kTimeTol)));
    };
    if (cfg.delta == 0) {
        cfg.delta = floor_clamp(static_cast<double>(instance_size) / cfg.cf);
        cfg.phase_count = 0;
        return cfg.delta;
    }
    ++cfg.phase_count;
    switch (cfg.mode) {
        case FrequencyMode::constant:
            break;
        case FrequencyMode::rare:
        case FrequencyMode::frequent:
            if (cfg.phase_count % cfg.ufr == 0) {
                cfg.delta = floor_clamp(cfg.delta / cfg.uf);
            }
            break;
        case FrequencyMode::adaptive:
            if (cfg.phase_count % cfg.ufr == 0) {
                if (cfg.t_avg_prev != 0.0) {
                    const double ratio = cfg.t_avg_last / cfg.t_avg_prev;
                    if (ratio > 0.0) cfg.delta = floor_clamp(cfg.delta / ratio);
                } else {
                    cfg.delta = floor_clamp(cfg.delta / cfg.cf);
                }
            }
            break;
    }
    return cfg.delta;
}

/// One parallel component: its working solution and route-removal engine.
struct Component {
    Solution solution;
    std::unique_ptr<RouteMinimizer> engine;
    std::uint64_t seed = 0;
};

struct Team {
    std::vector<Component> components;

    int size() const { return static_cast<int>(components.size()); }

    Solution& solution(int i) { return components[i].solution; }
    const Solution& solution(int i) const { return components[i].solution; }

    int best_index() const {
        int best = 0;
        for (int i = 1; i < size(); ++i) {
            if (cost_less(components[i].solution.cost(), components[best].solution.cost())) {
                best = i;
            }
        }
        return best;
    }
};

/// Chain cooperation: each component takes its predecessor's solution when
/// that one costs less, so the team minimum settles in the last slot.
inline void cooperate_chain(Team& team) {
    Cost pre_min = team.solution(0).cost();
    for (int i = 1; i < team.size(); ++i) {
        if (cost_less(team.solution(i).cost(), pre_min)) pre_min = team.solution(i).cost();
    }
    for (int i = 1; i < team.size(); ++i) {
        if (cost_less(team.solution(i - 1).cost(), team.solution(i).cost())) {
            team.solution(i) = team.solution(i - 1);
        }
    }
    const Cost last = team.solution(team.size() - 1).cost();
    if (compare_cost(last, pre_min) != 0) {
        throw std::logic_error("cooperate_chain: minimum failed to reach the last slot");
    }
}

/// Cyclic cooperation: the chain pass takes a better neighbor only with
/// probability q < 1, and the wrap link updates slot 0 only when it has
/// strictly more routes than the last slot (distance ties never cross).
inline void cooperate_cyclic(Team& team, Rng& rng, double accept_probability) {
    for (int i = 1; i < team.size(); ++i) {
        if (cost_less(team.solution(i - 1).cost(), team.solution(i).cost()) &&
            rng.chance(accept_probability)) {
            team.solution(i) = team.solution(i - 1);
        }
    }
    const int last = team.size() - 1;
    if (team.solution(0).cost().k > team.solution(last).cost().k) {
        team.solution(0) = team.solution(last);
    }
}

struct PhaOptions {
    int threads = 1;
    double time_limit_s = 1200.0;
    CooperationConfig cooperation;  // schedule state lives here during the run
    RouteMinParams route_min;
    int target_k = -1;  // stop as soon as any component reaches this; -1 = K_min
};

/// Phase 1: p cooperating components, each running RemoveRoute delta times
/// between cooperation phases. Stops when any component reaches the target
/// route count or the budget runs out; returns the team-best solution.
inline Solution run_pha(const Instance& inst, const Neighborhoods& nbrs, PhaOptions opt,
                        std::uint64_t master_seed, StatsSink* stats = nullptr) {
    using Clock = std::chrono::steady_clock;
    if (opt.threads < 1) throw Error("run_pha: thread count must be at least 1");
    opt.cooperation.validate();
    const auto t0 = Clock::now();
    const auto deadline = t0 + std::chrono::duration_cast<Clock::duration>(
                                   std::chrono::duration<double>(opt.time_limit_s));
    const int target = std::max(1, opt.target_k < 0 ? k_min(inst) : opt.target_k);

    Team team;
    Rng coop_rng(derive_seed(master_seed, 0, 0xC0));
    for (int i = 0; i < opt.threads; ++i) {
        Component c;
        c.solution = Solution::singletons(inst);
        c.seed = derive_seed(master_seed, static_cast<std::uint64_t>(i) + 1, 0x9A);
        c.engine = std::make_unique<RouteMinimizer>(inst, nbrs, opt.route_min, c.seed);
        team.components.push_back(std::move(c));
    }
    for (int i = 0; i < team.size(); ++i) {
        for (int j = i + 1; j < team.size(); ++j) {
            if (team.components[i].seed == team.components[j].seed) {
                throw std::logic_error("run_pha: component seeds collide");
            }
        }
    }

    std::atomic<bool> target_reached{false};
    auto reached = [&](const Solution& s) { return s.route_count() <= target; };
    for (auto& c : team.components) {
        if (reached(c.solution)) target_reached = true;
    }

    while (!target_reached && Clock::now() < deadline) {
        const int delta = next_delta(opt.cooperation, inst.size());
        std::atomic<long> call_count{0};
        std::atomic<double> call_seconds{0.0};
        auto work = [&](int i) {
            auto& comp = team.components[i];
            for (int call = 0; call < delta; ++call) {
                if (target_reached || Clock::now() >= deadline) break;
                const auto c0 = Clock::now();
                comp.engine->remove_route(comp.solution, deadline);
                const double secs = std::chrono::duration<double>(Clock::now() - c0).count();
                call_count += 1;
                double expected = call_seconds.load();
                while (!call_seconds.compare_exchange_weak(expected, expected + secs)) {
                }
                if (reached(comp.solution)) {
                    target_reached = true;
                    break;
                }
            }
        };
        if (team.size() == 1) {
            work(0);
        } else {
            std::vector<std::thread> threads;
            for (int i = 0; i < team.size(); ++i) threads.emplace_back(work, i);
            for (auto& t : threads) t.join();
        }
        opt.cooperation.t_avg_prev = opt.cooperation.t_avg_last;
        opt.cooperation.t_avg_last =
            call_count > 0 ? call_seconds.load() / static_cast<double>(call_count) : 0.0;

        if (team.size() > 1) {
            if (opt.cooperation.scheme == CooperationScheme::chain) {
                cooperate_chain(team);
            } else {
                cooperate_cyclic(team, coop_rng, opt.cooperation.accept_probability);
            }
        }
        if (stats) {
            for (int i = 0; i < team.size(); ++i) {
                const auto& comp = team.components[i];
                stats->record("pha", i,
                              {{"K", comp.solution.route_count()},
                               {"T", comp.solution.total_distance()},
                               {"delta", delta},
                               {"ep", comp.engine->last_pool_size()}});
            }
        }
    }
    return team.solution(team.best_index());
}

/// Fork-join executor distributing slots over p worker threads. Results do
/// not depend on the partitioning because every slot owns its RNG stream.
struct ThreadExecutor {
    int threads = 1;

    template <typename Fn>
    void operator()(int n, Fn&& fn) const {
        const int p = std::max(1, std::min(threads, n));
        std::vector<std::thread> workers;
        workers.reserve(p);
        for (int t = 0; t < p; ++t) {
            workers.emplace_back([&, t]() {
                for (int i = t; i < n; i += p) fn(i);
            });
        }
        for (auto& w : workers) w.join();
    }
};

/// Phase 2 in parallel: the N reproduction slots of each generation are
/// spread over p threads; the population update runs on the same executor;
/// generation boundaries are full barriers.
inline Solution run_pma(Population& pop, const Instance& inst, const Neighborhoods& nbrs,
                        const MAParams& params, int threads, std::uint64_t master_seed,
                        StatsSink* stats = nullptr) {
    if (threads < 1) throw Error("run_pma: thread count must be at least 1");
    std::function<void(const Population&)> hook;
    if (stats) {
        hook = [stats](const Population& p) {
            stats->record("ma", -1,
                          {{"generation", p.generation},
                           {"K", p.route_count},
                           {"best_T", p.best_distance()},
                           {"stagnation", p.stagnation}});
        };
    }
    return run_ma(pop, inst, nbrs, params, master_seed, ThreadExecutor{threads}, hook);
}

struct PopulationInitOptions {
    int size = 100;          // N
    double time_budget_s = 5.0;
    int max_duplicate_streak = 20;  // consecutive duplicate PHA results tolerated
    PhaOptions pha;
};

/// Builds the phase-2 population: repeated PHA runs collect distinct
/// solutions with the seed's route count until the budget expires, then the
/// remaining slots are filled with copied-and-perturbed members (I_P moves
/// each). Finding a better route count restarts the collection at that K.
inline Population build_initial_population(const Instance& inst, const Neighborhoods& nbrs,
                                           const std::optional<Solution>& seed,
                                           PopulationInitOptions opt, const MAParams& ma,
                                           std::uint64_t master_seed) {
    using Clock = std::chrono::steady_clock;
    const auto t0 = Clock::now();
    std::vector<Solution> collected;
    std::vector<std::vector<std::vector<int>>> signatures;
    int k = 0;
    if (seed) {
        collected.push_back(*seed);
        signatures.push_back(seed->signature());
        k = seed->route_count();
    }
    int dupes = 0;
    std::uint64_t attempt = 0;
    while (static_cast<int>(collected.size()) < opt.size &&
           dupes < opt.max_duplicate_streak) {
        const double elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
        const double remaining = opt.time_budget_s - elapsed;
        if (remaining <= 0.0) break;
        PhaOptions pha = opt.pha;
        pha.time_limit_s = remaining;
        if (k > 0) pha.target_k = k;
        auto sol =
            run_pha(inst, nbrs, pha, derive_seed(master_seed, ++attempt, 0xB00), nullptr);
        if (!sol.complete()) continue;
        if (k == 0 || sol.route_count() < k) {
            collected.clear();
            signatures.clear();
            k = sol.route_count();
        }
        if (sol.route_count() != k) {
            ++dupes;
            continue;
        }
        auto sig = sol.signature();
        if (std::find(signatures.begin(), signatures.end(), sig) != signatures.end()) {
            ++dupes;
            continue;
        }
        dupes = 0;
        signatures.push_back(std::move(sig));
        collected.push_back(std::move(sol));
    }
    if (collected.empty()) {
        throw Error("build_initial_population: no feasible solution found within the budget");
    }
    Rng fill_rng(derive_seed(master_seed, 0xF1D, 0));
    std::size_t next = 0;
    while (static_cast<int>(collected.size()) < opt.size) {
        Solution copy = collected[next % signatures.size()];
        ++next;
        perturb(copy, inst, nbrs, ma.i_p, fill_rng);
        collected.push_back(std::move(copy));
    }
    return Population::of(std::move(collected));
}

}  // namespace vrptw
