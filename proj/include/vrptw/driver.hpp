#pragma once

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "vrptw/config.hpp"
#include "vrptw/io.hpp"
#include "vrptw/memetic.hpp"
#include "vrptw/oracle.hpp"
#include "vrptw/parallel.hpp"
#include "vrptw/stats.hpp"

namespace vrptw {

// exit codes shared by the commands
constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitNoSolution = 3;

namespace driver_detail {

inline Instance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) throw Error("cannot open instance file " + path);
    return parse_instance(in);
}

inline std::string read_text(const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) throw Error("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace driver_detail

/// Runs phase 1 and/or phase 2 per the configuration, writes the solution
/// and stats files, and self-validates the written file. Exit 0 only for a
/// complete, feasible, re-validated solution.
inline int solve_command(const RunConfig& cfg, std::ostream& log = std::cerr) {
    using Clock = std::chrono::steady_clock;
    const auto t0 = Clock::now();
    Instance inst;
    try {
        cfg.validate();
        inst = driver_detail::load_instance(cfg.instance);
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    std::unique_ptr<StatsSink> stats;
    try {
        if (!cfg.stats.empty()) stats = StatsSink::to_file(cfg.stats);
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        Neighborhoods nbrs(inst, cfg.mu);
        auto sol = run_pha(inst, nbrs, cfg.pha_options(inst.size()), cfg.seed, stats.get());
        log << "phase 1: K=" << sol.route_count() << " T=" << sol.total_distance() << '\n';

        if (cfg.phase != "routes") {
            PopulationInitOptions init;
            init.size = cfg.population;
            init.time_budget_s = cfg.init_budget_s;
            init.pha = cfg.pha_options(inst.size());
            auto pop = build_initial_population(inst, nbrs, sol, init, cfg.ma_params(),
                                                derive_seed(cfg.seed, 0x707, 0));
            sol = run_pma(pop, inst, nbrs, cfg.ma_params(), cfg.threads,
                          derive_seed(cfg.seed, 0x909, 0), stats.get());
            log << "phase 2: K=" << sol.route_count() << " T=" << sol.total_distance() << '\n';
        }

        const std::string text = write_solution(sol, inst);
        {
            std::ofstream out(cfg.out);
            if (!out.good()) throw Error("cannot write solution file " + cfg.out);
            out << text;
        }
        auto check = validate_solution_file(inst, text);
        const double wall = std::chrono::duration<double>(Clock::now() - t0).count();
        if (stats) {
            stats->record("summary", -1,
                          {{"K", sol.route_count()},
                           {"T", sol.total_distance()},
                           {"wall_s", wall},
                           {"p", cfg.threads}});
            stats->flush();
        }
        if (!check.feasible) {
            log << "error: written solution failed re-validation:\n";
            for (const auto& p : check.problems) log << "  " << p << '\n';
            return kExitInfeasible;
        }
        log << "done: K=" << check.recomputed_vehicles << " T=" << check.recomputed_distance
            << " wall=" << wall << "s -> " << cfg.out << '\n';
        return kExitOk;
    } catch (const Error& e) {
        log << "error: " << e.what() << '\n';
        return kExitNoSolution;
    }
}

/// Re-checks a solution file against its instance with naive arithmetic.
inline int validate_command(const std::string& instance_path, const std::string& solution_path,
                            std::ostream& out = std::cout, std::ostream& log = std::cerr) {
    try {
        auto inst = driver_detail::load_instance(instance_path);
        auto report = validate_solution_file(inst, driver_detail::read_text(solution_path));
        out << "vehicles: " << report.recomputed_vehicles << '\n';
        out << "distance: " << report.recomputed_distance << '\n';
        for (const auto& p : report.problems) out << "violation: " << p << '\n';
        out << (report.feasible ? "FEASIBLE" : "INFEASIBLE") << '\n';
        return report.feasible ? kExitOk : kExitInfeasible;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}

/// Exhaustive ground truth for desk-scale instances.
inline int oracle_command(const std::string& instance_path, int max_n,
                          std::ostream& out = std::cout, std::ostream& log = std::cerr) {
    try {
        auto inst = driver_detail::load_instance(instance_path);
        const auto best = oracle_solve(inst, max_n);
        out << "K*: " << best.k << '\n';
        out << "T*: " << best.t << '\n';
        return kExitOk;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}

struct BenchCell {
    int p = 0;
    int repeat = 0;
    double wall_s = 0.0;
    Cost cost;
};

struct BenchSummary {
    std::vector<BenchCell> cells;
    std::vector<int> p_list;
    std::vector<double> median_wall_s;  // aligned with p_list
    std::vector<double> speedup;        // t(baseline) / t(p)
};

/// Times run_pma for each thread count, holding the evolution fixed: the
/// population and all per-slot RNG streams depend only on the repeat seed,
/// so every p does identical work. Population construction is excluded
/// from the timing.
inline BenchSummary bench_command(const RunConfig& cfg, const std::vector<int>& p_list,
                                  int repeats, StatsSink* stats = nullptr,
                                  std::ostream& out = std::cout) {
    using Clock = std::chrono::steady_clock;
    cfg.validate();
    auto inst = driver_detail::load_instance(cfg.instance);
    Neighborhoods nbrs(inst, cfg.mu);
    BenchSummary summary;
    summary.p_list = p_list;

    for (int rep = 0; rep < repeats; ++rep) {
        const std::uint64_t rep_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(rep), 0xBE);
        auto seed_sol = run_pha(inst, nbrs, cfg.pha_options(inst.size()), rep_seed, nullptr);
        PopulationInitOptions init;
        init.size = cfg.population;
        init.time_budget_s = cfg.init_budget_s;
        init.pha = cfg.pha_options(inst.size());
        const auto pop0 = build_initial_population(inst, nbrs, seed_sol, init, cfg.ma_params(),
                                                   derive_seed(rep_seed, 0x707, 0));
        for (int p : p_list) {
            Population pop = pop0;
            const auto c0 = Clock::now();
            auto best = run_pma(pop, inst, nbrs, cfg.ma_params(), p,
                                derive_seed(rep_seed, 0x909, 0), nullptr);
            const double wall = std::chrono::duration<double>(Clock::now() - c0).count();
            BenchCell cell{p, rep, wall, best.cost()};
            summary.cells.push_back(cell);
            if (stats) {
                stats->record("bench", -1,
                              {{"p", p},
                               {"repeat", rep},
                               {"wall_s", wall},
                               {"K", cell.cost.k},
                               {"T", cell.cost.t}});
            }
        }
    }

    auto median_for = [&](int p) {
        std::vector<double> walls;
        for (const auto& c : summary.cells) {
            if (c.p == p) walls.push_back(c.wall_s);
        }
        std::sort(walls.begin(), walls.end());
        return walls[walls.size() / 2];
    };
    for (int p : p_list) summary.median_wall_s.push_back(median_for(p));
    // S(p) = t(1) / t(p); without a p=1 column the first column is the base
    const bool has_one = std::find(p_list.begin(), p_list.end(), 1) != p_list.end();
    const double baseline = has_one ? median_for(1) : summary.median_wall_s.front();
    out << "p  median_wall_s  speedup  best(K, T)\n";
    for (std::size_t i = 0; i < p_list.size(); ++i) {
        const double s = summary.median_wall_s[i] > 0.0 ? baseline / summary.median_wall_s[i] : 0.0;
        summary.speedup.push_back(s);
        Cost best{};
        for (const auto& c : summary.cells) {
            if (c.p == p_list[i] && (best.k == 0 || cost_less(c.cost, best))) best = c.cost;
        }
        out << p_list[i] << "  " << summary.median_wall_s[i] << "  " << s << "  (" << best.k
            << ", " << best.t << ")\n";
        if (stats) {
            stats->record("bench_summary", -1,
                          {{"p", p_list[i]},
                           {"median_wall_s", summary.median_wall_s[i]},
                           {"speedup", s}});
        }
    }
    if (stats) stats->flush();
    return summary;
}

}  // namespace vrptw
