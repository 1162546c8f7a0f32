#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vrptw/driver.hpp"

namespace {

std::vector<int> parse_p_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(std::stoi(tok));
    }
    if (out.empty()) throw vrptw::Error("empty thread list");
    return out;
}

void add_common_options(CLI::App* cmd, vrptw::RunConfig& cfg) {
    cmd->add_option("--instance", cfg.instance, "instance file (Gehring-Homberger layout)");
    cmd->add_option("--phase", cfg.phase, "routes, distance or both")
        ->check(CLI::IsMember({"routes", "distance", "both"}));
    cmd->add_option("--threads", cfg.threads, "parallel components / worker threads");
    cmd->add_option("--seed", cfg.seed, "master seed");
    cmd->add_option("--time-limit-s", cfg.time_limit_s, "phase-1 budget in seconds");
    cmd->add_option("--route-time-limit-s", cfg.route_time_limit_s,
                    "budget per RemoveRoute call");
    cmd->add_option("--ma-time-limit-s", cfg.ma_time_limit_s, "phase-2 budget in seconds");
    cmd->add_option("--out", cfg.out, "solution file to write");
    cmd->add_option("--stats", cfg.stats, "line-delimited JSON stats file");
    cmd->add_option("--mu", cfg.mu, "neighborhood fraction");
    cmd->add_option("--population", cfg.population, "phase-2 population size");
    cmd->add_option("--init-budget-s", cfg.init_budget_s, "population build budget");
    cmd->add_option("--target-k", cfg.target_k, "stop phase 1 at this route count");
    cmd->add_option("--coop-scheme", cfg.coop_scheme, "chain or cyclic")
        ->check(CLI::IsMember({"chain", "cyclic"}));
    cmd->add_option("--coop-mode", cfg.coop_mode,
                    "auto, constant, rare, frequent or adaptive");
    cmd->add_option("--coop-q", cfg.coop_q, "cyclic acceptance probability");
    cmd->add_option("--max-generations", cfg.max_generations, "hard generation cap");
    cmd->add_option("--g-stagnation", cfg.g_stagnation,
                    "generations without improvement before stopping");
}

}  // namespace

int main(int argc, char** argv) {
    vrptw::RunConfig cfg;
    // --config is applied first so explicit flags override file values
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") {
            try {
                cfg = vrptw::RunConfig::from_file(argv[i + 1]);
            } catch (const std::exception& e) {
                std::cerr << "error: " << e.what() << '\n';
                return vrptw::kExitUsage;
            }
        }
    }

    CLI::App app{"two-phase VRPTW solver: route minimization + memetic distance minimization"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "JSON config file (flags override it)");

    auto* solve = app.add_subcommand("solve", "minimize routes, then distance");
    add_common_options(solve, cfg);

    auto* bench = app.add_subcommand("bench", "time the memetic phase across thread counts");
    add_common_options(bench, cfg);
    std::string p_list_text = "1,2,4";
    int repeats = 3;
    bench->add_option("--p-list", p_list_text, "comma-separated thread counts");
    bench->add_option("--repeats", repeats, "repetitions per thread count");

    auto* validate = app.add_subcommand("validate", "re-check a solution file");
    std::string val_instance, val_solution;
    validate->add_option("--instance", val_instance, "instance file")->required();
    validate->add_option("--solution", val_solution, "solution file")->required();

    auto* oracle = app.add_subcommand("oracle", "exhaustive optimum for tiny instances");
    std::string oracle_instance;
    int oracle_max_n = 9;
    oracle->add_option("--instance", oracle_instance, "instance file")->required();
    oracle->add_option("--max-n", oracle_max_n, "largest customer count accepted");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) {
            if (cfg.instance.empty()) {
                std::cerr << "error: --instance is required\n";
                return vrptw::kExitUsage;
            }
            return vrptw::solve_command(cfg);
        }
        if (bench->parsed()) {
            if (cfg.instance.empty()) {
                std::cerr << "error: --instance is required\n";
                return vrptw::kExitUsage;
            }
            std::unique_ptr<vrptw::StatsSink> stats;
            if (!cfg.stats.empty()) stats = vrptw::StatsSink::to_file(cfg.stats);
            vrptw::bench_command(cfg, parse_p_list(p_list_text), repeats, stats.get());
            return vrptw::kExitOk;
        }
        if (validate->parsed()) {
            return vrptw::validate_command(val_instance, val_solution);
        }
        if (oracle->parsed()) {
            return vrptw::oracle_command(oracle_instance, oracle_max_n);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return vrptw::kExitUsage;
    }
    return vrptw::kExitUsage;
}
