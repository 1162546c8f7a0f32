#pragma once

#include <cstdint>
#include <fstream>
#include <string>

#include <json.hpp>

#include "vrptw/core.hpp"
#include "vrptw/memetic.hpp"
#include "vrptw/parallel.hpp"
#include "vrptw/route_min.hpp"

namespace vrptw {

/// Full run configuration. Every field has a working default, so a bare
/// invocation with just an instance path runs both phases.
struct RunConfig {
    std::string instance;
    std::string phase = "both";  // routes | distance | both
    int threads = 1;
    std::uint64_t seed = 1;
    std::string out = "solution.txt";
    std::string stats;  // empty: no stats file

    double time_limit_s = 1200.0;      // phase-1 budget
    double route_time_limit_s = 50.0;  // per RemoveRoute call
    double ma_time_limit_s = 300.0;    // phase-2 budget

    double mu = 0.6;  // neighborhood fraction

    // route minimization
    int k_max = 3;
    int l_max = 5;
    int xi = 7;
    int i_max = 1000;
    int psi = 0;  // 0: use i_max / 5
    int perturb_min = 80;
    int perturb_max = 400;
    int perturb_factor = 2;
    int perturb_update_every = 50;
    double gate_threshold = 0.80;
    int gate_window = 100;
    int gate_fallback_trials = 3;
    int squeeze_max_moves = 1000;
    int escalation_candidates = 500;
    double pool_bound_fraction = 0.10;
    int far_margin = 2;
    int target_k = -1;  // stop phase 1 at this K; -1 = K_min

    // memetic algorithm
    int n_ch = 20;
    int i_c = 100;
    int i_p = 50;
    int g_stagnation = 50;
    int max_generations = 500;
    int population = 100;
    double init_budget_s = 5.0;

    // cooperation
    std::string coop_scheme = "chain";  // chain | cyclic
    std::string coop_mode = "auto";     // auto | constant | rare | frequent | adaptive
    double coop_cf = 0.0;               // 0: defaults for the instance size
    double coop_uf = 0.0;
    int coop_ufr = 0;
    int coop_mfr = 0;
    double coop_q = 0.9;

    void validate() const {
        if (phase != "routes" && phase != "distance" && phase != "both") {
            throw Error("config: phase must be routes, distance or both");
        }
        if (threads < 1) throw Error("config: threads must be at least 1");
        if (mu < 0.0 || mu > 1.0) throw Error("config: mu must lie in [0, 1]");
        if (time_limit_s <= 0.0 || route_time_limit_s <= 0.0 || ma_time_limit_s <= 0.0) {
            throw Error("config: time budgets must be positive");
        }
        if (population < 1) throw Error("config: population must be at least 1");
        if (coop_scheme != "chain" && coop_scheme != "cyclic") {
            throw Error("config: cooperation scheme must be chain or cyclic");
        }
        if (coop_mode != "auto" && coop_mode != "constant" && coop_mode != "rare" &&
            coop_mode != "frequent" && coop_mode != "adaptive") {
            throw Error("config: unknown cooperation mode " + coop_mode);
        }
        cooperation(200).validate();
        if (k_max < 1 || l_max < 0 || xi < 0 || i_max < 1) {
            throw Error("config: route-minimization counters must be positive");
        }
        if (n_ch < 1 || i_c < 0 || i_p < 0 || g_stagnation < 1 || max_generations < 1) {
            throw Error("config: memetic counters must be positive");
        }
    }

    RouteMinParams route_min_params() const {
        RouteMinParams p;
        p.k_max = k_max;
        p.l_max = l_max;
        p.xi = xi;
        p.i_max = i_max;
        p.psi = psi > 0 ? psi : i_max / 5;
        p.perturb_min = perturb_min;
        p.perturb_max = perturb_max;
        p.perturb_factor = perturb_factor;
        p.perturb_update_every = perturb_update_every;
        p.route_time_limit_s = route_time_limit_s;
        p.gate_threshold = gate_threshold;
        p.gate_window = gate_window;
        p.gate_fallback_trials = gate_fallback_trials;
        p.squeeze_max_moves = squeeze_max_moves;
        p.escalation_candidates = escalation_candidates;
        p.pool_bound_fraction = pool_bound_fraction;
        p.far_from_optimum_margin = far_margin;
        return p;
    }

    MAParams ma_params() const {
        MAParams p;
        p.n_ch = n_ch;
        p.i_c = i_c;
        p.i_p = i_p;
        p.g_stagnation = g_stagnation;
        p.max_generations = max_generations;
        p.time_limit_s = ma_time_limit_s;
        p.repair_max_moves = squeeze_max_moves;
        p.escalation_candidates = escalation_candidates;
        return p;
    }

    CooperationConfig cooperation(int instance_size) const {
        CooperationConfig cfg = cooperation_defaults(instance_size);
        if (coop_mode == "constant") cfg.mode = FrequencyMode::constant;
        if (coop_mode == "rare") cfg.mode = FrequencyMode::rare;
        if (coop_mode == "frequent") cfg.mode = FrequencyMode::frequent;
        if (coop_mode == "adaptive") cfg.mode = FrequencyMode::adaptive;
        if (coop_cf > 0.0) cfg.cf = coop_cf;
        if (coop_uf > 0.0) cfg.uf = coop_uf;
        if (coop_ufr > 0) cfg.ufr = coop_ufr;
        if (coop_mfr > 0) cfg.mfr = coop_mfr;
        cfg.scheme = coop_scheme == "cyclic" ? CooperationScheme::cyclic
                                             : CooperationScheme::chain;
        cfg.accept_probability = coop_q;
        return cfg;
    }

    PhaOptions pha_options(int instance_size) const {
        PhaOptions opt;
        opt.threads = threads;
        opt.time_limit_s = time_limit_s;
        opt.cooperation = cooperation(instance_size);
        opt.route_min = route_min_params();
        opt.target_k = target_k;
        return opt;
    }

    /// Applies the keys present in a JSON object over the current values.
    void apply_json(const nlohmann::json& j) {
        auto get = [&](const char* key, auto& field) {
            if (j.contains(key)) j.at(key).get_to(field);
        };
        get("instance", instance);
        get("phase", phase);
        get("threads", threads);
        get("seed", seed);
        get("out", out);
        get("stats", stats);
        get("time_limit_s", time_limit_s);
        get("route_time_limit_s", route_time_limit_s);
        get("ma_time_limit_s", ma_time_limit_s);
        get("mu", mu);
        get("k_max", k_max);
        get("l_max", l_max);
        get("xi", xi);
        get("i_max", i_max);
        get("psi", psi);
        get("perturb_min", perturb_min);
        get("perturb_max", perturb_max);
        get("perturb_factor", perturb_factor);
        get("perturb_update_every", perturb_update_every);
        get("gate_threshold", gate_threshold);
        get("gate_window", gate_window);
        get("gate_fallback_trials", gate_fallback_trials);
        get("squeeze_max_moves", squeeze_max_moves);
        get("escalation_candidates", escalation_candidates);
        get("pool_bound_fraction", pool_bound_fraction);
        get("far_margin", far_margin);
        get("target_k", target_k);
        get("n_ch", n_ch);
        get("i_c", i_c);
        get("i_p", i_p);
        get("g_stagnation", g_stagnation);
        get("max_generations", max_generations);
        get("population", population);
        get("init_budget_s", init_budget_s);
        get("coop_scheme", coop_scheme);
        get("coop_mode", coop_mode);
        get("coop_cf", coop_cf);
        get("coop_uf", coop_uf);
        get("coop_ufr", coop_ufr);
        get("coop_mfr", coop_mfr);
        get("coop_q", coop_q);
    }

    static RunConfig from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in.good()) throw Error("config: cannot open " + path);
        nlohmann::json j;
        in >> j;
        RunConfig cfg;
        cfg.apply_json(j);
        return cfg;
    }
};

}  // namespace vrptw
