#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "vrptw/core.hpp"
#include "vrptw/moves.hpp"
#include "vrptw/rng.hpp"
#include "vrptw/solution.hpp"

namespace vrptw {

struct RouteMinParams {
    int k_max = 3;   // largest ejection set
    int l_max = 5;   // iterations a fresh insertion is protected from ejection
    int xi = 7;      // extra pool residents tolerated past i_max
    int i_max = 1000;
    int psi = 200;   // steady-state iteration limit (i_max / 5)
    int perturb_min = 80;
    int perturb_max = 400;
    int perturb_factor = 2;
    int perturb_update_every = 50;
    double route_time_limit_s = 50.0;
    double gate_threshold = 0.80;  // skip perturbing above this success ratio
    int gate_window = 100;
    int gate_fallback_trials = 3;  // failed calls before perturbing is forced back on
    int squeeze_max_moves = 1000;
    int escalation_candidates = 500;
    double pool_bound_fraction = 0.10;
    int far_from_optimum_margin = 2;

    int pool_bound(int n) const {
        return std::max(xi, static_cast<int>(std::ceil(pool_bound_fraction * n)));
    }
};

/// LIFO stack of unserved customers plus per-customer penalty counters and
/// last-insertion iteration stamps.
class EjectionPool {
  public:
    explicit EjectionPool(int n)
        : penalty_(n + 1, 1), stamp_(n + 1, std::numeric_limits<int>::min()) {}

    bool empty() const { return stack_.empty(); }
    int size() const { return static_cast<int>(stack_.size()); }

    void push(int v) { stack_.push_back(v); }

    int pop() {
        const int v = stack_.back();
        stack_.pop_back();
        return v;
    }

    int peek() const { return stack_.back(); }

    int penalty(int v) const { return penalty_[v]; }
    void bump_penalty(int v) { ++penalty_[v]; }
    void reset_penalties() { std::fill(penalty_.begin(), penalty_.end(), 1); }

    void stamp_insertion(int v, int iteration) { stamp_[v] = iteration; }
    /// True when v was inserted within the last l_max iterations and is
    /// therefore protected from ejection.
    bool recently_inserted(int v, int iteration, int l_max) const {
        return stamp_[v] != std::numeric_limits<int>::min() && iteration - stamp_[v] < l_max;
    }

    const std::vector<int>& contents() const { return stack_; }

  private:
    std::vector<int> stack_;
    std::vector<int> penalty_;
    std::vector<int> stamp_;
};

struct RemoveRouteState {
    int iteration = 0;
    int steady_count = 0;      // iterations with unchanged pool size
    int last_pool_size = -1;
    int window_success = 0;    // successes within the gate window
    std::vector<char> window;  // ring buffer of recent attempt outcomes
    int window_pos = 0;
    bool window_full = false;
    double elapsed_s = 0.0;

    void record_attempt(bool success, int window_size) {
        if (static_cast<int>(window.size()) != window_size) {
            window.assign(window_size, 0);
            window_pos = 0;
            window_full = false;
            window_success = 0;
        }
        if (window_full) window_success -= window[window_pos];
        window[window_pos] = success ? 1 : 0;
        window_success += window[window_pos];
        window_pos = (window_pos + 1) % window_size;
        if (window_pos == 0) window_full = true;
    }

    double success_ratio() const {
        const int n = window_full ? static_cast<int>(window.size()) : window_pos;
        return n == 0 ? 0.0 : static_cast<double>(window_success) / n;
    }
};

enum class StopDecision { keep_going, stop_success, stop_failure };

/// Fig. 1 stop conditions plus the steady-state and pool-size bounds.
inline StopDecision check_stop(const RemoveRouteState& state, const EjectionPool& pool,
                               const RouteMinParams& params, int instance_size) {
    if (pool.empty()) return StopDecision::stop_success;
    if (state.elapsed_s >= params.route_time_limit_s) return StopDecision::stop_failure;
    if (pool.size() > params.pool_bound(instance_size)) return StopDecision::stop_failure;
    if (state.iteration > params.i_max && pool.size() > params.xi) {
        return StopDecision::stop_failure;
    }
    if (state.steady_count >= params.psi) return StopDecision::stop_failure;
    return StopDecision::keep_going;
}

/// Perturbation move budget: starts at the minimum and doubles (by the
/// configured factor) every update interval until the cap.
inline int update_perturb_budget(const RemoveRouteState& state, const RouteMinParams& params) {
    long budget = params.perturb_min;
    for (int steps = state.iteration / params.perturb_update_every;
         steps > 0 && budget < params.perturb_max; --steps) {
        budget *= params.perturb_factor;
    }
    return static_cast<int>(std::min<long>(budget, params.perturb_max));
}

/// Two-class route selection: routes at or above the average size form the
/// first class, the rest the second. Far from the optimum the second class
/// is drawn from, otherwise the first; an empty class falls back to all.
inline int select_route_for_removal(const Solution& sol, Rng& rng, bool far_from_optimum) {
    const int k = sol.route_count();
    double avg = 0.0;
    for (int r = 0; r < k; ++r) avg += sol.route(r).length();
    avg /= k;
    std::vector<int> pick;
    for (int r = 0; r < k; ++r) {
        const bool big = sol.route(r).length() >= avg;
        if (far_from_optimum ? !big : big) pick.push_back(r);
    }
    if (pick.empty()) return static_cast<int>(rng.index(k));
    return pick[rng.index(pick.size())];
}

struct Ejection {
    int route = -1;
    std::vector<int> eject_positions;  // ascending positions in `route`
    int insert_position = -1;          // position in the reduced route
    int p_sum = 0;
};

/// Phase-1 engine: removes one route at a time by reinserting its
/// customers, squeezing through infeasible space and ejecting easy
/// customers when stuck.
class RouteMinimizer {
  public:
    using Clock = std::chrono::steady_clock;

    RouteMinimizer(const Instance& inst, const Neighborhoods& nbrs, RouteMinParams params,
                   std::uint64_t seed)
        : inst_(inst), nbrs_(nbrs), params_(params), rng_(seed), pool_(inst.size()) {}

    const RouteMinParams& params() const { return params_; }
    Rng& rng() { return rng_; }
    EjectionPool& pool() { return pool_; }
    const RemoveRouteState& last_state() const { return state_; }
    int last_pool_size() const { return last_pool_size_; }
    int consecutive_failures() const { return consecutive_failures_; }

    bool remove_route(Solution& sol) {
        return remove_route(sol, Clock::now() + std::chrono::hours(24 * 365));
    }

    /// One RemoveRoute call. On success the solution has one route less and
    /// is complete and feasible; on failure it is returned unchanged.
    bool remove_route(Solution& sol, Clock::time_point hard_deadline) {
        if (sol.route_count() <= 1) {
            ++consecutive_failures_;
            return false;
        }
        const auto start = Clock::now();
        const auto deadline = std::min(
            hard_deadline,
            start + std::chrono::duration_cast<Clock::duration>(
                        std::chrono::duration<double>(params_.route_time_limit_s)));

        const Solution snapshot = sol;
        const bool far = sol.route_count() > k_min(inst_) + params_.far_from_optimum_margin;
        const int removed = select_route_for_removal(sol, rng_, far);
        std::vector<int> ejected_ids = sol.remove_route(inst_, removed);
        rng_.shuffle(ejected_ids);
        pool_ = EjectionPool(inst_.size());
        for (int v : ejected_ids) pool_.push(v);
        state_ = RemoveRouteState{};

        while (true) {
            state_.elapsed_s = std::chrono::duration<double>(Clock::now() - start).count();
            if (Clock::now() >= deadline) state_.elapsed_s = params_.route_time_limit_s;
            const auto decision = check_stop(state_, pool_, params_, inst_.size());
            if (decision != StopDecision::keep_going) break;

            const int v = pool_.pop();
            bool inserted_clean = false;

            // All feasible insertion positions; a uniform random one is taken.
            std::vector<std::pair<int, int>> feasible;
            for (int r = 0; r < sol.route_count(); ++r) {
                const auto& route = sol.route(r);
                for (int pos = 0; pos <= route.length(); ++pos) {
                    if (check_insertion(route, pos, v, inst_).feasible) {
                        feasible.push_back({r, pos});
                    }
                }
            }
            if (!feasible.empty()) {
                const auto [r, pos] = feasible[rng_.index(feasible.size())];
                sol.insert(inst_, v, r, pos);
                pool_.stamp_insertion(v, state_.iteration);
                inserted_clean = true;
            } else if (squeeze(sol, v)) {
                pool_.stamp_insertion(v, state_.iteration);
                inserted_clean = true;
            }

            if (!inserted_clean) {
                pool_.bump_penalty(v);
                auto ej = find_best_ejection(sol, v);
                if (ej) {
                    apply_ejection(sol, v, *ej);
                    pool_.stamp_insertion(v, state_.iteration);
                } else {
                    pool_.push(v);  // nothing ejectable; retry later
                }
                if (perturb_allowed()) {
                    perturb(sol, inst_, nbrs_, update_perturb_budget(state_, params_), rng_);
                }
            }
            state_.record_attempt(inserted_clean, params_.gate_window);

            ++state_.iteration;
            if (pool_.size() == state_.last_pool_size) {
                ++state_.steady_count;
            } else {
                state_.steady_count = 0;
                state_.last_pool_size = pool_.size();
            }
        }

        last_pool_size_ = pool_.size();
        if (!pool_.empty()) {
            sol = snapshot;
            ++consecutive_failures_;
            return false;
        }
        consecutive_failures_ = 0;
        return true;
    }

    /// Inserts v at the position with the smallest penalty increase, then
    /// runs penalty descent. Restores the pre-squeeze solution on failure.
    bool squeeze(Solution& sol, int v) {
        const Solution snapshot = sol;
        int best_r = -1, best_pos = -1;
        double best_pen = std::numeric_limits<double>::infinity();
        double best_dist = 0.0;
        int ties = 0;
        std::vector<int> scratch;
        for (int r = 0; r < sol.route_count(); ++r) {
            const auto& ids = sol.route(r).ids;
            const double base_pen = sol.route(r).penalty(inst_);
            const double base_dist = sol.route(r).distance;
            for (int pos = 0; pos <= static_cast<int>(ids.size()); ++pos) {
                scratch.assign(ids.begin(), ids.end());
                scratch.insert(scratch.begin() + pos, v);
                const auto stats = move_detail::eval_seq(inst_, scratch);
                const double d_pen = move_detail::seq_pen(inst_, stats) - base_pen;
                const double d_dist = stats.dist - base_dist;
                bool better = d_pen < best_pen - kTimeTol ||
                              (d_pen <= best_pen + kTimeTol && d_dist < best_dist - kTimeTol);
                bool tie = !better && d_pen <= best_pen + kTimeTol &&
                           std::abs(d_dist - best_dist) <= kTimeTol;
                if (best_r < 0 || better) {
                    best_r = r;
                    best_pos = pos;
                    best_pen = d_pen;
                    best_dist = d_dist;
                    ties = 1;
                } else if (tie && rng_.index(++ties) == 0) {
                    best_r = r;
                    best_pos = pos;
                }
            }
        }
        sol.insert(inst_, v, best_r, best_pos);
        DescentOptions opt;
        opt.max_moves = params_.squeeze_max_moves;
        opt.escalation_candidates = params_.escalation_candidates;
        if (penalty_descent(sol, inst_, nbrs_, rng_, opt).feasible) return true;
        sol = snapshot;
        return false;
    }

    /// Smallest-P_sum feasible ejection over k = 1..k_max, skipping larger k
    /// once any k yields a candidate. Customers inserted within the last
    /// l_max iterations are protected. Uniform among min-P_sum candidates.
    std::optional<Ejection> find_best_ejection(const Solution& sol, int v) {
        std::optional<Ejection> best;
        int best_psum = std::numeric_limits<int>::max();
        int seen = 0;
        Route scratch;
        std::vector<int> eligible;
        for (int k = 1; k <= params_.k_max; ++k) {
            for (int r = 0; r < sol.route_count(); ++r) {
                const auto& route = sol.route(r);
                eligible.clear();
                for (int p = 0; p < route.length(); ++p) {
                    if (!pool_.recently_inserted(route.ids[p], state_.iteration, params_.l_max)) {
                        eligible.push_back(p);
                    }
                }
                if (static_cast<int>(eligible.size()) < k) continue;
                std::vector<int> combo(k);
                enumerate_combos(sol, r, eligible, combo, 0, 0, k, 0, 0.0, v, scratch, best,
                                 best_psum, seen);
            }
            if (best) break;
        }
        return best;
    }

    void apply_ejection(Solution& sol, int v, const Ejection& ej) {
        std::vector<int> ids = sol.route(ej.route).ids;
        std::vector<int> out;
        for (auto it = ej.eject_positions.rbegin(); it != ej.eject_positions.rend(); ++it) {
            out.push_back(ids[*it]);
            ids.erase(ids.begin() + *it);
        }
        std::reverse(out.begin(), out.end());  // ascending position order
        ids.insert(ids.begin() + ej.insert_position, v);
        sol.set_route_ids(inst_, ej.route, std::move(ids));
        for (int u : out) pool_.push(u);
    }

    bool perturb_allowed() const {
        if (consecutive_failures_ >= params_.gate_fallback_trials) return true;
        return state_.success_ratio() < params_.gate_threshold;
    }

  private:
    void enumerate_combos(const Solution& sol, int r, const std::vector<int>& eligible,
                          std::vector<int>& combo, int depth, int from, int k, int psum,
                          double eject_demand, int v, Route& scratch,
                          std::optional<Ejection>& best, int& best_psum, int& seen) {
        const auto& route = sol.route(r);
        if (depth == k) {
            if (route.load - eject_demand + inst_.demand(v) > inst_.capacity + kTimeTol) return;
            scratch.ids.clear();
            int next = 0;
            for (int p = 0; p < route.length(); ++p) {
                if (next < k && combo[next] == p) {
                    ++next;
                    continue;
                }
                scratch.ids.push_back(route.ids[p]);
            }
            scratch.recompute(inst_);
            for (int pos = 0; pos <= scratch.length(); ++pos) {
                if (!check_insertion(scratch, pos, v, inst_).feasible) continue;
                if (psum < best_psum) {
                    best_psum = psum;
                    best = Ejection{r, combo, pos, psum};
                    seen = 1;
                } else if (psum == best_psum && rng_.index(++seen) == 0) {
                    best = Ejection{r, combo, pos, psum};
                }
            }
            return;
        }
        for (int i = from; i <= static_cast<int>(eligible.size()) - (k - depth); ++i) {
            const int p = eligible[i];
            const int next_psum = psum + pool_.penalty(route.ids[p]);
            if (next_psum > best_psum) continue;  // p >= 1 each: extensions only grow
            combo[depth] = p;
            enumerate_combos(sol, r, eligible, combo, depth + 1, i + 1, k, next_psum,
                             eject_demand + inst_.demand(route.ids[p]), v, scratch, best,
                             best_psum, seen);
        }
    }

    const Instance& inst_;
    const Neighborhoods& nbrs_;
    RouteMinParams params_;
    Rng rng_;
    EjectionPool pool_;
    RemoveRouteState state_;
    int last_pool_size_ = 0;
    int consecutive_failures_ = 0;
};

}  // namespace vrptw
