#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "vrptw/core.hpp"

namespace vrptw {

/// Exact lexicographic-minimum (K, T) by exhaustive search over all ordered
/// set partitions of the customers into routes, pruning infeasible prefixes
/// and partials that cannot beat the incumbent. Desk-scale ground truth;
/// refuses instances above max_n customers.
class OracleSolver {
  public:
    explicit OracleSolver(const Instance& inst) : inst_(inst) {}

    Cost solve(int max_n = 9) {
        const int n = inst_.size();
        if (n > max_n) {
            throw Error("oracle_solve: instance has " + std::to_string(n) +
                        " customers, above the exhaustive limit of " + std::to_string(max_n));
        }
        best_ = {std::numeric_limits<int>::max(), std::numeric_limits<double>::infinity()};
        remaining_.assign(n + 1, true);
        remaining_[0] = false;
        remaining_count_ = n;
        partial_ = {0, 0.0};
        recurse_partition();
        return best_;
    }

  private:
    void recurse_partition() {
        if (remaining_count_ == 0) {
            if (cost_less(partial_, best_)) best_ = partial_;
            return;
        }
        // Lexicographic bound: at least one more route, and enough for the
        // remaining demand.
        double rem_demand = 0.0;
        int seed = -1;
        for (int v = 1; v <= inst_.size(); ++v) {
            if (remaining_[v]) {
                rem_demand += inst_.demand(v);
                if (seed < 0) seed = v;
            }
        }
        const int lb_k =
            partial_.k + std::max(1, static_cast<int>(std::ceil(rem_demand / inst_.capacity - kTimeTol)));
        if (lb_k > best_.k) return;
        if (lb_k == best_.k && partial_.t >= best_.t) return;
        // The next route must contain the lowest-numbered remaining customer,
        // so each partition is enumerated exactly once.
        extend_route(seed, 0, inst_.tw_open(0), 0.0, 0.0, false);
    }

    void extend_route(int seed, int last, double depart, double load, double dist,
                      bool seed_included) {
        if (seed_included) {
            const double back = depart + inst_.dist(last, 0);
            if (time_leq(back, inst_.tw_close(0))) {
                partial_.k += 1;
                partial_.t += dist + inst_.dist(last, 0);
                recurse_partition();
                partial_.k -= 1;
                partial_.t -= dist + inst_.dist(last, 0);
            }
        }
        for (int v = 1; v <= inst_.size(); ++v) {
            if (!remaining_[v]) continue;
            if (load + inst_.demand(v) > inst_.capacity + kTimeTol) continue;
            const double start = std::max(depart + inst_.dist(last, v), inst_.tw_open(v));
            if (!time_leq(start, inst_.tw_close(v))) continue;
            const double new_dist = dist + inst_.dist(last, v);
            if (partial_.k + 1 > best_.k) return;  // opening this route already loses
            if (partial_.k + 1 == best_.k && partial_.t + new_dist >= best_.t) continue;
            remaining_[v] = false;
            --remaining_count_;
            extend_route(seed, v, start + inst_.service(v), load + inst_.demand(v), new_dist,
                         seed_included || v == seed);
            remaining_[v] = true;
            ++remaining_count_;
        }
    }

    const Instance& inst_;
    Cost best_;
    Cost partial_;
    std::vector<bool> remaining_;
    int remaining_count_ = 0;
};

inline Cost oracle_solve(const Instance& inst, int max_n = 9) {
    return OracleSolver(inst).solve(max_n);
}

}  // namespace vrptw
