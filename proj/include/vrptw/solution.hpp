#pragma once

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "vrptw/core.hpp"

namespace vrptw {

/// One vehicle trip. The depot is implicit at both ends. Cached arrays
/// enable constant-time insertion checks:
///   earliest[i]  service start at position i when driving as early as
///                possible (early arrivals wait, late arrivals are kept
///                and counted as lateness),
///   latest[i]    latest service start at position i such that positions
///                i..end and the depot return stay within their windows.
struct Route {
    std::vector<int> ids;
    double distance = 0.0;
    double load = 0.0;
    double lateness = 0.0;  // total time-window lateness, depot return included
    std::vector<double> earliest;
    std::vector<double> latest;
    std::vector<double> load_prefix;

    bool empty() const { return ids.empty(); }
    int length() const { return static_cast<int>(ids.size()); }

    double capacity_excess(const Instance& inst) const {
        return load > inst.capacity + kTimeTol ? load - inst.capacity : 0.0;
    }

    double penalty(const Instance& inst) const { return capacity_excess(inst) + lateness; }

    bool time_feasible() const { return lateness == 0.0; }

    /// Departure time from position i (service start + service time).
    double departure(const Instance& inst, int i) const {
        return earliest[i] + inst.service(ids[i]);
    }

    void recompute(const Instance& inst) {
        const int n = length();
        earliest.resize(n);
        latest.resize(n);
        load_prefix.resize(n);
        distance = 0.0;
        load = 0.0;
        lateness = 0.0;
        int prev = 0;
        double depart = inst.tw_open(0);
        for (int i = 0; i < n; ++i) {
            const int v = ids[i];
            distance += inst.dist(prev, v);
            load += inst.demand(v);
            load_prefix[i] = load;
            const double arrive = depart + inst.dist(prev, v);
            const double start = std::max(arrive, inst.tw_open(v));
            earliest[i] = start;
            if (start > inst.tw_close(v) + kTimeTol) lateness += start - inst.tw_close(v);
            depart = start + inst.service(v);
            prev = v;
        }
        distance += inst.dist(prev, 0);
        const double back = depart + inst.dist(prev, 0);
        if (back > inst.tw_close(0) + kTimeTol) lateness += back - inst.tw_close(0);
        double limit = inst.tw_close(0);
        for (int i = n - 1; i >= 0; --i) {
            const int v = ids[i];
            const int nxt = (i + 1 < n) ? ids[i + 1] : 0;
            limit = std::min(inst.tw_close(v), limit - inst.service(v) - inst.dist(v, nxt));
            latest[i] = limit;
        }
    }
};

struct InsertionCheck {
    bool feasible = false;
    double delta_distance = 0.0;
};

/// Constant-time feasibility check for inserting customer v at `pos`
/// (0..length). Relies on the route's cached slack arrays being current.
inline InsertionCheck check_insertion(const Route& route, int pos, int v,
                                      const Instance& inst) {
    assert(pos >= 0 && pos <= route.length());
    const int prev = (pos > 0) ? route.ids[pos - 1] : 0;
    const int next = (pos < route.length()) ? route.ids[pos] : 0;
    InsertionCheck out;
    out.delta_distance = inst.dist(prev, v) + inst.dist(v, next) - inst.dist(prev, next);
    if (!route.time_feasible()) return out;
    if (route.load + inst.demand(v) > inst.capacity + kTimeTol) return out;
    const double depart_prev =
        (pos > 0) ? route.earliest[pos - 1] + inst.service(prev) : inst.tw_open(0);
    const double start_v = std::max(depart_prev + inst.dist(prev, v), inst.tw_open(v));
    if (!time_leq(start_v, inst.tw_close(v))) return out;
    const double arrive_next = start_v + inst.service(v) + inst.dist(v, next);
    const double limit_next = (pos < route.length()) ? route.latest[pos] : inst.tw_close(0);
    if (!time_leq(arrive_next, limit_next)) return out;
    out.feasible = true;
    return out;
}

enum class ViolationKind {
    capacity,
    time_window,
    depot_return,
    unserved,
    duplicate,
    structural,
};

struct Violation {
    ViolationKind kind;
    int route = -1;     // route index, -1 when not applicable
    int customer = -1;  // customer id, -1 when not applicable
    double amount = 0.0;
    std::string detail;
};

struct FeasibilityReport {
    bool feasible = true;
    std::vector<Violation> violations;

    void add(Violation v) {
        feasible = false;
        violations.push_back(std::move(v));
    }

    std::string to_string() const {
        std::ostringstream os;
        for (const auto& v : violations) {
            switch (v.kind) {
                case ViolationKind::capacity: os << "capacity"; break;
                case ViolationKind::time_window: os << "time_window"; break;
                case ViolationKind::depot_return: os << "depot_return"; break;
                case ViolationKind::unserved: os << "unserved"; break;
                case ViolationKind::duplicate: os << "duplicate"; break;
                case ViolationKind::structural: os << "structural"; break;
            }
            if (v.route >= 0) os << " route=" << v.route;
            if (v.customer >= 0) os << " customer=" << v.customer;
            if (v.amount != 0.0) os << " amount=" << v.amount;
            if (!v.detail.empty()) os << " (" << v.detail << ")";
            os << '\n';
        }
        return os.str();
    }
};

/// A set of routes plus a customer location index. May be partial (some
/// customers unserved) while phase 1 rebuilds a solution.
class Solution {
  public:
    Solution() = default;

    static Solution singletons(const Instance& inst) {
        Solution s;
        s.init(inst, 0);
        for (int v = 1; v <= inst.size(); ++v) s.add_route(inst, {v});
        return s;
    }

    static Solution from_routes(const Instance& inst, const std::vector<std::vector<int>>& routes) {
        Solution s;
        s.init(inst, 0);
        for (const auto& ids : routes) s.add_route(inst, ids);
        return s;
    }

    int route_count() const { return static_cast<int>(routes_.size()); }
    const Route& route(int r) const { return routes_[r]; }
    const std::vector<Route>& routes() const { return routes_; }
    double total_distance() const { return total_distance_; }
    Cost cost() const { return {route_count(), total_distance_}; }
    std::uint64_t version() const { return version_; }
    int customer_count() const { return static_cast<int>(where_.size()) - 1; }

    bool serves(int v) const { return where_[v].route >= 0; }
    int route_of(int v) const { return where_[v].route; }
    int position_of(int v) const { return where_[v].pos; }

    int served_count() const { return served_; }
    bool complete() const { return served_ == customer_count(); }

    /// Total constraint penalty: capacity excess plus time-window lateness
    /// over all routes. Zero iff every route is load- and time-feasible.
    double penalty(const Instance& inst) const {
        double p = 0.0;
        for (const auto& r : routes_) p += r.penalty(inst);
        return p;
    }

    int add_route(const Instance& inst, std::vector<int> ids) {
        for (int v : ids) {
            if (v < 1 || v > inst.size()) throw Error("route references unknown customer " + std::to_string(v));
            if (serves(v)) throw Error("customer " + std::to_string(v) + " already served");
        }
        const int r = route_count();
        routes_.push_back({});
        routes_[r].ids = std::move(ids);
        routes_[r].recompute(inst);
        for (int i = 0; i < routes_[r].length(); ++i) place(routes_[r].ids[i], r, i);
        refresh_totals();
        return r;
    }

    /// Removes route r and returns its customers. Route indices above r shift
    /// down by one.
    std::vector<int> remove_route(const Instance& inst, int r) {
        (void)inst;
        std::vector<int> ids = std::move(routes_[r].ids);
        for (int v : ids) unplace(v);
        routes_.erase(routes_.begin() + r);
        for (int j = r; j < route_count(); ++j) {
            for (int i = 0; i < routes_[j].length(); ++i) where_[routes_[j].ids[i]].route = j;
        }
        refresh_totals();
        return ids;
    }

    void insert(const Instance& inst, int v, int r, int pos) {
        assert(!serves(v));
        auto& ids = routes_[r].ids;
        ids.insert(ids.begin() + pos, v);
        routes_[r].recompute(inst);
        place(v, r, pos);
        for (int i = pos + 1; i < routes_[r].length(); ++i) where_[ids[i]].pos = i;
        refresh_totals();
    }

    /// Removes customer v from its route (the route stays, possibly empty).
    void erase(const Instance& inst, int v) {
        assert(serves(v));
        const int r = where_[v].route;
        const int pos = where_[v].pos;
        auto& ids = routes_[r].ids;
        ids.erase(ids.begin() + pos);
        routes_[r].recompute(inst);
        unplace(v);
        for (int i = pos; i < routes_[r].length(); ++i) where_[ids[i]].pos = i;
        refresh_totals();
    }

    /// Replaces the id sequence of route r wholesale.
    void set_route_ids(const Instance& inst, int r, std::vector<int> ids) {
        for (int v : routes_[r].ids) unplace(v);
        routes_[r].ids = std::move(ids);
        routes_[r].recompute(inst);
        for (int i = 0; i < routes_[r].length(); ++i) place(routes_[r].ids[i], r, i);
        refresh_totals();
    }

    /// Replaces two routes at once. Required when customers migrate between
    /// them: both old sequences are unregistered before either new one is
    /// placed, keeping the membership index consistent throughout.
    void set_two_route_ids(const Instance& inst, int r1, std::vector<int> ids1, int r2,
                           std::vector<int> ids2) {
        assert(r1 != r2);
        for (int v : routes_[r1].ids) unplace(v);
        for (int v : routes_[r2].ids) unplace(v);
        routes_[r1].ids = std::move(ids1);
        routes_[r2].ids = std::move(ids2);
        routes_[r1].recompute(inst);
        routes_[r2].recompute(inst);
        for (int i = 0; i < routes_[r1].length(); ++i) place(routes_[r1].ids[i], r1, i);
        for (int i = 0; i < routes_[r2].length(); ++i) place(routes_[r2].ids[i], r2, i);
        refresh_totals();
    }

    void erase_empty_routes(const Instance& inst) {
        for (int r = route_count() - 1; r >= 0; --r) {
            if (routes_[r].empty()) remove_route(inst, r);
        }
    }

    /// Canonical signature: route id sequences sorted lexicographically.
    /// Two solutions with the same signature have identical route sets.
    std::vector<std::vector<int>> signature() const {
        std::vector<std::vector<int>> sig;
        sig.reserve(routes_.size());
        for (const auto& r : routes_) sig.push_back(r.ids);
        std::sort(sig.begin(), sig.end());
        return sig;
    }

    void reset(const Instance& inst) { init(inst, 0); }

    /// Undo bookkeeping: a revert that restores prior state bit-exactly
    /// also rolls the version stamp back.
    void restore_version(std::uint64_t v) { version_ = v; }

  private:
    struct Loc {
        int route = -1;
        int pos = -1;
    };

    void init(const Instance& inst, int) {
        routes_.clear();
        where_.assign(inst.size() + 1, Loc{});
        served_ = 0;
        total_distance_ = 0.0;
        version_ = 0;
    }

    void place(int v, int r, int pos) {
        assert(where_[v].route < 0);
        where_[v] = {r, pos};
        ++served_;
    }

    void unplace(int v) {
        assert(where_[v].route >= 0);
        where_[v] = {};
        --served_;
    }

    // Summing per-route distances in route order keeps the total bit-stable
    // under apply/revert cycles.
    void refresh_totals() {
        total_distance_ = 0.0;
        for (const auto& r : routes_) total_distance_ += r.distance;
        ++version_;
    }

    std::vector<Route> routes_;
    std::vector<Loc> where_;
    int served_ = 0;
    double total_distance_ = 0.0;
    std::uint64_t version_ = 0;
};

/// Naive feasibility validator: walks raw id sequences using only the
/// instance data, independent of any cached slack structures. Collects
/// every violation rather than stopping at the first.
inline FeasibilityReport is_feasible(const Solution& sol, const Instance& inst) {
    FeasibilityReport rep;
    const int n = inst.size();
    std::vector<int> seen(n + 1, 0);
    for (int r = 0; r < sol.route_count(); ++r) {
        const auto& ids = sol.route(r).ids;
        double load = 0.0;
        double depart = inst.tw_open(0);
        int prev = 0;
        for (int i = 0; i < static_cast<int>(ids.size()); ++i) {
            const int v = ids[i];
            if (v < 1 || v > n) {
                rep.add({ViolationKind::structural, r, v, 0.0, "unknown customer id"});
                return rep;
            }
            seen[v]++;
            if (sol.route_of(v) != r || sol.position_of(v) != i) {
                rep.add({ViolationKind::structural, r, v, 0.0, "membership index out of sync"});
            }
            load += inst.demand(v);
            const double arrive = depart + inst.dist(prev, v);
            const double start = std::max(arrive, inst.tw_open(v));
            if (!time_leq(start, inst.tw_close(v))) {
                rep.add({ViolationKind::time_window, r, v, start - inst.tw_close(v), ""});
            }
            depart = start + inst.service(v);
            prev = v;
        }
        if (load > inst.capacity + kTimeTol) {
            rep.add({ViolationKind::capacity, r, -1, load - inst.capacity, ""});
        }
        const double back = depart + inst.dist(prev, 0);
        if (!time_leq(back, inst.tw_close(0))) {
            rep.add({ViolationKind::depot_return, r, -1, back - inst.tw_close(0), ""});
        }
    }
    for (int v = 1; v <= n; ++v) {
        if (seen[v] == 0) {
            rep.add({ViolationKind::unserved, -1, v, 0.0, ""});
        } else if (seen[v] > 1) {
            rep.add({ViolationKind::duplicate, -1, v, static_cast<double>(seen[v]), ""});
        } else if (!sol.serves(v)) {
            rep.add({ViolationKind::structural, -1, v, 0.0, "served but missing from index"});
        }
    }
    return rep;
}

}  // namespace vrptw
