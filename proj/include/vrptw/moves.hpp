#pragma once

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "vrptw/core.hpp"
#include "vrptw/rng.hpp"
#include "vrptw/solution.hpp"

namespace vrptw {

/// Nearest-neighbor lists truncated to a fraction mu of the customers,
/// sorted by ascending travel cost. Immutable and shared between engines.
class Neighborhoods {
  public:
    Neighborhoods(const Instance& inst, double mu) : mu_(mu) {
        const int n = inst.size();
        const int limit = std::min(n - 1, static_cast<int>(std::lround(mu * n)));
        lists_.resize(n + 1);
        std::vector<int> order;
        for (int v = 1; v <= n; ++v) {
            order.clear();
            for (int u = 1; u <= n; ++u) {
                if (u != v) order.push_back(u);
            }
            std::sort(order.begin(), order.end(), [&](int a, int b) {
                const double da = inst.dist(v, a), db = inst.dist(v, b);
                if (da != db) return da < db;
                return a < b;
            });
            order.resize(std::max(0, limit));
            lists_[v] = order;
        }
    }

    double mu() const { return mu_; }
    const std::vector<int>& of(int v) const { return lists_[v]; }

  private:
    double mu_;
    std::vector<std::vector<int>> lists_;
};

/// Which customers a search pass may touch. Moves pair a focus customer
/// with one of its near neighbors.
struct Scope {
    const Neighborhoods* nbrs = nullptr;
    std::vector<int> focus;

    static Scope all(const Neighborhoods& n, const Solution& sol) {
        Scope s;
        s.nbrs = &n;
        for (int v = 1; v <= sol.customer_count(); ++v) {
            if (sol.serves(v)) s.focus.push_back(v);
        }
        return s;
    }

    static Scope of_routes(const Neighborhoods& n, const Solution& sol,
                           const std::vector<int>& route_ids) {
        Scope s;
        s.nbrs = &n;
        for (int r : route_ids) {
            for (int v : sol.route(r).ids) s.focus.push_back(v);
        }
        return s;
    }
};

enum class MoveKind { relocate, exchange, two_opt_star, or_opt };

/// A candidate neighborhood move. `v` is the moved customer (segment head
/// for or-opt), `w` the anchor it is placed next to or exchanged with.
struct Move {
    MoveKind kind = MoveKind::relocate;
    int v = 0;
    int w = 0;
    int seg_len = 1;        // or_opt segment length (1 for relocate)
    bool before = false;    // insert before the anchor instead of after
    bool reversed = false;  // or_opt segment orientation
    int variant = 0;        // two_opt_star: 0 swap tails, 1 join v->w
    double delta_distance = 0.0;
    double delta_penalty = 0.0;
    std::uint64_t version = 0;
};

namespace move_detail {

struct SeqStats {
    double dist = 0.0;
    double load = 0.0;
    double lateness = 0.0;
};

inline SeqStats eval_seq(const Instance& inst, const std::vector<int>& ids) {
    SeqStats s;
    int prev = 0;
    double depart = inst.tw_open(0);
    for (int v : ids) {
        s.dist += inst.dist(prev, v);
        s.load += inst.demand(v);
        const double start = std::max(depart + inst.dist(prev, v), inst.tw_open(v));
        if (start > inst.tw_close(v) + kTimeTol) s.lateness += start - inst.tw_close(v);
        depart = start + inst.service(v);
        prev = v;
    }
    s.dist += inst.dist(prev, 0);
    const double back = depart + inst.dist(prev, 0);
    if (back > inst.tw_close(0) + kTimeTol) s.lateness += back - inst.tw_close(0);
    return s;
}

inline double seq_pen(const Instance& inst, const SeqStats& s) {
    const double excess = s.load > inst.capacity + kTimeTol ? s.load - inst.capacity : 0.0;
    return excess + s.lateness;
}

/// Concrete new id sequences for a move. Returns false when the move is
/// structurally invalid against the current solution (segment out of range,
/// anchor inside the segment, two_opt_star within one route, no-op).
inline bool materialize(const Solution& sol, const Move& m, int& r1, std::vector<int>& ids1,
                        int& r2, std::vector<int>& ids2) {
    r1 = r2 = -1;
    if (m.v == m.w) return false;
    if (!sol.serves(m.v) || !sol.serves(m.w)) return false;
    switch (m.kind) {
        case MoveKind::relocate:
        case MoveKind::or_opt: {
            const int len = m.seg_len;
            const int rs = sol.route_of(m.v);
            const int ps = sol.position_of(m.v);
            const int rd = sol.route_of(m.w);
            const auto& src = sol.route(rs).ids;
            if (ps + len > static_cast<int>(src.size())) return false;
            if (rd == rs) {
                const int pw = sol.position_of(m.w);
                if (pw >= ps && pw < ps + len) return false;
                ids1.assign(src.begin(), src.end());
                ids1.erase(ids1.begin() + ps, ids1.begin() + ps + len);
                const int pw2 = pw > ps ? pw - len : pw;
                const int at = pw2 + (m.before ? 0 : 1);
                ids1.insert(ids1.begin() + at, src.begin() + ps, src.begin() + ps + len);
                if (m.reversed) std::reverse(ids1.begin() + at, ids1.begin() + at + len);
                if (ids1 == src) return false;
                r1 = rs;
            } else {
                ids1.assign(src.begin(), src.end());
                ids1.erase(ids1.begin() + ps, ids1.begin() + ps + len);
                const auto& dst = sol.route(rd).ids;
                ids2.assign(dst.begin(), dst.end());
                const int at = sol.position_of(m.w) + (m.before ? 0 : 1);
                ids2.insert(ids2.begin() + at, src.begin() + ps, src.begin() + ps + len);
                if (m.reversed) std::reverse(ids2.begin() + at, ids2.begin() + at + len);
                r1 = rs;
                r2 = rd;
            }
            return true;
        }
        case MoveKind::exchange: {
            const int rv = sol.route_of(m.v), pv = sol.position_of(m.v);
            const int rw = sol.route_of(m.w), pw = sol.position_of(m.w);
            if (rv == rw) {
                ids1 = sol.route(rv).ids;
                std::swap(ids1[pv], ids1[pw]);
                r1 = rv;
            } else {
                ids1 = sol.route(rv).ids;
                ids2 = sol.route(rw).ids;
                ids1[pv] = m.w;
                ids2[pw] = m.v;
                r1 = rv;
                r2 = rw;
            }
            return true;
        }
        case MoveKind::two_opt_star: {
            const int rv = sol.route_of(m.v), i = sol.position_of(m.v);
            const int rw = sol.route_of(m.w), j = sol.position_of(m.w);
            if (rv == rw) return false;
            const auto& a = sol.route(rv).ids;
            const auto& b = sol.route(rw).ids;
            const int la = static_cast<int>(a.size()), lb = static_cast<int>(b.size());
            if (m.variant == 0) {
                if (i == la - 1 && j == lb - 1) return false;  // both tails empty
                ids1.assign(a.begin(), a.begin() + i + 1);
                ids1.insert(ids1.end(), b.begin() + j + 1, b.end());
                ids2.assign(b.begin(), b.begin() + j + 1);
                ids2.insert(ids2.end(), a.begin() + i + 1, a.end());
            } else {
                ids1.assign(a.begin(), a.begin() + i + 1);
                ids1.insert(ids1.end(), b.begin() + j, b.end());
                ids2.assign(b.begin(), b.begin() + j);
                ids2.insert(ids2.end(), a.begin() + i + 1, a.end());
            }
            r1 = rv;
            r2 = rw;
            return true;
        }
    }
    return false;
}

}  // namespace move_detail

/// True when applying the move would leave some route empty.
inline bool move_empties_route(const Solution& sol, const Move& m) {
    switch (m.kind) {
        case MoveKind::relocate:
        case MoveKind::or_opt: {
            if (!sol.serves(m.v) || !sol.serves(m.w)) return false;
            const int rs = sol.route_of(m.v);
            if (rs == sol.route_of(m.w)) return false;
            return sol.route(rs).length() == m.seg_len;
        }
        case MoveKind::two_opt_star: {
            if (m.variant != 1) return false;
            if (!sol.serves(m.v) || !sol.serves(m.w)) return false;
            const int rv = sol.route_of(m.v);
            return sol.position_of(m.v) == sol.route(rv).length() - 1 &&
                   sol.position_of(m.w) == 0;
        }
        case MoveKind::exchange:
            return false;
    }
    return false;
}

struct PenaltyDelta {
    double d_dist = 0.0;
    double d_pen = 0.0;
};

/// Exact penalty/distance deltas via one-pass recomputation of the touched
/// routes. Valid on feasible and infeasible solutions alike.
inline std::optional<PenaltyDelta> evaluate_move_penalty(const Solution& sol,
                                                         const Instance& inst, const Move& m) {
    int r1, r2;
    std::vector<int> ids1, ids2;
    if (!move_detail::materialize(sol, m, r1, ids1, r2, ids2)) return std::nullopt;
    PenaltyDelta out;
    const auto& a = sol.route(r1);
    auto s1 = move_detail::eval_seq(inst, ids1);
    out.d_dist += s1.dist - a.distance;
    out.d_pen += move_detail::seq_pen(inst, s1) - a.penalty(inst);
    if (r2 >= 0) {
        const auto& b = sol.route(r2);
        auto s2 = move_detail::eval_seq(inst, ids2);
        out.d_dist += s2.dist - b.distance;
        out.d_pen += move_detail::seq_pen(inst, s2) - b.penalty(inst);
    }
    return out;
}

namespace move_detail {

// O(1) insertion-side check of a segment (given by iterators over ids in
// final orientation) between positions `at-1` and `at` of a feasible route.
template <typename It>
inline bool segment_fits(const Route& route, int at, It first, It last, double seg_load,
                         const Instance& inst) {
    if (!route.time_feasible()) return false;
    if (route.load + seg_load > inst.capacity + kTimeTol) return false;
    const int prev = at > 0 ? route.ids[at - 1] : 0;
    double depart = at > 0 ? route.earliest[at - 1] + inst.service(prev) : inst.tw_open(0);
    int from = prev;
    for (It it = first; it != last; ++it) {
        const double start = std::max(depart + inst.dist(from, *it), inst.tw_open(*it));
        if (!time_leq(start, inst.tw_close(*it))) return false;
        depart = start + inst.service(*it);
        from = *it;
    }
    const int next = at < route.length() ? route.ids[at] : 0;
    const double limit = at < route.length() ? route.latest[at] : inst.tw_close(0);
    return time_leq(depart + inst.dist(from, next), limit);
}

inline double segment_internal_dist(const Instance& inst, const std::vector<int>& ids, int from,
                                    int len) {
    double d = 0.0;
    for (int i = 1; i < len; ++i) d += inst.dist(ids[from + i - 1], ids[from + i]);
    return d;
}

}  // namespace move_detail

/// Distance delta of a feasibility-preserving move, or nullopt when the
/// move would violate a constraint. Inter-route relocate/or-opt, exchange
/// and 2-opt* run in constant time off the cached slack arrays; intra-route
/// shapes fall back to a one-pass recomputation.
inline std::optional<double> evaluate_move_feasible(const Solution& sol, const Instance& inst,
                                                    const Move& m) {
    if (m.v == m.w || !sol.serves(m.v) || !sol.serves(m.w)) return std::nullopt;
    const int rv = sol.route_of(m.v);
    const int rw = sol.route_of(m.w);

    auto simulate = [&]() -> std::optional<double> {
        auto d = evaluate_move_penalty(sol, inst, m);
        if (!d) return std::nullopt;
        if (d->d_pen > 0.0) return std::nullopt;  // feasible stays feasible at 0
        return d->d_dist;
    };

    switch (m.kind) {
        case MoveKind::relocate:
        case MoveKind::or_opt: {
            if (rv == rw) return simulate();
            const auto& src = sol.route(rv);
            const auto& dst = sol.route(rw);
            const int ps = sol.position_of(m.v);
            const int len = m.seg_len;
            if (ps + len > src.length()) return std::nullopt;
            if (!src.time_feasible() || !dst.time_feasible()) return simulate();
            double seg_load = 0.0;
            for (int i = 0; i < len; ++i) seg_load += inst.demand(src.ids[ps + i]);
            const int at = sol.position_of(m.w) + (m.before ? 0 : 1);
            bool fits;
            if (m.reversed) {
                fits = move_detail::segment_fits(dst, at, src.ids.rbegin() + (src.length() - ps - len),
                                                 src.ids.rbegin() + (src.length() - ps), seg_load, inst);
            } else {
                fits = move_detail::segment_fits(dst, at, src.ids.begin() + ps,
                                                 src.ids.begin() + ps + len, seg_load, inst);
            }
            if (!fits) return std::nullopt;
            const int sp = ps > 0 ? src.ids[ps - 1] : 0;
            const int sn = ps + len < src.length() ? src.ids[ps + len] : 0;
            const int head = src.ids[ps], tail = src.ids[ps + len - 1];
            const double internal = move_detail::segment_internal_dist(inst, src.ids, ps, len);
            const double d_remove =
                inst.dist(sp, sn) - inst.dist(sp, head) - internal - inst.dist(tail, sn);
            const int dp = at > 0 ? dst.ids[at - 1] : 0;
            const int dn = at < dst.length() ? dst.ids[at] : 0;
            const int ihead = m.reversed ? tail : head;
            const int itail = m.reversed ? head : tail;
            const double d_insert =
                inst.dist(dp, ihead) + internal + inst.dist(itail, dn) - inst.dist(dp, dn);
            return d_remove + d_insert;
        }
        case MoveKind::exchange: {
            if (rv == rw) return simulate();
            const auto& a = sol.route(rv);
            const auto& b = sol.route(rw);
            if (!a.time_feasible() || !b.time_feasible()) return simulate();
            const int pv = sol.position_of(m.v);
            const int pw = sol.position_of(m.w);
            auto replace_ok = [&](const Route& r, int pos, int out, int in) {
                if (r.load - inst.demand(out) + inst.demand(in) > inst.capacity + kTimeTol) {
                    return false;
                }
                const int prev = pos > 0 ? r.ids[pos - 1] : 0;
                const double depart =
                    pos > 0 ? r.earliest[pos - 1] + inst.service(prev) : inst.tw_open(0);
                const double start = std::max(depart + inst.dist(prev, in), inst.tw_open(in));
                if (!time_leq(start, inst.tw_close(in))) return false;
                const int next = pos + 1 < r.length() ? r.ids[pos + 1] : 0;
                const double limit = pos + 1 < r.length() ? r.latest[pos + 1] : inst.tw_close(0);
                return time_leq(start + inst.service(in) + inst.dist(in, next), limit);
            };
            if (!replace_ok(a, pv, m.v, m.w) || !replace_ok(b, pw, m.w, m.v)) {
                return std::nullopt;
            }
            auto swap_delta = [&](const Route& r, int pos, int out, int in) {
                const int prev = pos > 0 ? r.ids[pos - 1] : 0;
                const int next = pos + 1 < r.length() ? r.ids[pos + 1] : 0;
                return inst.dist(prev, in) + inst.dist(in, next) - inst.dist(prev, out) -
                       inst.dist(out, next);
            };
            return swap_delta(a, pv, m.v, m.w) + swap_delta(b, pw, m.w, m.v);
        }
        case MoveKind::two_opt_star: {
            if (rv == rw) return std::nullopt;
            const auto& a = sol.route(rv);
            const auto& b = sol.route(rw);
            if (!a.time_feasible() || !b.time_feasible()) return simulate();
            const int i = sol.position_of(m.v);
            const int j = sol.position_of(m.w);
            const double depart_v = a.earliest[i] + inst.service(m.v);
            auto tail_ok = [&](const Route& r, int first_tail, double arrive_from,
                               int from) {
                if (first_tail < r.length()) {
                    return time_leq(arrive_from + inst.dist(from, r.ids[first_tail]),
                                    r.latest[first_tail]);
                }
                return time_leq(arrive_from + inst.dist(from, 0), inst.tw_close(0));
            };
            if (m.variant == 0) {
                if (i == a.length() - 1 && j == b.length() - 1) return std::nullopt;
                const double depart_w = b.earliest[j] + inst.service(m.w);
                const double load_a = a.load_prefix[i] + (b.load - b.load_prefix[j]);
                const double load_b = b.load_prefix[j] + (a.load - a.load_prefix[i]);
                if (load_a > inst.capacity + kTimeTol || load_b > inst.capacity + kTimeTol) {
                    return std::nullopt;
                }
                if (!tail_ok(b, j + 1, depart_v, m.v)) return std::nullopt;
                if (!tail_ok(a, i + 1, depart_w, m.w)) return std::nullopt;
                const int na = i + 1 < a.length() ? a.ids[i + 1] : 0;
                const int nb = j + 1 < b.length() ? b.ids[j + 1] : 0;
                return inst.dist(m.v, nb) + inst.dist(m.w, na) - inst.dist(m.v, na) -
                       inst.dist(m.w, nb);
            }
            // variant 1: route(v) continues with w..end, prefix of w takes v's tail
            const double load_a = a.load_prefix[i] + (b.load - (j > 0 ? b.load_prefix[j - 1] : 0.0));
            const double load_b = (j > 0 ? b.load_prefix[j - 1] : 0.0) + (a.load - a.load_prefix[i]);
            if (load_a > inst.capacity + kTimeTol || load_b > inst.capacity + kTimeTol) {
                return std::nullopt;
            }
            if (!time_leq(depart_v + inst.dist(m.v, m.w), b.latest[j])) return std::nullopt;
            const double depart_py =
                j > 0 ? b.earliest[j - 1] + inst.service(b.ids[j - 1]) : inst.tw_open(0);
            const int py = j > 0 ? b.ids[j - 1] : 0;
            if (!tail_ok(a, i + 1, depart_py, py)) return std::nullopt;
            const int na = i + 1 < a.length() ? a.ids[i + 1] : 0;
            return inst.dist(m.v, m.w) + inst.dist(py, na) - inst.dist(m.v, na) -
                   inst.dist(py, m.w);
        }
    }
    return std::nullopt;
}

struct MoveUndo {
    int r1 = -1, r2 = -1;
    std::vector<int> ids1, ids2;
    std::uint64_t version_before = 0;
};

/// Applies a move. The move must carry the solution's current version;
/// anything else is a stale-move contract violation.
inline MoveUndo apply_move(Solution& sol, const Instance& inst, const Move& m) {
    if (m.version != sol.version()) {
        throw std::logic_error("apply_move: move was generated against another solution version");
    }
    int r1, r2;
    std::vector<int> ids1, ids2;
    if (!move_detail::materialize(sol, m, r1, ids1, r2, ids2)) {
        throw std::logic_error("apply_move: move is structurally invalid");
    }
    MoveUndo undo;
    undo.r1 = r1;
    undo.ids1 = sol.route(r1).ids;
    undo.version_before = sol.version();
    if (r2 >= 0) {
        undo.r2 = r2;
        undo.ids2 = sol.route(r2).ids;
    }
    if (r2 >= 0) {
        sol.set_two_route_ids(inst, r1, std::move(ids1), r2, std::move(ids2));
    } else {
        sol.set_route_ids(inst, r1, std::move(ids1));
    }
    return undo;
}

inline void revert_move(Solution& sol, const Instance& inst, const MoveUndo& undo) {
    if (undo.r2 >= 0) {
        sol.set_two_route_ids(inst, undo.r1, undo.ids1, undo.r2, undo.ids2);
    } else {
        sol.set_route_ids(inst, undo.r1, undo.ids1);
    }
    sol.restore_version(undo.version_before);
}

namespace move_detail {

/// Emits every structural candidate pairing focus customer v with anchor w.
/// `long_or_opt` switches to the linear-time escalation kit (unbounded
/// segment lengths) instead of the constant-time one.
template <typename Fn>
inline bool for_each_candidate(const Solution& sol, int v, int w, std::uint64_t version,
                               bool long_or_opt, Fn&& fn) {
    const int rv = sol.route_of(v);
    const int lv = sol.route(rv).length();
    const int pv = sol.position_of(v);
    int len_lo = 1, len_hi = 3;
    if (long_or_opt) {
        len_lo = 4;
        len_hi = lv - pv;
    }
    for (int len = len_lo; len <= std::min(len_hi, lv - pv); ++len) {
        for (int before = 0; before < 2; ++before) {
            const int rev_hi = len >= 2 ? 2 : 1;
            for (int rev = 0; rev < rev_hi; ++rev) {
                Move m;
                m.kind = len == 1 ? MoveKind::relocate : MoveKind::or_opt;
                m.v = v;
                m.w = w;
                m.seg_len = len;
                m.before = before != 0;
                m.reversed = rev != 0;
                m.version = version;
                if (!fn(m)) return false;
            }
        }
    }
    if (long_or_opt) return true;
    for (int before = 0; before < 2; ++before) {
        Move m;
        m.kind = MoveKind::relocate;
        m.v = w;
        m.w = v;
        m.before = before != 0;
        m.version = version;
        if (!fn(m)) return false;
    }
    {
        Move m;
        m.kind = MoveKind::exchange;
        m.v = v;
        m.w = w;
        m.version = version;
        if (!fn(m)) return false;
    }
    if (rv != sol.route_of(w)) {
        for (int variant = 0; variant < 2; ++variant) {
            Move m;
            m.kind = MoveKind::two_opt_star;
            m.v = v;
            m.w = w;
            m.variant = variant;
            m.version = version;
            if (!fn(m)) return false;
        }
    }
    return true;
}

}  // namespace move_detail

/// Streams evaluated moves touching the scope. In feasible mode only
/// constraint-preserving moves are emitted, with their distance delta; with
/// allow_infeasible the deltas are on the penalty function instead and
/// every structurally valid candidate is emitted.
template <typename Fn>
inline void enumerate_moves(const Solution& sol, const Instance& inst, const Scope& scope,
                            bool allow_infeasible, Fn&& fn) {
    for (int v : scope.focus) {
        if (!sol.serves(v)) continue;
        for (int w : scope.nbrs->of(v)) {
            if (!sol.serves(w) || w == v) continue;
            bool keep_going = move_detail::for_each_candidate(
                sol, v, w, sol.version(), false, [&](Move m) {
                    if (allow_infeasible) {
                        auto d = evaluate_move_penalty(sol, inst, m);
                        if (!d) return true;
                        m.delta_distance = d->d_dist;
                        m.delta_penalty = d->d_pen;
                    } else {
                        auto d = evaluate_move_feasible(sol, inst, m);
                        if (!d) return true;
                        m.delta_distance = *d;
                        m.delta_penalty = 0.0;
                    }
                    return fn(m);
                });
            if (!keep_going) return;
        }
    }
}

struct PerturbResult {
    int applied = 0;
    int requested = 0;
};

/// Applies exactly n_moves random feasibility-preserving moves (drawn
/// uniformly from the sampled candidate space, feasibles kept by rejection).
/// Never changes the route count. Reports a shortfall when the attempt
/// budget runs out before n_moves feasible moves were found.
inline PerturbResult perturb(Solution& sol, const Instance& inst, const Neighborhoods& nbrs,
                             int n_moves, Rng& rng) {
    PerturbResult res;
    res.requested = n_moves;
    if (n_moves <= 0) return res;
    std::vector<int> served;
    for (int v = 1; v <= sol.customer_count(); ++v) {
        if (sol.serves(v)) served.push_back(v);
    }
    if (served.empty()) return res;
    long attempts = std::max(2000L, 60L * n_moves);
    while (res.applied < n_moves && attempts-- > 0) {
        const int v = served[rng.index(served.size())];
        const auto& cand = nbrs.of(v);
        if (cand.empty()) continue;
        const int w = cand[rng.index(cand.size())];
        if (!sol.serves(w) || w == v) continue;
        Move m;
        m.version = sol.version();
        m.v = v;
        m.w = w;
        switch (rng.uniform(4)) {
            case 0: m.kind = MoveKind::relocate; break;
            case 1: m.kind = MoveKind::exchange; break;
            case 2: m.kind = MoveKind::two_opt_star; m.variant = static_cast<int>(rng.uniform(2)); break;
            default:
                m.kind = MoveKind::or_opt;
                m.seg_len = 2 + static_cast<int>(rng.uniform(2));
                m.reversed = rng.chance(0.5);
                break;
        }
        if (m.kind == MoveKind::relocate || m.kind == MoveKind::or_opt) m.before = rng.chance(0.5);
        if (m.kind == MoveKind::two_opt_star && sol.route_of(v) == sol.route_of(w)) continue;
        if (move_empties_route(sol, m)) continue;
        auto d = evaluate_move_feasible(sol, inst, m);
        if (!d) continue;
        apply_move(sol, inst, m);
        ++res.applied;
    }
    return res;
}

/// Greedy first-improvement descent on total distance, restricted to the
/// scope. Scans focus customers in random order each pass; stops when a
/// full pass finds nothing or max_moves were applied. K never changes.
inline int local_search(Solution& sol, const Instance& inst, Scope scope, int max_moves,
                        Rng& rng) {
    int applied = 0;
    if (max_moves <= 0) return 0;
    bool improved = true;
    while (improved && applied < max_moves) {
        improved = false;
        rng.shuffle(scope.focus);
        for (int v : scope.focus) {
            if (applied >= max_moves) break;
            if (!sol.serves(v)) continue;
            bool moved = false;
            for (int w : scope.nbrs->of(v)) {
                if (!sol.serves(w) || w == v) continue;
                move_detail::for_each_candidate(
                    sol, v, w, sol.version(), false, [&](Move m) {
                        if (move_empties_route(sol, m)) return true;
                        auto d = evaluate_move_feasible(sol, inst, m);
                        if (!d || *d >= -kTimeTol) return true;
                        apply_move(sol, inst, m);
                        ++applied;
                        moved = true;
                        return false;  // first improvement: stop this pair
                    });
                if (moved) break;
            }
            improved |= moved;
        }
    }
    return applied;
}

struct DescentResult {
    bool feasible = false;
    int applied = 0;
};

struct DescentOptions {
    int max_moves = 1000;           // accepted-move budget
    int escalation_candidates = 500;  // linear-time kit evaluation cap
    std::vector<int>* touched_routes = nullptr;  // optional out-param
};

/// Penalty-function descent used by Squeeze and by crossover repair:
/// repeatedly applies moves with negative penalty delta around the
/// infeasible routes, constant-time kit first, escalating to unbounded
/// or-opt segments when the constant kit has nothing. Succeeds when the
/// solution penalty reaches zero.
inline DescentResult penalty_descent(Solution& sol, const Instance& inst,
                                     const Neighborhoods& nbrs, Rng& rng,
                                     const DescentOptions& opt = {}) {
    DescentResult res;
    std::vector<int> focus;
    while (res.applied < opt.max_moves) {
        if (sol.penalty(inst) <= kTimeTol) {
            res.feasible = true;
            return res;
        }
        focus.clear();
        for (int r = 0; r < sol.route_count(); ++r) {
            if (sol.route(r).penalty(inst) > kTimeTol) {
                for (int v : sol.route(r).ids) focus.push_back(v);
            }
        }
        rng.shuffle(focus);
        bool applied_one = false;
        for (int v : focus) {
            if (!sol.serves(v)) continue;
            Move best;
            double best_pen = -kTimeTol;
            double best_dist = 0.0;
            bool have = false;
            for (int w : nbrs.of(v)) {
                if (!sol.serves(w) || w == v) continue;
                move_detail::for_each_candidate(
                    sol, v, w, sol.version(), false, [&](Move m) {
                        if (move_empties_route(sol, m)) return true;
                        auto d = evaluate_move_penalty(sol, inst, m);
                        if (!d || d->d_pen >= -kTimeTol) return true;
                        if (!have || d->d_pen < best_pen - kTimeTol ||
                            (d->d_pen <= best_pen + kTimeTol && d->d_dist < best_dist)) {
                            best = m;
                            best_pen = d->d_pen;
                            best_dist = d->d_dist;
                            have = true;
                        }
                        return true;
                    });
            }
            if (have) {
                apply_move(sol, inst, best);
                if (opt.touched_routes) {
                    opt.touched_routes->push_back(sol.route_of(best.v));
                    opt.touched_routes->push_back(sol.route_of(best.w));
                }
                ++res.applied;
                applied_one = true;
                break;
            }
        }
        if (applied_one) continue;

        // Constant-time kit is stuck: consider linear-time moves, capped at
        // a fixed number of evaluated candidates.
        Move best;
        double best_pen = -kTimeTol;
        double best_dist = 0.0;
        bool have = false;
        int evaluated = 0;
        for (int v : focus) {
            if (evaluated >= opt.escalation_candidates) break;
            if (!sol.serves(v)) continue;
            for (int w : nbrs.of(v)) {
                if (evaluated >= opt.escalation_candidates) break;
                if (!sol.serves(w) || w == v) continue;
                move_detail::for_each_candidate(
                    sol, v, w, sol.version(), true, [&](Move m) {
                        if (move_empties_route(sol, m)) return true;
                        auto d = evaluate_move_penalty(sol, inst, m);
                        ++evaluated;
                        if (d && d->d_pen < -kTimeTol &&
                            (!have || d->d_pen < best_pen - kTimeTol ||
                             (d->d_pen <= best_pen + kTimeTol && d->d_dist < best_dist))) {
                            best = m;
                            best_pen = d->d_pen;
                            best_dist = d->d_dist;
                            have = true;
                        }
                        return evaluated < opt.escalation_candidates;
                    });
            }
        }
        if (!have) return res;  // no improving move at all
        apply_move(sol, inst, best);
        if (opt.touched_routes) {
            opt.touched_routes->push_back(sol.route_of(best.v));
            opt.touched_routes->push_back(sol.route_of(best.w));
        }
        ++res.applied;
    }
    res.feasible = sol.penalty(inst) <= kTimeTol;
    return res;
}

}  // namespace vrptw
