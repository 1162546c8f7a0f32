#pragma once

#include <cctype>
#include <cmath>
#include <iomanip>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "vrptw/core.hpp"
#include "vrptw/solution.hpp"

namespace vrptw {

class ParseError : public Error {
  public:
    ParseError(int line, const std::string& msg)
        : Error("line " + std::to_string(line) + ": " + msg), line_(line) {}
    int line() const { return line_; }

  private:
    int line_;
};

namespace detail {

inline std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

inline bool parse_number(const std::string& tok, double& out) {
    try {
        std::size_t used = 0;
        out = std::stod(tok, &used);
        return used == tok.size();
    } catch (...) {
        return false;
    }
}

inline bool is_blank(const std::string& line) {
    for (char c : line) {
        if (!std::isspace(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

}  // namespace detail

/// Parses a Solomon / Gehring-Homberger instance file:
/// name, VEHICLE block (NUMBER CAPACITY), CUSTOMER table with row 0 as
/// the depot. Whitespace-tolerant; column meanings are fixed.
inline Instance parse_instance(std::istream& in) {
    std::string name;
    int vehicle_hint = 0;
    double capacity = -1.0;
    bool in_customers = false;
    std::vector<double> xs, ys, demands, ready, due, service;
    std::vector<int> row_ids;

    std::string line;
    int lineno = 0;
    int pending_vehicle_row = 0;  // >0 after seeing the VEHICLE header
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::is_blank(line)) continue;
        auto toks = detail::tokenize(line);
        if (name.empty()) {
            name = toks[0];
            continue;
        }
        if (toks[0] == "VEHICLE") {
            pending_vehicle_row = 1;
            continue;
        }
        if (pending_vehicle_row == 1 && toks[0] == "NUMBER") {
            pending_vehicle_row = 2;
            continue;
        }
        if (pending_vehicle_row == 2) {
            double num = 0.0, cap = 0.0;
            if (toks.size() < 2 || !detail::parse_number(toks[0], num) ||
                !detail::parse_number(toks[1], cap)) {
                throw ParseError(lineno, "expected \"<number> <capacity>\" after VEHICLE header");
            }
            vehicle_hint = static_cast<int>(num);
            capacity = cap;
            pending_vehicle_row = 0;
            continue;
        }
        if (toks[0] == "CUSTOMER") {
            in_customers = true;
            continue;
        }
        if (in_customers && toks[0] == "CUST") continue;  // column header row
        if (!in_customers) continue;                      // stray header text
        if (toks.size() < 7) throw ParseError(lineno, "customer row needs 7 columns");
        double vals[7];
        for (int c = 0; c < 7; ++c) {
            if (!detail::parse_number(toks[c], vals[c])) {
                throw ParseError(lineno, "non-numeric field \"" + toks[c] + "\"");
            }
        }
        const int id = static_cast<int>(vals[0]);
        if (vals[5] < vals[4]) {
            throw ParseError(lineno, "due date precedes ready time for customer " +
                                         std::to_string(id));
        }
        row_ids.push_back(id);
        xs.push_back(vals[1]);
        ys.push_back(vals[2]);
        demands.push_back(vals[3]);
        ready.push_back(vals[4]);
        due.push_back(vals[5]);
        service.push_back(vals[6]);
    }
    if (name.empty()) throw ParseError(lineno, "missing instance name");
    if (capacity <= 0.0) throw ParseError(lineno, "missing or invalid VEHICLE capacity block");
    if (row_ids.empty()) throw ParseError(lineno, "missing CUSTOMER table");
    // Row ids must be 0..N, dense and unique, depot first.
    std::vector<bool> seen(row_ids.size(), false);
    for (std::size_t i = 0; i < row_ids.size(); ++i) {
        const int id = row_ids[i];
        if (id < 0 || id >= static_cast<int>(row_ids.size()) || seen[id]) {
            throw ParseError(0, "customer ids must be unique and dense (bad id " +
                                    std::to_string(id) + ")");
        }
        if (id != static_cast<int>(i)) {
            throw ParseError(0, "customer rows must appear in id order starting at depot 0");
        }
        seen[id] = true;
    }
    try {
        Instance inst(name, capacity, std::move(xs), std::move(ys), std::move(demands),
                      std::move(ready), std::move(due), std::move(service));
        inst.vehicle_hint = vehicle_hint;
        return inst;
    } catch (const Error& e) {
        throw ParseError(0, e.what());
    }
}

inline Instance parse_instance(const std::string& text) {
    std::istringstream is(text);
    return parse_instance(is);
}

/// Route listing plus cost summary, as written/read by this tool.
struct SolutionDocument {
    std::string instance_name;
    std::vector<std::vector<int>> routes;
    int stated_vehicles = 0;
    double stated_distance = 0.0;
};

/// Serializes a complete, feasible solution. Refuses anything else,
/// carrying the violation report in the error message.
inline std::string write_solution(const Solution& sol, const Instance& inst) {
    if (sol.route_count() == 0) throw Error("write_solution: no routes to write");
    auto rep = is_feasible(sol, inst);
    if (!rep.feasible) {
        throw Error("write_solution: solution is not feasible:\n" + rep.to_string());
    }
    std::ostringstream os;
    os << "Instance: " << inst.name << '\n';
    for (int r = 0; r < sol.route_count(); ++r) {
        os << "Route " << (r + 1) << " :";
        for (int v : sol.route(r).ids) os << ' ' << v;
        os << '\n';
    }
    os << "Vehicles: " << sol.route_count() << '\n';
    os << "Distance: " << std::fixed << std::setprecision(2) << sol.total_distance() << '\n';
    return os.str();
}

inline SolutionDocument parse_solution(const std::string& text) {
    SolutionDocument doc;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (detail::is_blank(line)) continue;
        auto toks = detail::tokenize(line);
        if (toks[0] == "Instance:") {
            if (toks.size() > 1) doc.instance_name = toks[1];
        } else if (toks[0] == "Route") {
            std::size_t i = 1;
            while (i < toks.size() && toks[i] != ":") ++i;
            if (i == toks.size()) throw ParseError(lineno, "route line missing ':'");
            std::vector<int> ids;
            for (++i; i < toks.size(); ++i) {
                double v;
                if (!detail::parse_number(toks[i], v)) {
                    throw ParseError(lineno, "bad customer id \"" + toks[i] + "\"");
                }
                ids.push_back(static_cast<int>(v));
            }
            doc.routes.push_back(std::move(ids));
        } else if (toks[0] == "Vehicles:") {
            double v;
            if (toks.size() < 2 || !detail::parse_number(toks[1], v)) {
                throw ParseError(lineno, "bad vehicle count");
            }
            doc.stated_vehicles = static_cast<int>(v);
        } else if (toks[0] == "Distance:") {
            double v;
            if (toks.size() < 2 || !detail::parse_number(toks[1], v)) {
                throw ParseError(lineno, "bad distance");
            }
            doc.stated_distance = v;
        } else {
            throw ParseError(lineno, "unrecognized line \"" + toks[0] + "\"");
        }
    }
    return doc;
}

struct FileValidation {
    bool feasible = false;
    int recomputed_vehicles = 0;
    double recomputed_distance = 0.0;
    std::vector<std::string> problems;
};

/// Independent re-check of a solution file against the instance using only
/// naive arithmetic. Reports recomputed (K, T) and every violation found.
inline FileValidation validate_solution_file(const Instance& inst, const std::string& text) {
    FileValidation out;
    SolutionDocument doc;
    try {
        doc = parse_solution(text);
    } catch (const Error& e) {
        out.problems.push_back(e.what());
        return out;
    }
    const int n = inst.size();
    std::vector<int> seen(n + 1, 0);
    double total = 0.0;
    bool ok = true;
    for (std::size_t r = 0; r < doc.routes.size(); ++r) {
        double load = 0.0;
        double depart = inst.tw_open(0);
        int prev = 0;
        for (int v : doc.routes[r]) {
            if (v < 1 || v > n) {
                out.problems.push_back("route " + std::to_string(r + 1) +
                                       ": unknown customer id " + std::to_string(v));
                ok = false;
                continue;
            }
            seen[v]++;
            load += inst.demand(v);
            const double arrive = depart + inst.dist(prev, v);
            const double start = std::max(arrive, inst.tw_open(v));
            if (!time_leq(start, inst.tw_close(v))) {
                out.problems.push_back("route " + std::to_string(r + 1) + ": customer " +
                                       std::to_string(v) + " served after its due time");
                ok = false;
            }
            total += inst.dist(prev, v);
            depart = start + inst.service(v);
            prev = v;
        }
        total += inst.dist(prev, 0);
        if (load > inst.capacity + kTimeTol) {
            out.problems.push_back("route " + std::to_string(r + 1) + ": load " +
                                   std::to_string(load) + " exceeds capacity");
            ok = false;
        }
        if (!time_leq(depart + inst.dist(prev, 0), inst.tw_close(0))) {
            out.problems.push_back("route " + std::to_string(r + 1) +
                                   ": vehicle returns after the depot closes");
            ok = false;
        }
    }
    for (int v = 1; v <= n; ++v) {
        if (seen[v] == 0) {
            out.problems.push_back("customer " + std::to_string(v) + " is never served");
            ok = false;
        } else if (seen[v] > 1) {
            out.problems.push_back("customer " + std::to_string(v) + " is served " +
                                   std::to_string(seen[v]) + " times");
            ok = false;
        }
    }
    out.recomputed_vehicles = static_cast<int>(doc.routes.size());
    out.recomputed_distance = total;
    if (doc.stated_vehicles != 0 && doc.stated_vehicles != out.recomputed_vehicles) {
        out.problems.push_back("stated vehicle count disagrees with the route list");
        ok = false;
    }
    if (doc.stated_distance != 0.0 && std::abs(doc.stated_distance - total) > 0.01) {
        out.problems.push_back("stated distance disagrees with recomputation");
        ok = false;
    }
    out.feasible = ok;
    return out;
}

}  // namespace vrptw
