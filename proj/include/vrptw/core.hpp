#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace vrptw {

constexpr double kTimeTol = 1e-9;  // absolute tolerance on times/distances

inline bool time_leq(double a, double b) { return a <= b + kTimeTol; }

class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Immutable problem data. Index 0 is the depot, customers are 1..n.
/// Travel cost between vertices is the full double-precision Euclidean
/// distance; travel time equals distance.
class Instance {
  public:
    std::string name;
    int vehicle_hint = 0;  // header vehicle count, informational only
    double capacity = 0.0;

    Instance() = default;

    Instance(std::string instance_name, double cap,
             std::vector<double> xs, std::vector<double> ys,
             std::vector<double> demands, std::vector<double> ready,
             std::vector<double> due, std::vector<double> service_times)
        : name(std::move(instance_name)),
          capacity(cap),
          x_(std::move(xs)),
          y_(std::move(ys)),
          demand_(std::move(demands)),
          open_(std::move(ready)),
          close_(std::move(due)),
          service_(std::move(service_times)) {
        const std::size_t m = x_.size();
        if (m < 2 || y_.size() != m || demand_.size() != m || open_.size() != m ||
            close_.size() != m || service_.size() != m) {
            throw Error("instance: inconsistent or empty vertex arrays");
        }
        if (capacity <= 0.0) throw Error("instance: capacity must be positive");
        for (std::size_t i = 0; i < m; ++i) {
            if (open_[i] > close_[i]) {
                throw Error("instance: time window closes before it opens at vertex " +
                            std::to_string(i));
            }
            if (demand_[i] < 0.0) throw Error("instance: negative demand at vertex " + std::to_string(i));
            if (i > 0 && demand_[i] > capacity) {
                throw Error("instance: demand of customer " + std::to_string(i) +
                            " exceeds vehicle capacity");
            }
        }
        if (demand_[0] != 0.0) throw Error("instance: depot demand must be zero");
        n_ = static_cast<int>(m) - 1;
        total_demand_ = 0.0;
        for (int i = 1; i <= n_; ++i) total_demand_ += demand_[i];
        dist_.resize(m * m);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                const double dx = x_[i] - x_[j];
                const double dy = y_[i] - y_[j];
                dist_[i * m + j] = std::sqrt(dx * dx + dy * dy);
            }
        }
    }

    int size() const { return n_; }  // number of customers
    double x(int v) const { return x_[v]; }
    double y(int v) const { return y_[v]; }
    double demand(int v) const { return demand_[v]; }
    double tw_open(int v) const { return open_[v]; }
    double tw_close(int v) const { return close_[v]; }
    double service(int v) const { return service_[v]; }
    double total_demand() const { return total_demand_; }

    double dist(int i, int j) const {
        return dist_[static_cast<std::size_t>(i) * (n_ + 1) + j];
    }

  private:
    std::vector<double> x_, y_, demand_, open_, close_, service_;
    std::vector<double> dist_;
    double total_demand_ = 0.0;
    int n_ = 0;
};

/// Fleet size lower bound: ceil(total demand / capacity).
inline int k_min(const Instance& inst) {
    if (inst.total_demand() <= 0.0) return 0;
    return static_cast<int>(std::ceil(inst.total_demand() / inst.capacity - kTimeTol));
}

/// Solution cost, ordered lexicographically: fewer routes first, then
/// shorter total distance.
struct Cost {
    int k = 0;
    double t = 0.0;
};

inline int compare_cost(const Cost& a, const Cost& b) {
    if (a.k != b.k) return a.k < b.k ? -1 : 1;
    if (a.t != b.t) return a.t < b.t ? -1 : 1;
    return 0;
}

inline bool cost_less(const Cost& a, const Cost& b) { return compare_cost(a, b) < 0; }

}  // namespace vrptw
