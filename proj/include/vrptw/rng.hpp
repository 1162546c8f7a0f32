#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace vrptw {

// splitmix64: used to derive independent per-component seeds from one
// master seed. Distinct inputs give distinct, well-mixed outputs.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for component `slot` derived from `master`; extra salt values can
/// scope the stream further (e.g. generation index).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t slot,
                                 std::uint64_t salt = 0) {
    return splitmix64(splitmix64(master ^ 0x5851f42d4c957f2dULL) + slot * 0x14057b7ef767814fULL + salt);
}

// Thin wrapper around mt19937_64 with unbiased bounded draws, so results
// do not depend on the standard library's distribution implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed = 0x853c49e6748fea9bULL) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform integer in [0, n). n must be > 0. Rejection sampling keeps
    /// the draw exactly uniform.
    std::uint64_t uniform(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % n;
    }

    int uniform_int(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(uniform(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform(n)); }

    /// Uniform double in [0, 1).
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    bool chance(double p) { return uniform01() < p; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[index(i)]);
        }
    }

  private:
    std::mt19937_64 engine_;
};

}  // namespace vrptw
