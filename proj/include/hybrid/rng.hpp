#pragma once
// Counter-based RNG substreams. A stream is keyed by (master seed, scenario
// index, replicate index); draws are a pure function of (key, counter), so a
// simulation's output is independent of how replicates are scheduled across
// threads.

#include <cstdint>

#include "hybrid/numerics.hpp"

namespace hybrid {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_key(std::uint64_t a, std::uint64_t b) {
    return splitmix64(a ^ (0x9e3779b97f4a7c15ULL + (b << 6) + (b >> 2) + splitmix64(b)));
}

class Substream {
public:
    Substream(std::uint64_t master_seed, std::uint64_t scenario_idx, std::uint64_t rep_idx)
        : key_(mix_key(mix_key(master_seed, scenario_idx), rep_idx)) {}

    explicit Substream(std::uint64_t key) : key_(key) {}

    std::uint64_t next_u64() { return splitmix64(key_ ^ (0xd1342543de82ef95ULL * ++counter_)); }

    // Uniform on the open interval (0, 1); never returns an endpoint.
    double next_unit() {
        const std::uint64_t bits = next_u64() >> 11;  // 53 random bits
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via the inverse CDF: deterministic and platform-stable
    // for a given stream, unlike rejection samplers.
    double next_normal() { return normal_quantile(next_unit()); }

    // Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace hybrid
