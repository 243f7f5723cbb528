#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace scoutrl {

// 64-bit FNV-1a, used to turn stream names into seed salt.
constexpr uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 1469598103934665603ull;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

constexpr uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d9b3fd49fbb6c5ull;
    return x ^ (x >> 31);
}

using Rng = std::mt19937_64;

// One master seed fans out into independent named streams so that
// subsystems (demand, observation, drift, policy, replay thinning) can be
// reseeded and paired independently across runs.
class RngStreams {
public:
    explicit RngStreams(uint64_t master_seed) : master_(master_seed) {}

    uint64_t master() const { return master_; }

    // Stream identified by name only (scenario creation, policy init, ...).
    Rng stream(std::string_view name) const {
        return Rng(splitmix64(master_ ^ fnv1a64(name)));
    }

    // Stream salted by an episode index; lets paired arms see identical
    // per-episode randomness regardless of how much the other arm consumed.
    Rng stream(std::string_view name, uint64_t episode) const {
        return Rng(splitmix64(splitmix64(master_ ^ fnv1a64(name)) + episode));
    }

private:
    uint64_t master_;
};

}  // namespace scoutrl
