#include "bornchain/rng.hpp"

#include <cassert>

namespace bornchain {

namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

// splitmix64 output finalizer (Vigna).
constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t derive_stream_seed(SeedSpec spec) noexcept {
    return mix(spec.master_seed + kGamma * (spec.trial_index + 1));
}

int draw_index(const std::vector<double>& p, double u) {
    assert(!p.empty());
    assert(u >= 0.0 && u < 1.0);
    double cumulative = 0.0;
    int last_positive = -1;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0.0) continue;
        last_positive = static_cast<int>(i);
        cumulative += p[i];
        if (u < cumulative) return last_positive;
    }
    // u landed in the rounding gap between the accumulated sum and 1.
    assert(last_positive >= 0);
    return last_positive;
}

}  // namespace bornchain
