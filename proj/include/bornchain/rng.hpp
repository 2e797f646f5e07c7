#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace bornchain {

/// Identifies a per-trial random stream: every (master_seed, trial_index)
/// pair yields an independent, reproducible stream.
struct SeedSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t trial_index = 0;
};

/// Provenance identifier recorded in every summary. The generator is
/// mt19937_64 exactly as specified by the C++ standard (so the raw stream is
/// identical on every conforming platform); per-trial seeds come from the
/// splitmix64 finalizer applied to master_seed + GAMMA * (trial_index + 1).
inline constexpr const char* kPrngId = "mt19937_64/splitmix64-stream-v1";

/// splitmix64 seed derivation. For master_seed m and trial_index i this is
/// the (i+1)-th output of a splitmix64 generator seeded with m, e.g.
/// derive_stream_seed({0, 0}) == 16294208416658607535.
std::uint64_t derive_stream_seed(SeedSpec spec) noexcept;

/// Deterministic per-trial random stream. Uniform doubles are produced
/// directly from the top 53 bits of the raw 64-bit output; the standard
/// library's distribution adapters are avoided because their outputs are not
/// pinned across implementations.
class Rng {
public:
    explicit Rng(SeedSpec spec) : gen_(derive_stream_seed(spec)) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1) with 53 random mantissa bits.
    double next_u01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 gen_;
};

/// Inverse-transform draw of an index from an explicit probability vector.
/// `u` must lie in [0, 1). Never selects a zero-probability entry: rounding
/// at the top of the cumulative sum falls back to the last positive entry.
int draw_index(const std::vector<double>& p, double u);

}  // namespace bornchain
