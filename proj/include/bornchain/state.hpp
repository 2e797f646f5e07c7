#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace bornchain {

/// Largest supported intensity total. Intensities are 64-bit integers but the
/// conserved total is capped so products of two intensities stay in range.
inline constexpr std::int64_t kMaxIntensityTotal = std::int64_t{1} << 31;

/// Discretized intensity configuration: M nonnegative integer intensities
/// a_1..a_M whose sum is the conserved total N. One unit is an intensity
/// quantum of 1/N, so a/N recovers the physical (normalized) intensity.
struct IntensityState {
    std::vector<std::int64_t> a;
    std::int64_t total = 0;

    /// Validating constructor: entries must be nonnegative, the vector
    /// nonempty, and the sum positive and at most kMaxIntensityTotal.
    /// Throws config_error otherwise.
    static IntensityState of(std::vector<std::int64_t> intensities);

    std::size_t components() const { return a.size(); }

    /// Index of the component holding the full intensity, or -1 if mixed.
    int pure_index() const;
    bool is_pure() const { return pure_index() >= 0; }

    /// True when the invariants hold (used by tests and debug checks).
    bool is_valid() const;

    std::string to_string() const;

    friend bool operator==(const IntensityState&, const IntensityState&) = default;
};

}  // namespace bornchain
