#include "bornchain/state.hpp"

#include <sstream>

#include "bornchain/errors.hpp"

namespace bornchain {

IntensityState IntensityState::of(std::vector<std::int64_t> intensities) {
    if (intensities.empty()) {
        throw config_error("intensity vector must not be empty");
    }
    std::int64_t sum = 0;
    for (std::int64_t v : intensities) {
        if (v < 0) {
            throw config_error("intensity entries must be nonnegative");
        }
        sum += v;
        if (sum > kMaxIntensityTotal) {
            throw config_error("intensity total exceeds the supported maximum (2^31)");
        }
    }
    if (sum == 0) {
        throw config_error("intensity total must be positive");
    }
    IntensityState state;
    state.a = std::move(intensities);
    state.total = sum;
    return state;
}

int IntensityState::pure_index() const {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == total) return static_cast<int>(i);
    }
    return -1;
}

bool IntensityState::is_valid() const {
    if (a.empty() || total <= 0 || total > kMaxIntensityTotal) return false;
    std::int64_t sum = 0;
    for (std::int64_t v : a) {
        if (v < 0 || v > total) return false;
        sum += v;
    }
    return sum == total;
}

std::string IntensityState::to_string() const {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (i > 0) os << ',';
        os << a[i];
    }
    os << ")/" << total;
    return os.str();
}

}  // namespace bornchain
