#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace bornchain {

/// Invalid experiment input: malformed config, inadmissible weight rule,
/// or an intensity vector that cannot form a state.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

/// A request exceeded an enumeration or solver guard. Carries the size that
/// tripped the guard so callers can report it.
class guard_error : public std::runtime_error {
public:
    guard_error(const std::string& what, std::uint64_t size)
        : std::runtime_error(what), size_(size) {}

    std::uint64_t size() const noexcept { return size_; }

private:
    std::uint64_t size_ = 0;
};

}  // namespace bornchain
