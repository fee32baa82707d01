#pragma once

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace treeramsey {

/// Thrown when an enumeration would materialize more items than the
/// configured cap allows. Always explicit, never silent truncation.
class InstanceTooLarge : public std::runtime_error {
public:
    explicit InstanceTooLarge(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown by the text/JSON readers; carries a 1-based line number
/// (0 when the error is not tied to a specific line).
class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string& reason)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + reason : reason),
          line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

namespace detail {
inline std::atomic<std::uint64_t>& cap_storage() {
    static std::atomic<std::uint64_t> cap = [] {
        std::uint64_t v = std::uint64_t(1) << 26;
        if (const char* env = std::getenv("TREE_RAMSEY_CAP")) {
            char* end = nullptr;
            unsigned long long parsed = std::strtoull(env, &end, 10);
            if (end && *end == '\0' && parsed > 0) v = parsed;
        }
        return v;
    }();
    return cap;
}
}  // namespace detail

/// Global enumeration cap, default 2^26 items. TREE_RAMSEY_CAP overrides
/// it at startup; set_enumeration_cap overrides it programmatically.
inline std::uint64_t enumeration_cap() { return detail::cap_storage().load(); }

inline void set_enumeration_cap(std::uint64_t cap) {
    if (cap == 0) throw std::invalid_argument("enumeration cap must be positive");
    detail::cap_storage().store(cap);
}

/// base^exp, saturating at the cap sentinel instead of overflowing.
inline std::uint64_t checked_pow(std::uint64_t base, std::uint64_t exp, std::uint64_t limit) {
    std::uint64_t r = 1;
    for (std::uint64_t i = 0; i < exp; ++i) {
        if (base != 0 && r > limit / base) return limit + 1;
        r *= base;
        if (r > limit) return limit + 1;
    }
    return r;
}

inline void require_within_cap(std::uint64_t count, const std::string& what) {
    if (count > enumeration_cap())
        throw InstanceTooLarge(what + " exceeds enumeration cap (" +
                               std::to_string(enumeration_cap()) + " items)");
}

}  // namespace treeramsey
