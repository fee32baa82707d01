#pragma once

#include <cstdint>

#include "treeramsey/rational.hpp"

namespace treeramsey {

// Counter-based generator: every output is a pure function of
// (seed, stream, counter), so draws keyed by sample index are identical
// no matter how samples are distributed across workers.

namespace detail {
inline std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebull;
    x ^= x >> 31;
    return x;
}
}  // namespace detail

class KeyedRng {
public:
    KeyedRng(std::uint64_t seed, std::uint64_t stream)
        : key_(detail::mix64(seed + 0x9e3779b97f4a7c15ull) ^
               detail::mix64(stream * 0xbf58476d1ce4e5b9ull + 0x94d049bb133111ebull)) {}

    std::uint64_t next() { return detail::mix64(key_ + (++counter_) * 0x9e3779b97f4a7c15ull); }

    /// Unbiased uniform draw from [0, bound) by rejection.
    std::uint64_t below(std::uint64_t bound) {
        if (bound <= 1) return 0;
        std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            std::uint64_t v = next();
            if (v >= threshold) return v % bound;
        }
    }

    /// Bernoulli with exact rational probability.
    bool bernoulli(std::uint64_t num, std::uint64_t den) {
        if (num >= den) return true;
        return below(den) < num;
    }

    bool bernoulli(const Rational& p) {
        // probabilities in [0,1] with moderate denominators; anything else
        // is a caller bug
        auto num = numerator(p).convert_to<std::uint64_t>();
        auto den = denominator(p).convert_to<std::uint64_t>();
        return bernoulli(num, den);
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace treeramsey
