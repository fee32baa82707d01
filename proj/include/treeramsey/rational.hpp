#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace treeramsey {

// All densities, probabilities and measures in this library are exact
// big rationals; floating point only ever appears in Monte-Carlo standard
// errors and human-readable output.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline BigInt pow_int(std::uint64_t base, std::uint64_t exp) {
    BigInt r = 1;
    BigInt b = base;
    while (exp > 0) {
        if (exp & 1) r *= b;
        b *= b;
        exp >>= 1;
    }
    return r;
}

/// k^-e as an exact rational.
inline Rational inv_pow(std::uint64_t base, std::uint64_t exp) {
    return Rational(BigInt(1), pow_int(base, exp));
}

/// Canonical "num/den" rendering (always includes the denominator).
inline std::string rational_to_string(const Rational& q) {
    return numerator(q).str() + "/" + denominator(q).str();
}

/// Accepts "num/den" or a bare integer.
inline Rational parse_rational(const std::string& text) {
    auto slash = text.find('/');
    try {
        if (slash == std::string::npos) return Rational(BigInt(text));
        BigInt num(text.substr(0, slash));
        BigInt den(text.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator");
        return Rational(num, den);
    } catch (const std::exception&) {
        throw std::invalid_argument("malformed rational: '" + text + "'");
    }
}

inline double rational_to_double(const Rational& q) {
    return q.convert_to<double>();
}

}  // namespace treeramsey
