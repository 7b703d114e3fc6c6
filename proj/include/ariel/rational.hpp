#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <random>

namespace ariel {

// All interval and counting arithmetic is exact; doubles appear only at the
// final quantization step of the codec.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

inline Rational rational_pow2(int exponent) {
    if (exponent >= 0) return Rational(BigInt(1) << exponent);
    return Rational(1, BigInt(1) << -exponent);
}

// Doubles convert exactly: every finite double is a dyadic rational.
inline Rational rational_from_double(double v) { return Rational(v); }

// -log2 of a positive rational, accurate enough for reporting even when the
// value underflows a double.
inline double neg_log2(const Rational& q) {
    const BigInt num = boost::multiprecision::numerator(q);
    const BigInt den = boost::multiprecision::denominator(q);
    if (num == 0) return std::numeric_limits<double>::infinity();
    const long nb = static_cast<long>(boost::multiprecision::msb(num));
    const long db = static_cast<long>(boost::multiprecision::msb(den));
    // Scale num so that num2/den is comfortably within double range.
    const long shift = db - nb;
    BigInt num2 = shift >= 0 ? num << shift : num >> -shift;
    double ratio = Rational(num2, den).convert_to<double>();
    return static_cast<double>(shift) - std::log2(ratio);
}

// Uniform draw in [0, n) with rejection over 64-bit chunks; exact for
// arbitrarily large n.
inline BigInt uniform_below(std::mt19937_64& rng, const BigInt& n) {
    if (n <= 1) return BigInt(0);
    const unsigned bits = static_cast<unsigned>(boost::multiprecision::msb(n)) + 1;
    const unsigned chunks = (bits + 63) / 64;
    for (;;) {
        BigInt v = 0;
        for (unsigned i = 0; i < chunks; ++i) v = (v << 64) | BigInt(rng());
        v >>= (chunks * 64 - bits);
        if (v < n) return v;
    }
}

}  // namespace ariel
