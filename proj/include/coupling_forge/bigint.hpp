#pragma once

#include <cmath>
#include <stdexcept>

#include <boost/multiprecision/cpp_int.hpp>

namespace coupling_forge {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

inline BigInt factorial(unsigned n) {
    BigInt r = 1;
    for (unsigned i = 2; i <= n; ++i) r *= i;
    return r;
}

/// C(n, k) for big n and small k. C(n, 0) = 1 for any n; 0 when 0 <= n < k.
inline BigInt binomial(const BigInt& n, unsigned k) {
    if (k == 0) return 1;
    if (n < k) return 0;
    BigInt r = 1;
    // r stays integral at every step: after j factors it equals C(n-k+j, j).
    for (unsigned j = 1; j <= k; ++j) {
        r *= n - (k - j);
        r /= j;
    }
    return r;
}

inline BigInt ipow(BigInt base, unsigned e) {
    BigInt r = 1;
    while (e) {
        if (e & 1u) r *= base;
        base *= base;
        e >>= 1;
    }
    return r;
}

inline double to_double(const BigInt& v) { return v.convert_to<double>(); }

/// num/den as a double, computed through an exact rational.
inline double ratio_as_double(const BigInt& num, const BigInt& den) {
    if (den == 0) throw std::domain_error("ratio_as_double: zero denominator");
    return BigRat(num, den).convert_to<double>();
}

/// Natural log of a positive big integer, accurate to ~1 ulp even far
/// beyond double range.
inline double log_big(const BigInt& v) {
    if (v <= 0) throw std::domain_error("log_big: argument must be positive");
    const unsigned bits = boost::multiprecision::msb(v);
    if (bits <= 52) return std::log(v.convert_to<double>());
    const unsigned shift = bits - 52;
    const double mant = BigInt(v >> shift).convert_to<double>();
    return std::log(mant) + static_cast<double>(shift) * 0.6931471805599453094;
}

}  // namespace coupling_forge
