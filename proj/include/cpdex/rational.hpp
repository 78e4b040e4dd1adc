#pragma once

#include <boost/rational.hpp>
#include <cstdint>
#include <stdexcept>

namespace cpdex {

// Exact arithmetic for tabulated coefficients and their integral moments.
// Numerators and denominators stay small (worst case ~1e6 after common
// denominators), so 64-bit components are ample.
using Rational = boost::rational<long long>;

inline double to_double(const Rational& r) {
    return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

inline Rational rational_pow(Rational base, int exp) {
    if (exp < 0) {
        if (base == Rational(0)) throw std::domain_error("rational_pow: 0 to negative power");
        return rational_pow(Rational(base.denominator(), base.numerator()), -exp);
    }
    Rational out(1);
    while (exp > 0) {
        if (exp & 1) out *= base;
        base *= base;
        exp >>= 1;
    }
    return out;
}

inline Rational factorial_rational(int n) {
    if (n < 0) throw std::domain_error("factorial_rational: negative argument");
    Rational out(1);
    for (int k = 2; k <= n; ++k) out *= Rational(k);
    return out;
}

}  // namespace cpdex
