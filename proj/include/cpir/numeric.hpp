#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "cpir/error.hpp"

namespace cpir {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Natural log of a positive arbitrary-precision integer, accurate to double precision.
inline double log_big(const BigInt& value) {
    if (value <= 0) throw DomainError("log of a non-positive integer");
    const std::size_t bits = boost::multiprecision::msb(value) + 1;
    if (bits <= 62) return std::log(value.convert_to<double>());
    const std::size_t shift = bits - 62;
    const BigInt top = value >> shift;
    return std::log(top.convert_to<double>()) + static_cast<double>(shift) * std::log(2.0);
}

inline double log_rational(const Rational& value) {
    if (value <= 0) throw DomainError("log of a non-positive rational");
    return log_big(boost::multiprecision::numerator(value)) -
           log_big(boost::multiprecision::denominator(value));
}

inline double to_double(const Rational& value) { return value.convert_to<double>(); }
inline double to_double(double value) { return value; }

/// "p/q", or "p" when the denominator is one.
inline std::string to_fraction_string(const Rational& value) {
    const BigInt den = boost::multiprecision::denominator(value);
    if (den == 1) return boost::multiprecision::numerator(value).str();
    return boost::multiprecision::numerator(value).str() + "/" + den.str();
}

inline Rational parse_rational(const std::string& text) {
    try {
        const auto slash = text.find('/');
        if (slash == std::string::npos) return Rational(BigInt(text));
        const BigInt num(text.substr(0, slash));
        const BigInt den(text.substr(slash + 1));
        if (den == 0) throw DomainError("zero denominator in '" + text + "'");
        return Rational(num, den);
    } catch (const DomainError&) {
        throw;
    } catch (const std::exception&) {
        throw DomainError("malformed rational '" + text + "'");
    }
}

inline Rational power(const Rational& base, unsigned exponent) {
    return Rational(boost::multiprecision::pow(boost::multiprecision::numerator(base), exponent),
                    boost::multiprecision::pow(boost::multiprecision::denominator(base), exponent));
}

inline BigInt factorial(unsigned n) {
    BigInt out = 1;
    for (unsigned i = 2; i <= n; ++i) out *= i;
    return out;
}

inline BigInt binomial(unsigned n, unsigned k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    BigInt out = 1;
    for (unsigned i = 1; i <= k; ++i) {
        out *= n - k + i;
        out /= i;
    }
    return out;
}

}  // namespace cpir
