#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

namespace aperiodica {

// Exact rational arithmetic. Endpoint and measure computations run on these;
// doubles appear only in sampling loops and reported estimates.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

// Every finite double is a dyadic rational; the conversion is exact.
inline Rational rational_from_double(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("rational_from_double: non-finite value");
    if (x == 0.0) return Rational(0);
    int e = 0;
    double m = std::frexp(x, &e);            // x = m * 2^e, |m| in [0.5, 1)
    auto im = static_cast<long long>(std::ldexp(m, 53));
    e -= 53;
    Rational r(im);
    if (e >= 0) {
        r *= Rational(BigInt(1) << e);
    } else {
        r /= Rational(BigInt(1) << (-e));
    }
    return r;
}

// Accepts "p/q", integer literals, and plain decimal strings ("-0.125").
// Decimal strings parse exactly (digits over a power of ten), not via double.
inline Rational parse_rational(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("parse_rational: empty string");
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        BigInt num(s.substr(0, slash));
        BigInt den(s.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("parse_rational: zero denominator in '" + s + "'");
        return Rational(num, den);
    }
    auto dot = s.find('.');
    if (dot == std::string::npos) return Rational(BigInt(s));
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    std::size_t frac_len = s.size() - dot - 1;
    if (digits.empty() || digits == "-" || digits == "+")
        throw std::invalid_argument("parse_rational: malformed '" + s + "'");
    BigInt num(digits);
    BigInt den = 1;
    for (std::size_t i = 0; i < frac_len; ++i) den *= 10;
    return Rational(num, den);
}

inline std::string rational_to_string(const Rational& r) {
    BigInt num = numerator(r), den = denominator(r);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

// Minimal-denominator rational in the closed interval [lo, hi], 0 < lo <= hi
// (Stern-Brocot descent).
inline Rational simplest_in_interval(const Rational& lo, const Rational& hi) {
    BigInt a = numerator(lo) / denominator(lo);  // floor; bounds are positive
    Rational ia(a);
    Rational ceil_lo = (lo == ia) ? lo : Rational(a + 1);
    if (ceil_lo <= hi) return ceil_lo;
    // same integer part on both sides: recurse on the reciprocal remainders
    Rational sub = simplest_in_interval(Rational(1) / (hi - ia), Rational(1) / (lo - ia));
    return ia + Rational(1) / sub;
}

// Simplest rational within relative 1e-9 below a positive double. Tolerance
// inputs like 0.1 come back as 1/10 rather than the raw dyadic, and the
// result never exceeds the double, so "<= eps" statements stay safe.
inline Rational snap_tolerance(double x) {
    if (!(x > 0)) throw std::invalid_argument("snap_tolerance: positive value required");
    Rational hi = rational_from_double(x);
    return simplest_in_interval(hi - hi / 1000000000, hi);
}

}  // namespace aperiodica
