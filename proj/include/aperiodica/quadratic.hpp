#pragma once

#include "aperiodica/rational.hpp"

#include <cmath>
#include <stdexcept>

namespace aperiodica {

/**
 * Exact element a + b*sqrt(D) of a real quadratic field, D a positive
 * non-square integer. Comparisons are decided by sign analysis and squaring,
 * never through doubles, so window membership of irrational star values is
 * exact. Mixing elements of different fields is rejected except where one
 * side is rational (b == 0, D ignored).
 */
struct QuadExt {
    Rational a;
    Rational b;
    long long D = 0;  // 0 while the element is rational

    QuadExt() = default;
    QuadExt(Rational rational_part) : a(std::move(rational_part)) {}
    QuadExt(Rational ra, Rational rb, long long d) : a(std::move(ra)), b(std::move(rb)), D(d) {
        if (b == 0) D = 0;
    }

    bool is_rational() const { return b == 0; }

    double value() const {
        double v = to_double(a);
        if (b != 0) v += to_double(b) * std::sqrt(static_cast<double>(D));
        return v;
    }

    // sign of a + b*sqrt(D); exact
    int sign() const {
        int sa = a.sign(), sb = b.sign();
        if (sb == 0) return sa;
        if (sa == 0) return sb;
        if (sa == sb) return sa;
        // opposite signs: compare a^2 against b^2 * D
        Rational lhs = a * a, rhs = b * b * D;
        if (lhs == rhs) return 0;  // impossible for non-square D unless b == 0
        return (lhs > rhs) ? sa : sb;
    }

    QuadExt operator-() const { return QuadExt(-a, -b, D); }

    friend long long common_field(const QuadExt& x, const QuadExt& y) {
        if (x.D == 0) return y.D;
        if (y.D == 0 || x.D == y.D) return x.D;
        throw std::invalid_argument("QuadExt: mixed quadratic fields");
    }

    friend QuadExt operator+(const QuadExt& x, const QuadExt& y) {
        return QuadExt(x.a + y.a, x.b + y.b, common_field(x, y));
    }
    friend QuadExt operator-(const QuadExt& x, const QuadExt& y) {
        return QuadExt(x.a - y.a, x.b - y.b, common_field(x, y));
    }
    friend QuadExt operator*(const QuadExt& x, const QuadExt& y) {
        long long d = common_field(x, y);
        return QuadExt(x.a * y.a + x.b * y.b * d, x.a * y.b + x.b * y.a, d);
    }
    QuadExt operator*(const Rational& s) const { return QuadExt(a * s, b * s, D); }
    QuadExt operator/(const Rational& s) const {
        if (s == 0) throw std::invalid_argument("QuadExt: division by zero");
        return QuadExt(a / s, b / s, D);
    }

    friend bool operator==(const QuadExt& x, const QuadExt& y) { return (x - y).sign() == 0; }
    friend bool operator<(const QuadExt& x, const QuadExt& y) { return (x - y).sign() < 0; }
    friend bool operator<=(const QuadExt& x, const QuadExt& y) { return (x - y).sign() <= 0; }
    friend bool operator>(const QuadExt& x, const QuadExt& y) { return (x - y).sign() > 0; }
    friend bool operator>=(const QuadExt& x, const QuadExt& y) { return (x - y).sign() >= 0; }
};

}  // namespace aperiodica
