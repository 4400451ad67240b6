#pragma once

#include "padic/errors.hpp"

#include <compare>
#include <cstdint>
#include <numeric>
#include <string>

namespace padic {

/* Exact rational on 64-bit numerator/denominator, always normalized with
 * positive denominator.  Large enough for every exponent produced here;
 * overflow checks throw rather than wrap. */
struct Rational {
    long long num = 0;
    long long den = 1;

    Rational() = default;
    Rational(long long n) : num(n), den(1) {}
    Rational(long long n, long long d) : num(n), den(d) { normalize(); }

    void normalize() {
        if (den == 0) throw precondition_error("Rational: zero denominator");
        if (den < 0) { num = -num; den = -den; }
        long long g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
    }

    static Rational checked(__int128 n, __int128 d) {
        if (d < 0) { n = -n; d = -d; }
        // normalize in 128 bits, then range-check
        __int128 gg = gcd128(n, d);
        if (gg > 1) { n /= gg; d /= gg; }
        if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX)
            throw precondition_error("Rational: overflow");
        Rational r;
        r.num = (long long)n;
        r.den = (long long)d;
        return r;
    }

    static __int128 gcd128(__int128 a, __int128 b) {
        if (a < 0) a = -a;
        if (b < 0) b = -b;
        while (b) { __int128 t = a % b; a = b; b = t; }
        return a ? a : 1;
    }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return checked((__int128)a.num * b.den + (__int128)b.num * a.den,
                       (__int128)a.den * b.den);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return checked((__int128)a.num * b.den - (__int128)b.num * a.den,
                       (__int128)a.den * b.den);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return checked((__int128)a.num * b.num, (__int128)a.den * b.den);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num == 0) throw precondition_error("Rational: division by zero");
        return checked((__int128)a.num * b.den, (__int128)a.den * b.num);
    }
    Rational operator-() const { return Rational(-num, den); }
    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num == b.num && a.den == b.den;
    }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        __int128 l = (__int128)a.num * b.den, r = (__int128)b.num * a.den;
        if (l < r) return std::strong_ordering::less;
        if (l > r) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

    // floor as an integer; safe for the small exponents used here
    long long floor() const {
        long long q = num / den;
        if (num % den != 0 && num < 0) --q;
        return q;
    }
    bool is_integer() const { return den == 1; }

    std::string str() const {
        if (den == 1) return std::to_string(num);
        return std::to_string(num) + "/" + std::to_string(den);
    }
};

/* Size of an element measured on the q^{-t} scale: keeps the exact exponent t
 * (value q^{-t}) or the flag for an exact zero.  Comparisons are by value, so
 * bigger LogNorm means bigger absolute value and smaller exponent. */
struct LogNorm {
    bool finite = false;    // false <=> value 0
    Rational t{};           // meaningful iff finite

    static LogNorm zero() { return LogNorm{}; }
    static LogNorm one() { return from_exponent(Rational(0)); }
    static LogNorm from_exponent(const Rational& e) { return LogNorm{true, e}; }

    bool is_zero() const { return !finite; }
    const Rational& exponent() const {
        if (!finite) throw precondition_error("LogNorm: exponent of zero norm");
        return t;
    }

    friend LogNorm operator*(const LogNorm& a, const LogNorm& b) {
        if (!a.finite || !b.finite) return zero();
        return from_exponent(a.t + b.t);
    }
    friend LogNorm operator/(const LogNorm& a, const LogNorm& b) {
        if (!b.finite) throw precondition_error("LogNorm: division by zero norm");
        if (!a.finite) return zero();
        return from_exponent(a.t - b.t);
    }
    LogNorm pow(const Rational& e) const {
        if (!finite) return zero();
        return from_exponent(t * e);
    }

    friend bool operator==(const LogNorm& a, const LogNorm& b) {
        if (a.finite != b.finite) return false;
        return !a.finite || a.t == b.t;
    }
    // value order: 0 < q^{-t2} < q^{-t1} whenever t1 < t2
    friend bool operator<(const LogNorm& a, const LogNorm& b) {
        if (!a.finite) return b.finite;
        if (!b.finite) return false;
        return a.t > b.t;
    }
    friend bool operator<=(const LogNorm& a, const LogNorm& b) { return a < b || a == b; }
    friend bool operator>(const LogNorm& a, const LogNorm& b) { return b < a; }
    friend bool operator>=(const LogNorm& a, const LogNorm& b) { return b <= a; }

    friend LogNorm max(const LogNorm& a, const LogNorm& b) { return a < b ? b : a; }
    friend LogNorm min(const LogNorm& a, const LogNorm& b) { return a < b ? a : b; }

    std::string str() const { return finite ? ("q^-(" + t.str() + ")") : "0"; }
};

} // namespace padic
