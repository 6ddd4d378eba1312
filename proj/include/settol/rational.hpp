#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdlib>
#include <ostream>
#include <string>
#include <string_view>

#include "settol/errors.hpp"

namespace settol {

/// Arbitrary-precision rational, always normalized (lowest terms, positive
/// denominator) by the backend.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline std::string to_string(const Rational& q) {
    BigInt num = numerator(q);
    BigInt den = denominator(q);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

/// Parses "p", "-p", or "p/q" with integer p, q and q > 0 after sign
/// normalization. Anything else is a usage_error.
inline Rational parse_rational(std::string_view text) {
    auto fail = [&] { throw usage_error("not a rational: '" + std::string(text) + "'"); };
    if (text.empty()) fail();
    auto is_int = [](std::string_view s) {
        if (!s.empty() && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
        if (s.empty()) return false;
        for (char c : s)
            if (c < '0' || c > '9') return false;
        return true;
    };
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) {
        if (!is_int(text)) fail();
        return Rational(BigInt(std::string(text)));
    }
    const auto num = text.substr(0, slash);
    const auto den = text.substr(slash + 1);
    if (!is_int(num) || !is_int(den)) fail();
    BigInt n{std::string(num)};
    BigInt d{std::string(den)};
    if (d == 0) fail();
    if (d < 0) {
        n = -n;
        d = -d;
    }
    return Rational(n, d);
}

/// Renders q as a decimal approximation with the given number of fractional
/// digits, prefixed with '~' unless the value is exact at that precision.
/// Uses integer long division only.
inline std::string to_decimal_string(const Rational& q, unsigned digits) {
    BigInt num = numerator(q);
    BigInt den = denominator(q);
    const bool neg = num < 0;
    if (neg) num = -num;
    BigInt scale = 1;
    for (unsigned i = 0; i < digits; ++i) scale *= 10;
    BigInt scaled = num * scale;
    BigInt whole = scaled / den;
    const bool exact = (whole * den == scaled);
    std::string body = whole.str();
    if (digits > 0) {
        if (body.size() <= digits) body.insert(0, digits + 1 - body.size(), '0');
        body.insert(body.size() - digits, ".");
    }
    std::string out;
    if (!exact) out += '~';
    if (neg) out += '-';
    out += body;
    return out;
}

/// An exact rational extended with +infinity. Infinity absorbs addition and
/// dominates every finite value; the undefined differences (finite - inf,
/// inf - inf) throw instead of producing a value.
class ExtendedValue {
public:
    ExtendedValue() : finite_(true), value_(0) {}
    ExtendedValue(Rational value) : finite_(true), value_(std::move(value)) {}
    ExtendedValue(int value) : finite_(true), value_(value) {}

    static ExtendedValue infinity() {
        ExtendedValue v;
        v.finite_ = false;
        v.value_ = 0;
        return v;
    }

    bool is_finite() const { return finite_; }
    bool is_infinite() const { return !finite_; }

    const Rational& finite() const {
        if (!finite_) throw usage_error("extended value is infinite");
        return value_;
    }

    ExtendedValue operator+(const ExtendedValue& o) const {
        if (!finite_ || !o.finite_) return infinity();
        return ExtendedValue(Rational(value_ + o.value_));
    }

    ExtendedValue& operator+=(const ExtendedValue& o) {
        *this = *this + o;
        return *this;
    }

    ExtendedValue operator-(const ExtendedValue& o) const {
        if (o.is_infinite()) throw usage_error("cannot subtract infinity");
        if (!finite_) return infinity();
        return ExtendedValue(Rational(value_ - o.value_));
    }

    /// Multiplies by a nonnegative rational. factor * inf = inf for
    /// factor > 0; 0 * inf is rejected.
    ExtendedValue scaled(const Rational& factor) const {
        if (factor < 0) throw usage_error("scaling factor must be nonnegative");
        if (!finite_) {
            if (factor == 0) throw usage_error("cannot scale infinity by zero");
            return infinity();
        }
        return ExtendedValue(Rational(value_ * factor));
    }

    bool operator==(const ExtendedValue& o) const {
        if (finite_ != o.finite_) return false;
        return !finite_ || value_ == o.value_;
    }

    std::strong_ordering operator<=>(const ExtendedValue& o) const {
        if (!finite_ && !o.finite_) return std::strong_ordering::equal;
        if (!finite_) return std::strong_ordering::greater;
        if (!o.finite_) return std::strong_ordering::less;
        if (value_ < o.value_) return std::strong_ordering::less;
        if (value_ > o.value_) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

    /// "p/q" (or "p" for integers) for finite values, "inf" otherwise.
    std::string str() const { return finite_ ? to_string(value_) : "inf"; }

    static ExtendedValue parse(std::string_view text) {
        if (text == "inf") return infinity();
        return ExtendedValue(parse_rational(text));
    }

private:
    bool finite_;
    Rational value_;
};

inline const ExtendedValue& min(const ExtendedValue& a, const ExtendedValue& b) {
    return b < a ? b : a;
}

inline const ExtendedValue& max(const ExtendedValue& a, const ExtendedValue& b) {
    return a < b ? b : a;
}

inline std::ostream& operator<<(std::ostream& os, const ExtendedValue& v) {
    return os << v.str();
}

} // namespace settol
