#pragma once

#include <compare>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace coalview {

/// Exact rational number over 64-bit integers, always kept in lowest terms
/// with a positive denominator. Arithmetic is carried out in 128-bit
/// intermediates and throws std::overflow_error when the reduced result no
/// longer fits.
class Rational {
public:
    constexpr Rational() = default;
    constexpr Rational(std::int64_t value) : num_(value) {}  // NOLINT(implicit)
    Rational(std::int64_t num, std::int64_t den) { assign(num, den); }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    bool is_integer() const { return den_ == 1; }
    int sign() const { return (num_ > 0) - (num_ < 0); }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    Rational operator-() const { return from_wide(-static_cast<__int128>(num_), den_); }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return from_wide(static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_,
                         static_cast<__int128>(a.den_) * b.den_);
    }
    friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return from_wide(static_cast<__int128>(a.num_) * b.num_, static_cast<__int128>(a.den_) * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw std::domain_error("rational division by zero");
        return from_wide(static_cast<__int128>(a.num_) * b.den_, static_cast<__int128>(a.den_) * b.num_);
    }

    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    friend bool operator==(const Rational& a, const Rational& b) = default;
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        const __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
        const __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
        if (lhs < rhs) return std::strong_ordering::less;
        if (lhs > rhs) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

    /// "p" or "p/q".
    std::string str() const {
        return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
    }

    /// Shortest exact decimal when the denominator is of the form 2^a 5^b,
    /// otherwise falls back to "p/q".
    std::string decimal_str() const {
        std::int64_t d = den_;
        int twos = 0, fives = 0;
        while (d % 2 == 0) { d /= 2; ++twos; }
        while (d % 5 == 0) { d /= 5; ++fives; }
        if (d != 1) return str();
        int digits = twos + fives;
        if (digits == 0) return std::to_string(num_);
        __int128 scaled = static_cast<__int128>(num_);
        for (int i = 0; i < twos; ++i) scaled *= 5;
        for (int i = 0; i < fives; ++i) scaled *= 2;
        while (digits > 0 && scaled % 10 == 0) { scaled /= 10; --digits; }
        if (digits == 0) return std::to_string(static_cast<std::int64_t>(scaled));
        // scaled / 10^digits
        const bool neg = scaled < 0;
        if (neg) scaled = -scaled;
        std::string digits_str;
        if (scaled == 0) digits_str = "0";
        while (scaled > 0) {
            digits_str.insert(digits_str.begin(), static_cast<char>('0' + static_cast<int>(scaled % 10)));
            scaled /= 10;
        }
        while (static_cast<int>(digits_str.size()) <= digits) digits_str.insert(digits_str.begin(), '0');
        std::string out = digits_str.substr(0, digits_str.size() - digits) + "." +
                          digits_str.substr(digits_str.size() - digits);
        return neg ? "-" + out : out;
    }

    /// Parses "12", "-3", "0.125", "1e-3", "2.5E2" or "7/3" exactly.
    static Rational parse(std::string_view text);

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

private:
    void assign(std::int64_t num, std::int64_t den) {
        if (den == 0) throw std::domain_error("rational with zero denominator");
        *this = from_wide(num, den);
    }

    static Rational from_wide(__int128 num, __int128 den) {
        if (den < 0) { num = -num; den = -den; }
        __int128 a = num < 0 ? -num : num, b = den;
        while (b != 0) { const __int128 t = a % b; a = b; b = t; }
        if (a > 1) { num /= a; den /= a; }
        constexpr __int128 lim = static_cast<__int128>(INT64_MAX);
        if (num > lim || num < -lim || den > lim) throw std::overflow_error("rational overflow");
        Rational r;
        r.num_ = static_cast<std::int64_t>(num);
        r.den_ = static_cast<std::int64_t>(den);
        return r;
    }

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

inline Rational Rational::parse(std::string_view text) {
    auto fail = [&] { throw std::invalid_argument("not a number: '" + std::string(text) + "'"); };
    if (text.empty()) fail();
    if (const auto slash = text.find('/'); slash != std::string_view::npos) {
        const Rational n = parse(text.substr(0, slash));
        const Rational d = parse(text.substr(slash + 1));
        if (!n.is_integer() || !d.is_integer() || d.num_ == 0) fail();
        return Rational(n.num_, d.num_);
    }
    std::size_t i = 0;
    bool neg = false;
    if (text[i] == '+' || text[i] == '-') { neg = text[i] == '-'; ++i; }
    __int128 mant = 0;
    int scale = 0;
    bool any = false, dot = false;
    for (; i < text.size(); ++i) {
        const char c = text[i];
        if (c >= '0' && c <= '9') {
            mant = mant * 10 + (c - '0');
            if (mant > static_cast<__int128>(INT64_MAX)) throw std::overflow_error("number too long");
            if (dot) ++scale;
            any = true;
        } else if (c == '.' && !dot) {
            dot = true;
        } else {
            break;
        }
    }
    if (!any) fail();
    int exponent = 0;
    if (i < text.size()) {
        if (text[i] != 'e' && text[i] != 'E') fail();
        ++i;
        bool eneg = false;
        if (i < text.size() && (text[i] == '+' || text[i] == '-')) { eneg = text[i] == '-'; ++i; }
        if (i >= text.size()) fail();
        for (; i < text.size(); ++i) {
            if (text[i] < '0' || text[i] > '9') fail();
            exponent = exponent * 10 + (text[i] - '0');
            if (exponent > 30) throw std::overflow_error("exponent too large");
        }
        if (eneg) exponent = -exponent;
    }
    Rational r = Rational(static_cast<std::int64_t>(neg ? -mant : mant));
    const int pow10 = exponent - scale;
    Rational ten_pow = 1;
    for (int k = 0; k < std::abs(pow10); ++k) ten_pow *= 10;
    return pow10 >= 0 ? r * ten_pow : r / ten_pow;
}

inline Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }
inline Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

}  // namespace coalview
