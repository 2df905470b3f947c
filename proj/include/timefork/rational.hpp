// timefork — timestamp-forking attack simulator and analyzer
// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

#include "timefork/errors.hpp"

namespace timefork {

// Exact rational over 64-bit integers with 128-bit intermediates.
// Reward arithmetic only ever produces small denominators (halves/eighths
// from uncle distances, sixteenths from uncle inclusion, thirty-seconds from
// nephew units, powers of ten from fee rates), so int64 after reduction is
// ample for desk-scale runs; overflow past that throws rather than wrapping.
class Rational {
  public:
    constexpr Rational() : num_(0), den_(1) {}
    // NOLINTNEXTLINE(google-explicit-constructor): integers promote exactly
    constexpr Rational(std::int64_t n) : num_(n), den_(1) {}
    Rational(std::int64_t n, std::int64_t d) : num_(n), den_(d) { normalize_(); }

    // Parses a decimal literal ("2.1625", "-0.01", "7") into the exact
    // fraction it denotes.  This is how fee rates enter the system: parsing
    // the text keeps 0.01 equal to 1/100 instead of the nearest double.
    static Rational from_decimal(const std::string& text) {
        if (text.empty()) throw Error(ErrorCode::InvalidInput, "empty decimal literal");
        std::size_t pos = 0;
        bool negative = false;
        if (text[pos] == '+' || text[pos] == '-') {
            negative = text[pos] == '-';
            ++pos;
        }
        std::int64_t num = 0;
        std::int64_t den = 1;
        bool any_digit = false;
        bool seen_point = false;
        for (; pos < text.size(); ++pos) {
            char c = text[pos];
            if (c == '.') {
                if (seen_point) throw Error(ErrorCode::InvalidInput, "bad decimal literal: " + text);
                seen_point = true;
                continue;
            }
            if (c < '0' || c > '9')
                throw Error(ErrorCode::InvalidInput, "bad decimal literal: " + text);
            any_digit = true;
            num = checked_(static_cast<__int128>(num) * 10 + (c - '0'));
            if (seen_point) den = checked_(static_cast<__int128>(den) * 10);
        }
        if (!any_digit) throw Error(ErrorCode::InvalidInput, "bad decimal literal: " + text);
        return Rational(negative ? -num : num, den);
    }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }
    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    std::string str() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return make_(static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_,
                     static_cast<__int128>(a.den_) * b.den_);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return make_(static_cast<__int128>(a.num_) * b.den_ - static_cast<__int128>(b.num_) * a.den_,
                     static_cast<__int128>(a.den_) * b.den_);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return make_(static_cast<__int128>(a.num_) * b.num_,
                     static_cast<__int128>(a.den_) * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw Error(ErrorCode::InvalidInput, "rational division by zero");
        return make_(static_cast<__int128>(a.num_) * b.den_,
                     static_cast<__int128>(a.den_) * b.num_);
    }
    Rational operator-() const { return Rational(-num_, den_); }
    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return static_cast<__int128>(a.num_) * b.den_ < static_cast<__int128>(b.num_) * a.den_;
    }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

  private:
    static std::int64_t checked_(__int128 v) {
        if (v > INT64_MAX || v < INT64_MIN)
            throw std::overflow_error("rational arithmetic overflow");
        return static_cast<std::int64_t>(v);
    }
    static Rational make_(__int128 n, __int128 d) {
        if (d == 0) throw Error(ErrorCode::InvalidInput, "rational with zero denominator");
        if (d < 0) { n = -n; d = -d; }
        __int128 a = n < 0 ? -n : n;
        __int128 b = d;
        while (b != 0) { __int128 t = a % b; a = b; b = t; }
        if (a == 0) a = 1;
        Rational r;
        r.num_ = checked_(n / a);
        r.den_ = checked_(d / a);
        return r;
    }
    void normalize_() { *this = make_(num_, den_); }

    std::int64_t num_;
    std::int64_t den_;
};

}  // namespace timefork
