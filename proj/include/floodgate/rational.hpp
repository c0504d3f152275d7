// Copyright (c) 2026 The Floodgate developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace floodgate {

/// Exact rational with int64 numerator and positive int64 denominator,
/// always stored in lowest terms. Comparisons cross-multiply in 128 bits,
/// so fee rates and coinage-per-byte priorities never round.
class Rational {
public:
    constexpr Rational() = default;
    constexpr Rational(std::int64_t n) : num_(n), den_(1) {} // NOLINT: implicit by design

    Rational(std::int64_t n, std::int64_t d) : num_(n), den_(d) {
        if (den_ == 0) throw std::invalid_argument("Rational: zero denominator");
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        reduce();
    }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }

    friend bool operator<(const Rational& a, const Rational& b) {
        using W = __int128;
        return static_cast<W>(a.num_) * b.den_ < static_cast<W>(b.num_) * a.den_;
    }

    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

    Rational operator+(const Rational& o) const {
        using W = __int128;
        W n = static_cast<W>(num_) * o.den_ + static_cast<W>(o.num_) * den_;
        W d = static_cast<W>(den_) * o.den_;
        return from_wide(n, d);
    }

    Rational operator-(const Rational& o) const {
        return *this + Rational(-o.num_, o.den_);
    }

    Rational operator*(const Rational& o) const {
        using W = __int128;
        return from_wide(static_cast<W>(num_) * o.num_,
                         static_cast<W>(den_) * o.den_);
    }

    Rational operator/(const Rational& o) const {
        if (o.num_ == 0) throw std::invalid_argument("Rational: divide by zero");
        using W = __int128;
        return from_wide(static_cast<W>(num_) * o.den_,
                         static_cast<W>(den_) * o.num_);
    }

    double to_double() const {
        return static_cast<double>(num_) / static_cast<double>(den_);
    }

    /// Renders "n" for integers and "n/d" otherwise; lossless.
    std::string str() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

private:
    static Rational from_wide(__int128 n, __int128 d) {
        if (d < 0) {
            n = -n;
            d = -d;
        }
        __int128 g = gcd_wide(n < 0 ? -n : n, d);
        if (g > 1) {
            n /= g;
            d /= g;
        }
        if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX)
            throw std::overflow_error("Rational: overflow");
        return Rational(static_cast<std::int64_t>(n), static_cast<std::int64_t>(d));
    }

    static __int128 gcd_wide(__int128 a, __int128 b) {
        while (b != 0) {
            __int128 t = a % b;
            a = b;
            b = t;
        }
        return a == 0 ? 1 : a;
    }

    void reduce() {
        std::int64_t a = num_ < 0 ? -num_ : num_;
        std::int64_t g = std::gcd(a, den_);
        if (g > 1) {
            num_ /= g;
            den_ /= g;
        }
    }

    std::int64_t num_{0};
    std::int64_t den_{1};
};

} // namespace floodgate
