#pragma once

#include <cstdint>
#include <numeric>
#include <ostream>
#include <string>

#include "cacheic/errors.hpp"

namespace cacheic {

// Exact rational with int64 numerator/denominator, normalized so that the
// denominator is positive and gcd(|num|, den) == 1.  Intermediate products go
// through __int128, which is ample for every quantity in this project (the
// largest live values are ~6e12 from the DoF formulas).
class Rational {
  public:
    constexpr Rational() : num_(0), den_(1) {}
    Rational(std::int64_t n) : num_(n), den_(1) {}
    Rational(std::int64_t n, std::int64_t d) {
        if (d == 0) throw domain_error("rational: zero denominator");
        normalize_from(n, d);
    }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return from128(i128(a.num_) * b.den_ + i128(b.num_) * a.den_,
                       i128(a.den_) * b.den_);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return from128(i128(a.num_) * b.den_ - i128(b.num_) * a.den_,
                       i128(a.den_) * b.den_);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return from128(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw domain_error("rational: division by zero");
        return from128(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
    }
    Rational operator-() const {
        Rational r;
        r.num_ = -num_;
        r.den_ = den_;
        return r;
    }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
    }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

    double to_double() const { return double(num_) / double(den_); }

    std::string str() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) {
        return os << r.str();
    }

  private:
    using i128 = __int128;

    static Rational from128(i128 n, i128 d) {
        if (d < 0) {
            n = -n;
            d = -d;
        }
        i128 g = gcd128(n < 0 ? -n : n, d);
        if (g > 1) {
            n /= g;
            d /= g;
        }
        constexpr i128 lim = INT64_MAX;
        if (n > lim || n < -lim || d > lim)
            throw internal_error("rational: overflow after reduction");
        Rational r;
        r.num_ = std::int64_t(n);
        r.den_ = std::int64_t(d);
        return r;
    }

    static i128 gcd128(i128 a, i128 b) {
        while (b != 0) {
            i128 t = a % b;
            a = b;
            b = t;
        }
        return a == 0 ? 1 : a;
    }

    void normalize_from(std::int64_t n, std::int64_t d) {
        *this = from128(i128(n), i128(d));
    }

    std::int64_t num_;
    std::int64_t den_;
};

// Parses "p/q" or "p" (optional sign, decimal digits).  Used by the CLI for
// --mu style flags.
inline Rational parse_rational(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rational(std::stoll(s));
        std::int64_t n = std::stoll(s.substr(0, slash));
        std::int64_t d = std::stoll(s.substr(slash + 1));
        return Rational(n, d);
    } catch (const domain_error&) {
        throw;
    } catch (const std::exception&) {
        throw domain_error("rational: cannot parse '" + s + "'");
    }
}

} // namespace cacheic
