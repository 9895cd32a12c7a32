#pragma once

// Exact dyadic rationals num / 2^L with arbitrary-precision numerators.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

#include "wavesat/error.hpp"

namespace wavesat {

using BigInt = boost::multiprecision::cpp_int;

class DyadicRational {
public:
    DyadicRational() = default;
    DyadicRational(BigInt numerator, std::int64_t exponent) : num_(std::move(numerator)), exp_(exponent) {
        if (exp_ < 0) {
            num_ <<= static_cast<unsigned>(-exp_);
            exp_ = 0;
        }
        canonicalize();
    }
    DyadicRational(long long integer) : num_(integer), exp_(0) {}  // NOLINT(google-explicit-constructor)

    /// Exact value of a finite double.
    static DyadicRational from_double(double v) {
        if (!std::isfinite(v)) throw ParseError("cannot represent a non-finite value as a dyadic rational");
        if (v == 0.0) return {};
        int e = 0;
        const double m = std::frexp(v, &e);  // v = m 2^e, 0.5 <= |m| < 1
        const auto mant = static_cast<std::int64_t>(std::ldexp(m, 53));
        return DyadicRational(BigInt(mant), 53 - static_cast<std::int64_t>(e));
    }

    /// Parses "NUM", "NUM/2^L" or "NUM/D" with D a power of two.
    static DyadicRational parse(std::string_view text) {
        auto fail = [&]() { return ParseError("not a dyadic rational: '" + std::string(text) + "'"); };
        const auto slash = text.find('/');
        const std::string_view num_part = text.substr(0, slash);
        if (num_part.empty()) throw fail();
        BigInt num;
        try {
            num = BigInt(std::string(num_part));
        } catch (const std::exception&) {
            throw fail();
        }
        if (slash == std::string_view::npos) return DyadicRational(num, 0);
        std::string_view den = text.substr(slash + 1);
        if (den.size() > 2 && den.substr(0, 2) == "2^") {
            den.remove_prefix(2);
            if (den.empty() || den.find_first_not_of("0123456789") != std::string_view::npos) throw fail();
            return DyadicRational(num, std::stoll(std::string(den)));
        }
        if (den.empty() || den.find_first_not_of("0123456789") != std::string_view::npos) throw fail();
        BigInt d(std::string{den});
        if (d <= 0 || (d & (d - 1)) != 0) throw fail();
        return DyadicRational(num, static_cast<std::int64_t>(boost::multiprecision::msb(d)));
    }

    const BigInt& numerator() const { return num_; }
    std::int64_t exponent() const { return exp_; }
    bool is_zero() const { return num_ == 0; }
    bool is_integer() const { return exp_ == 0; }

    double to_double() const {
        if (num_ == 0) return 0.0;
        const auto bits = static_cast<std::int64_t>(boost::multiprecision::msb(abs(num_)));
        if (bits <= 60) return std::ldexp(static_cast<double>(num_), static_cast<int>(-clamp_exp(exp_)));
        const auto drop = static_cast<unsigned>(bits - 60);
        const double top = (num_ < 0 ? -1.0 : 1.0) * static_cast<double>(BigInt(abs(num_)) >> drop);
        return std::ldexp(top, static_cast<int>(clamp_exp(static_cast<std::int64_t>(drop) - exp_)));
    }

    std::string str() const {
        if (exp_ == 0) return num_.str();
        return num_.str() + "/2^" + std::to_string(exp_);
    }

    /// value * 2^j, exact.
    DyadicRational times_pow2(std::int64_t j) const { return DyadicRational(num_, exp_ - j); }

    /// Representative of value mod K in [0, K).
    DyadicRational reduce_mod(int K) const {
        if (K <= 0) throw SupportMismatch("modulus must be positive");
        const BigInt M = BigInt(K) << static_cast<unsigned>(exp_);
        BigInt r = num_ % M;
        if (r < 0) r += M;
        return DyadicRational(std::move(r), exp_);
    }

    friend DyadicRational operator+(const DyadicRational& a, const DyadicRational& b) {
        const std::int64_t e = std::max(a.exp_, b.exp_);
        return DyadicRational((a.num_ << static_cast<unsigned>(e - a.exp_)) + (b.num_ << static_cast<unsigned>(e - b.exp_)),
                              e);
    }
    friend DyadicRational operator-(const DyadicRational& a) { return DyadicRational(-a.num_, a.exp_); }
    friend DyadicRational operator-(const DyadicRational& a, const DyadicRational& b) { return a + (-b); }

    friend bool operator==(const DyadicRational& a, const DyadicRational& b) {
        return a.exp_ == b.exp_ && a.num_ == b.num_;
    }
    friend bool operator<(const DyadicRational& a, const DyadicRational& b) {
        const std::int64_t e = std::max(a.exp_, b.exp_);
        return (a.num_ << static_cast<unsigned>(e - a.exp_)) < (b.num_ << static_cast<unsigned>(e - b.exp_));
    }

private:
    static std::int64_t clamp_exp(std::int64_t e) { return std::clamp<std::int64_t>(e, -100000, 100000); }

    // numerator odd or zero whenever exponent > 0; zero has exponent 0
    void canonicalize() {
        if (num_ == 0) {
            exp_ = 0;
            return;
        }
        if (exp_ == 0) return;
        const auto tz = static_cast<std::int64_t>(boost::multiprecision::lsb(abs(num_)));
        const std::int64_t s = std::min(tz, exp_);
        if (s > 0) {
            num_ >>= static_cast<unsigned>(s);
            exp_ -= s;
        }
    }

    BigInt num_ = 0;
    std::int64_t exp_ = 0;
};

}  // namespace wavesat
