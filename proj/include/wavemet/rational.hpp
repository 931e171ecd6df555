#pragma once

#include <cstdint>
#include <numeric>
#include <string>

#include "wavemet/errors.hpp"

namespace wavemet {

// Exact nonnegative rational. Sample rates and rate ratios must never pass
// through floating point; the interleave permutation rests on exact gcd
// arithmetic.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n, std::int64_t d = 1) : num(n), den(d) {
        if (den == 0) throw validation_error("Rational: zero denominator");
        if (num < 0 || den < 0) throw validation_error("Rational: negative component");
        reduce();
    }

    void reduce() {
        const std::int64_t g = std::gcd(num, den);
        if (g > 1) { num /= g; den /= g; }
        if (num == 0) den = 1;
    }

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }

    Rational inverse() const {
        if (num == 0) throw validation_error("Rational: inverse of zero");
        return Rational(den, num);
    }

    friend Rational operator*(const Rational& a, const Rational& b) {
        // cross-reduce first so intermediate products stay in range
        const std::int64_t g1 = std::gcd(a.num, b.den);
        const std::int64_t g2 = std::gcd(b.num, a.den);
        return Rational((a.num / g1) * (b.num / g2), (a.den / g2) * (b.den / g1));
    }
    friend Rational operator/(const Rational& a, const Rational& b) { return a * b.inverse(); }
    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num == b.num && a.den == b.den;
    }

    std::string str() const {
        return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
    }
};

// Parses "123" or "123/456". Anything float-like ("1e9", "2.5") is rejected:
// rates are exact by contract.
inline Rational parse_rational(const std::string& text) {
    if (text.empty()) throw validation_error("rational: empty string");
    for (char c : text) {
        if (!(c >= '0' && c <= '9') && c != '/')
            throw validation_error("rational: '" + text + "' is not an integer or num/den ratio");
    }
    const auto slash = text.find('/');
    try {
        if (slash == std::string::npos) return Rational(std::stoll(text), 1);
        if (slash == 0 || slash + 1 >= text.size() || text.find('/', slash + 1) != std::string::npos)
            throw validation_error("rational: malformed ratio '" + text + "'");
        return Rational(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
    } catch (const std::out_of_range&) {
        throw validation_error("rational: '" + text + "' out of 64-bit range");
    }
}

}  // namespace wavemet
