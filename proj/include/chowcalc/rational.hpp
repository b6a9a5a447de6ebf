#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

#include "chowcalc/errors.hpp"

namespace chowcalc {
namespace gring {

// Exact rational coefficients. cpp_rational keeps values in lowest terms
// with a positive denominator, which is exactly the invariant we need.
using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Renders "p/q", or just "p" when the denominator is 1. No decimals ever.
inline std::string rational_to_string(const Rational& r) {
    if (denominator(r) == 1)
        return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

// Accepts "p" or "p/q" with optional leading '-'. Rejects everything else.
inline Rational parse_rational(const std::string& text) {
    const auto bad = [&]() -> input_error {
        return input_error("invalid rational literal: '" + text + "'");
    };
    if (text.empty())
        throw bad();
    const auto slash = text.find('/');
    const std::string num_part = text.substr(0, slash);
    const std::string den_part =
        slash == std::string::npos ? std::string("1") : text.substr(slash + 1);
    const auto is_int = [](const std::string& s) {
        if (s.empty())
            return false;
        std::size_t i = (s[0] == '-') ? 1 : 0;
        if (i >= s.size())
            return false;
        for (; i < s.size(); ++i)
            if (s[i] < '0' || s[i] > '9')
                return false;
        return true;
    };
    if (!is_int(num_part) || !is_int(den_part))
        throw bad();
    const Integer num(num_part);
    const Integer den(den_part);
    if (den == 0)
        throw bad();
    return Rational(num, den);
}

inline Rational binomial(long n, long k) {
    if (k < 0 || k > n)
        return Rational(0);
    Integer result(1);
    for (long i = 0; i < k; ++i) {
        result *= (n - i);
        result /= (i + 1);
    }
    return Rational(result);
}

} // namespace gring
} // namespace chowcalc
