#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hodn/numeric.hpp"

namespace hodn {

// Base-b digits of a fixed-point value y in [0, b^P): digit(i) for i = 1..P is
// the coefficient of b^-i.
inline int fixed_digit(int b, int precision, std::uint64_t y, int i) {
    std::uint64_t bb = std::uint64_t(b);
    for (int k = 0; k < precision - i; ++k) y /= bb;
    return int(y % bb);
}

inline std::vector<int> fixed_digits(int b, int precision, std::uint64_t y) {
    std::vector<int> d(std::size_t(precision), 0);
    for (int i = precision; i >= 1; --i) {
        d[std::size_t(i - 1)] = int(y % std::uint64_t(b));
        y /= std::uint64_t(b);
    }
    return d;
}

inline std::uint64_t from_fixed_digits(int b, const std::vector<int>& d) {
    std::uint64_t y = 0;
    for (int v : d) y = y * std::uint64_t(b) + std::uint64_t(v);
    return y;
}

// Integer digits k = sum_a kappa_a b^a, a = 0, 1, ...
inline std::vector<int> integer_digits(int b, std::uint64_t k) {
    std::vector<int> d;
    while (k) {
        d.push_back(int(k % std::uint64_t(b)));
        k /= std::uint64_t(b);
    }
    return d;
}

// Digit-wise addition modulo b (the b-adic xor); subtract when sign < 0.
inline std::uint64_t digitwise_add(int b, std::uint64_t a, std::uint64_t c, int sign = 1) {
    if (b == 2) return a ^ c;
    std::uint64_t bb = std::uint64_t(b), r = 0, place = 1;
    while (a || c) {
        int da = int(a % bb), dc = int(c % bb);
        int s = ((da + sign * dc) % b + b) % b;
        r += std::uint64_t(s) * place;
        a /= bb;
        c /= bb;
        place *= bb;
    }
    return r;
}

inline std::uint64_t digitwise_scale(int b, std::uint64_t a, int k) {
    std::uint64_t bb = std::uint64_t(b), r = 0, place = 1;
    while (a) {
        r += std::uint64_t(int(a % bb) * k % b) * place;
        a /= bb;
        place *= bb;
    }
    return r;
}

inline std::uint64_t require_power(int b, int e) {
    std::uint64_t v = checked_power(std::uint64_t(b), e);
    if (v == 0) throw std::invalid_argument("b^" + std::to_string(e) + " does not fit in 64 bits");
    return v;
}

}  // namespace hodn
