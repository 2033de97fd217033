#pragma once

#include <climits>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hodn {

inline constexpr int minus_infinity_degree = INT_MIN;

bool is_prime(std::uint64_t n);
void require_prime_base(int b);
std::vector<std::uint64_t> prime_factors(std::uint64_t n);

// Polynomial over F_b, coefficients stored from the constant term upwards.
class GFPoly {
public:
    explicit GFPoly(int b = 2);
    GFPoly(int b, std::vector<int> coeffs);

    static GFPoly from_encoding(int b, std::uint64_t code);
    static GFPoly monomial(int b, int k, int c = 1);
    static GFPoly parse(int b, std::string_view text);

    int base() const { return b_; }
    int degree() const { return c_.empty() ? minus_infinity_degree : int(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    int coeff(int i) const { return (i >= 0 && i < int(c_.size())) ? c_[std::size_t(i)] : 0; }
    int lead() const { return c_.empty() ? 0 : c_.back(); }
    const std::vector<int>& coefficients() const { return c_; }

    std::uint64_t encoding() const;
    std::string to_string() const;

    friend bool operator==(const GFPoly& a, const GFPoly& c) { return a.b_ == c.b_ && a.c_ == c.c_; }
    friend GFPoly operator+(const GFPoly& a, const GFPoly& c);
    friend GFPoly operator-(const GFPoly& a, const GFPoly& c);
    friend GFPoly operator*(const GFPoly& a, const GFPoly& c);
    GFPoly scaled(int k) const;

private:
    void trim();
    int b_;
    std::vector<int> c_;
};

int inverse_mod(int a, int b);
std::pair<GFPoly, GFPoly> divmod(const GFPoly& a, const GFPoly& p);
GFPoly operator%(const GFPoly& a, const GFPoly& p);
GFPoly gcd(GFPoly a, GFPoly c);
GFPoly mulmod(const GFPoly& a, const GFPoly& c, const GFPoly& p);
GFPoly powmod(GFPoly a, std::uint64_t e, const GFPoly& p);

bool is_irreducible(const GFPoly& p);
GFPoly smallest_irreducible(int b, int m);
GFPoly primitive_element(const GFPoly& p);

// First m Laurent digits u_1..u_m of q/p.
std::vector<int> laurent_digits(const GFPoly& q, const GFPoly& p, int m);

// Truncation tr_m(k) of an integer k to a polynomial of degree < m.
GFPoly truncate_integer(int b, std::uint64_t k, int m);

// Residues modulo p kept as integer encodings; b=2 uses bit masks.
class Residues {
public:
    explicit Residues(const GFPoly& p);

    int base() const { return b_; }
    int m() const { return m_; }
    std::uint64_t size() const { return size_; }
    const GFPoly& modulus() const { return p_; }

    std::uint64_t reduce(std::uint64_t a) const;
    std::uint64_t mul(std::uint64_t a, std::uint64_t c) const;
    std::uint64_t pow(std::uint64_t a, std::uint64_t e) const;
    int degree(std::uint64_t a) const;
    // m-digit fixed-point value of the first m Laurent digits of a/p.
    std::uint64_t laurent_value(std::uint64_t a) const;

private:
    std::vector<int> digits(std::uint64_t a) const;
    std::uint64_t encode(const std::vector<int>& d) const;

    GFPoly p_;
    int b_;
    int m_;
    std::uint64_t size_;
    std::uint64_t pmask_;
    int lead_inv_;
};

}  // namespace hodn
