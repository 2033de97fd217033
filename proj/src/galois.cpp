#include "hodn/galois.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "hodn/numeric.hpp"

namespace hodn {

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

void require_prime_base(int b) {
    if (b < 2 || b > 251 || !is_prime(std::uint64_t(b)))
        throw std::invalid_argument("base must be a prime below 256, got " + std::to_string(b));
}

std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            out.push_back(d);
            while (n % d == 0) n /= d;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

int inverse_mod(int a, int b) {
    a %= b;
    if (a < 0) a += b;
    if (a == 0) throw std::domain_error("zero has no inverse");
    for (int x = 1; x < b; ++x)
        if ((a * x) % b == 1) return x;
    throw std::domain_error("no inverse");
}

GFPoly::GFPoly(int b) : b_(b) { require_prime_base(b); }

GFPoly::GFPoly(int b, std::vector<int> coeffs) : b_(b), c_(std::move(coeffs)) {
    require_prime_base(b);
    for (auto& v : c_) {
        v %= b_;
        if (v < 0) v += b_;
    }
    trim();
}

void GFPoly::trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

GFPoly GFPoly::from_encoding(int b, std::uint64_t code) {
    require_prime_base(b);
    std::vector<int> c;
    while (code) {
        c.push_back(int(code % std::uint64_t(b)));
        code /= std::uint64_t(b);
    }
    return GFPoly(b, std::move(c));
}

GFPoly GFPoly::monomial(int b, int k, int c) {
    std::vector<int> v(std::size_t(k) + 1, 0);
    v[std::size_t(k)] = c;
    return GFPoly(b, std::move(v));
}

GFPoly GFPoly::parse(int b, std::string_view text) {
    std::string s;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
    if (s.empty()) throw std::invalid_argument("empty polynomial");
    if (std::all_of(s.begin(), s.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); }))
        return from_encoding(b, std::stoull(s));

    std::vector<int> coeffs;
    std::size_t i = 0;
    while (i < s.size()) {
        int sign = 1;
        if (s[i] == '+' || s[i] == '-') {
            sign = s[i] == '-' ? -1 : 1;
            ++i;
        }
        long long c = 1;
        bool have_c = false;
        std::size_t j = i;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
        if (j > i) {
            c = std::stoll(s.substr(i, j - i));
            have_c = true;
            i = j;
            if (i < s.size() && s[i] == '*') ++i;
        }
        int k = 0;
        if (i < s.size() && s[i] == 'x') {
            ++i;
            k = 1;
            if (i < s.size() && s[i] == '^') {
                ++i;
                j = i;
                while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
                if (j == i) throw std::invalid_argument("bad exponent in polynomial '" + std::string(text) + "'");
                k = std::stoi(s.substr(i, j - i));
                i = j;
            }
        } else if (!have_c) {
            throw std::invalid_argument("cannot parse polynomial '" + std::string(text) + "'");
        }
        if (i < s.size() && s[i] != '+' && s[i] != '-')
            throw std::invalid_argument("cannot parse polynomial '" + std::string(text) + "'");
        if (coeffs.size() <= std::size_t(k)) coeffs.resize(std::size_t(k) + 1, 0);
        long long v = (coeffs[std::size_t(k)] + sign * c) % b;
        coeffs[std::size_t(k)] = int(v < 0 ? v + b : v);
    }
    return GFPoly(b, std::move(coeffs));
}

std::uint64_t GFPoly::encoding() const {
    std::uint64_t code = 0;
    for (std::size_t i = c_.size(); i-- > 0;) {
        if (code > (UINT64_MAX - std::uint64_t(c_[i])) / std::uint64_t(b_))
            throw std::overflow_error("polynomial encoding does not fit in 64 bits");
        code = code * std::uint64_t(b_) + std::uint64_t(c_[i]);
    }
    return code;
}

std::string GFPoly::to_string() const {
    if (c_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = c_.size(); i-- > 0;) {
        int c = c_[i];
        if (c == 0) continue;
        if (!first) os << " + ";
        first = false;
        if (i == 0) {
            os << c;
            continue;
        }
        if (c != 1) os << c;
        os << "x";
        if (i > 1) os << "^" << i;
    }
    return os.str();
}

namespace {

void same_base(const GFPoly& a, const GFPoly& c) {
    if (a.base() != c.base()) throw std::invalid_argument("polynomials over different fields");
}

}  // namespace

GFPoly operator+(const GFPoly& a, const GFPoly& c) {
    same_base(a, c);
    std::vector<int> r(std::max(a.c_.size(), c.c_.size()), 0);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = (a.coeff(int(i)) + c.coeff(int(i))) % a.b_;
    return GFPoly(a.b_, std::move(r));
}

GFPoly operator-(const GFPoly& a, const GFPoly& c) {
    same_base(a, c);
    std::vector<int> r(std::max(a.c_.size(), c.c_.size()), 0);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = (a.coeff(int(i)) - c.coeff(int(i)) + a.b_) % a.b_;
    return GFPoly(a.b_, std::move(r));
}

GFPoly operator*(const GFPoly& a, const GFPoly& c) {
    same_base(a, c);
    if (a.is_zero() || c.is_zero()) return GFPoly(a.b_);
    std::vector<int> r(a.c_.size() + c.c_.size() - 1, 0);
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
        if (a.c_[i] == 0) continue;
        for (std::size_t j = 0; j < c.c_.size(); ++j) r[i + j] = (r[i + j] + a.c_[i] * c.c_[j]) % a.b_;
    }
    return GFPoly(a.b_, std::move(r));
}

GFPoly GFPoly::scaled(int k) const {
    std::vector<int> r(c_);
    for (auto& v : r) v = int((long long)v * k % b_);
    return GFPoly(b_, std::move(r));
}

std::pair<GFPoly, GFPoly> divmod(const GFPoly& a, const GFPoly& p) {
    if (p.is_zero()) throw std::domain_error("division by the zero polynomial");
    same_base(a, p);
    int b = a.base();
    int dp = p.degree();
    std::vector<int> r = a.coefficients();
    if (int(r.size()) - 1 < dp) return {GFPoly(b), a};
    std::vector<int> q(r.size() - std::size_t(dp), 0);
    int inv = inverse_mod(p.lead(), b);
    for (int k = int(r.size()) - 1; k >= dp; --k) {
        int t = r[std::size_t(k)] * inv % b;
        if (t == 0) continue;
        q[std::size_t(k - dp)] = t;
        for (int i = 0; i <= dp; ++i) {
            auto& v = r[std::size_t(k - dp + i)];
            v = ((v - t * p.coeff(i)) % b + b) % b;
        }
    }
    r.resize(std::size_t(dp));
    return {GFPoly(b, std::move(q)), GFPoly(b, std::move(r))};
}

GFPoly operator%(const GFPoly& a, const GFPoly& p) { return divmod(a, p).second; }

GFPoly gcd(GFPoly a, GFPoly c) {
    while (!c.is_zero()) {
        GFPoly r = a % c;
        a = std::move(c);
        c = std::move(r);
    }
    if (a.is_zero()) return a;
    return a.scaled(inverse_mod(a.lead(), a.base()));
}

GFPoly mulmod(const GFPoly& a, const GFPoly& c, const GFPoly& p) { return (a * c) % p; }

GFPoly powmod(GFPoly a, std::uint64_t e, const GFPoly& p) {
    GFPoly r = GFPoly(a.base(), {1}) % p;
    a = a % p;
    while (e) {
        if (e & 1u) r = mulmod(r, a, p);
        a = mulmod(a, a, p);
        e >>= 1;
    }
    return r;
}

bool is_irreducible(const GFPoly& p) {
    int m = p.degree();
    if (m < 1) throw std::invalid_argument("irreducibility is defined for degree >= 1");
    int b = p.base();
    GFPoly x = GFPoly::monomial(b, 1) % p;
    // frob[k] = x^(b^k) mod p
    std::vector<GFPoly> frob{x};
    for (int k = 1; k <= m; ++k) frob.push_back(powmod(frob.back(), std::uint64_t(b), p));
    if (!(frob[std::size_t(m)] == x)) return false;
    for (auto l : prime_factors(std::uint64_t(m))) {
        GFPoly g = gcd(frob[std::size_t(m / int(l))] - x, p);
        if (g.degree() != 0) return false;
    }
    return true;
}

GFPoly smallest_irreducible(int b, int m) {
    require_prime_base(b);
    if (m < 1) throw std::invalid_argument("degree must be at least 1");
    std::uint64_t lo = checked_power(std::uint64_t(b), m);
    if (lo == 0) throw std::invalid_argument("degree too large");
    for (std::uint64_t c = 0; c < lo; ++c) {
        GFPoly p = GFPoly::from_encoding(b, lo + c);
        if (is_irreducible(p)) return p;
    }
    throw std::logic_error("no irreducible polynomial found");
}

GFPoly primitive_element(const GFPoly& p) {
    if (!is_irreducible(p)) throw std::invalid_argument("modulus " + p.to_string() + " is not irreducible");
    int b = p.base();
    Residues ring(p);
    std::uint64_t order = ring.size() - 1;
    auto factors = prime_factors(order);
    for (std::uint64_t g = 1; g < ring.size(); ++g) {
        bool ok = true;
        for (auto l : factors) {
            if (ring.pow(g, order / l) == 1) {
                ok = false;
                break;
            }
        }
        if (ok) return GFPoly::from_encoding(b, g);
    }
    throw std::logic_error("no primitive element found");
}

std::vector<int> laurent_digits(const GFPoly& q, const GFPoly& p, int m) {
    int b = p.base();
    int dp = p.degree();
    if (dp < 1) throw std::invalid_argument("modulus must have positive degree");
    std::vector<int> r = (q % p).coefficients();
    r.resize(std::size_t(dp) + 1, 0);
    int inv = inverse_mod(p.lead(), b);
    std::vector<int> out;
    out.reserve(std::size_t(std::max(m, 0)));
    for (int i = 0; i < m; ++i) {
        for (int k = dp; k > 0; --k) r[std::size_t(k)] = r[std::size_t(k - 1)];
        r[0] = 0;
        int t = r[std::size_t(dp)] * inv % b;
        out.push_back(t);
        if (t)
            for (int k = 0; k <= dp; ++k)
                r[std::size_t(k)] = ((r[std::size_t(k)] - t * p.coeff(k)) % b + b) % b;
    }
    return out;
}

GFPoly truncate_integer(int b, std::uint64_t k, int m) {
    std::vector<int> c;
    for (int i = 0; i < m && k; ++i) {
        c.push_back(int(k % std::uint64_t(b)));
        k /= std::uint64_t(b);
    }
    return GFPoly(b, std::move(c));
}

Residues::Residues(const GFPoly& p) : p_(p), b_(p.base()), m_(p.degree()) {
    if (m_ < 1) throw std::invalid_argument("modulus must have positive degree");
    size_ = checked_power(std::uint64_t(b_), m_);
    if (size_ == 0 || size_ > (std::uint64_t(1) << 62)) throw std::invalid_argument("modulus degree too large");
    pmask_ = b_ == 2 ? p_.encoding() : 0;
    lead_inv_ = inverse_mod(p_.lead(), b_);
}

std::vector<int> Residues::digits(std::uint64_t a) const {
    std::vector<int> d;
    while (a) {
        d.push_back(int(a % std::uint64_t(b_)));
        a /= std::uint64_t(b_);
    }
    return d;
}

std::uint64_t Residues::encode(const std::vector<int>& d) const {
    std::uint64_t code = 0;
    for (std::size_t i = d.size(); i-- > 0;) code = code * std::uint64_t(b_) + std::uint64_t(d[i]);
    return code;
}

std::uint64_t Residues::reduce(std::uint64_t a) const {
    if (b_ == 2) {
        for (int bit = 63; bit >= m_; --bit)
            if ((a >> bit) & 1u) a ^= pmask_ << (bit - m_);
        return a;
    }
    return (GFPoly::from_encoding(b_, a) % p_).encoding();
}

std::uint64_t Residues::mul(std::uint64_t a, std::uint64_t c) const {
    if (b_ == 2) {
        if (m_ <= 31) {
            std::uint64_t r = 0;
            while (c) {
                int i = __builtin_ctzll(c);
                r ^= a << i;
                c &= c - 1;
            }
            for (int bit = 2 * m_ - 2; bit >= m_; --bit)
                if ((r >> bit) & 1u) r ^= pmask_ << (bit - m_);
            return r;
        }
        // shift-and-add keeps intermediate values below 2^(m+1)
        std::uint64_t r = 0;
        for (int i = m_ - 1; i >= 0; --i) {
            r <<= 1;
            if ((r >> m_) & 1u) r ^= pmask_;
            if ((c >> i) & 1u) r ^= a;
        }
        return r;
    }
    std::vector<int> da = digits(a), dc = digits(c);
    if (da.empty() || dc.empty()) return 0;
    std::vector<int> r(da.size() + dc.size() - 1, 0);
    for (std::size_t i = 0; i < da.size(); ++i)
        for (std::size_t j = 0; j < dc.size(); ++j) r[i + j] = (r[i + j] + da[i] * dc[j]) % b_;
    for (int k = int(r.size()) - 1; k >= m_; --k) {
        int t = r[std::size_t(k)] * lead_inv_ % b_;
        if (!t) continue;
        for (int i = 0; i <= m_; ++i) {
            auto& v = r[std::size_t(k - m_ + i)];
            v = ((v - t * p_.coeff(i)) % b_ + b_) % b_;
        }
    }
    r.resize(std::min<std::size_t>(r.size(), std::size_t(m_)));
    return encode(r);
}

std::uint64_t Residues::pow(std::uint64_t a, std::uint64_t e) const {
    std::uint64_t r = reduce(1);
    a = reduce(a);
    while (e) {
        if (e & 1u) r = mul(r, a);
        a = mul(a, a);
        e >>= 1;
    }
    return r;
}

int Residues::degree(std::uint64_t a) const {
    if (a == 0) return minus_infinity_degree;
    if (b_ == 2) return 63 - __builtin_clzll(a);
    int d = -1;
    while (a) {
        ++d;
        a /= std::uint64_t(b_);
    }
    return d;
}

std::uint64_t Residues::laurent_value(std::uint64_t a) const {
    if (b_ == 2) {
        std::uint64_t r = a, y = 0;
        for (int i = 0; i < m_; ++i) {
            r <<= 1;
            std::uint64_t t = (r >> m_) & 1u;
            if (t) r ^= pmask_;
            y = (y << 1) | t;
        }
        return y;
    }
    std::vector<int> r = digits(a);
    r.resize(std::size_t(m_) + 1, 0);
    std::uint64_t y = 0;
    for (int i = 0; i < m_; ++i) {
        for (int k = m_; k > 0; --k) r[std::size_t(k)] = r[std::size_t(k - 1)];
        r[0] = 0;
        int t = r[std::size_t(m_)] * lead_inv_ % b_;
        if (t)
            for (int k = 0; k <= m_; ++k)
                r[std::size_t(k)] = ((r[std::size_t(k)] - t * p_.coeff(k)) % b_ + b_) % b_;
        y = y * std::uint64_t(b_) + std::uint64_t(t);
    }
    return y;
}

}  // namespace hodn
