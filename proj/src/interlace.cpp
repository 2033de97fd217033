#include "hodn/interlace.hpp"

#include <algorithm>

#include "hodn/digits.hpp"

namespace hodn {

std::uint64_t interlace_point(int d, std::span<const std::uint64_t> ys, int b, int m) {
    if (d < 1 || int(ys.size()) != d) throw std::invalid_argument("interlace_point expects exactly d components");
    require_power(b, d * m);
    const std::uint64_t limit = require_power(b, m);
    for (auto y : ys)
        if (y >= limit) throw std::invalid_argument("interlace_point component has more than m digits");
    if (b == 2) {
        std::uint64_t out = 0;
        for (int a = 1; a <= m; ++a)
            for (int j = 0; j < d; ++j) out = (out << 1) | ((ys[std::size_t(j)] >> (m - a)) & 1u);
        return out;
    }
    std::vector<std::vector<int>> dig;
    for (auto y : ys) dig.push_back(fixed_digits(b, m, y));
    std::uint64_t out = 0;
    for (int a = 0; a < m; ++a)
        for (int j = 0; j < d; ++j) out = out * std::uint64_t(b) + std::uint64_t(dig[std::size_t(j)][std::size_t(a)]);
    return out;
}

PointSet interlace_net(int d, const PointSet& points) {
    if (d < 1 || points.dim() % d != 0) throw std::invalid_argument("point dimension must be a multiple of d");
    Eigen::Index s = points.dim() / d;
    PointSet out;
    out.b = points.b;
    out.precision = d * points.precision;
    require_power(points.b, out.precision);
    out.y.resize(points.size(), s);
    std::vector<std::uint64_t> buf(static_cast<std::size_t>(d));
    for (Eigen::Index n = 0; n < points.size(); ++n)
        for (Eigen::Index j = 0; j < s; ++j) {
            for (int r = 0; r < d; ++r) buf[std::size_t(r)] = points.y(n, j * d + r);
            out.y(n, j) = interlace_point(d, buf, points.b, points.precision);
        }
    return out;
}

std::uint64_t interlace_int(int d, std::span<const std::uint64_t> ls, int b) {
    if (d < 1 || int(ls.size()) != d) throw std::invalid_argument("interlace_int expects exactly d components");
    std::vector<std::vector<int>> dig;
    std::size_t len = 0;
    for (auto l : ls) {
        dig.push_back(integer_digits(b, l));
        len = std::max(len, dig.back().size());
    }
    std::uint64_t out = 0;
    for (std::size_t a = len; a-- > 0;)
        for (int j = d - 1; j >= 0; --j) {
            int v = a < dig[std::size_t(j)].size() ? dig[std::size_t(j)][a] : 0;
            if (out > (UINT64_MAX - std::uint64_t(v)) / std::uint64_t(b)) throw std::overflow_error("interlaced integer overflows");
            out = out * std::uint64_t(b) + std::uint64_t(v);
        }
    return out;
}

std::vector<std::uint64_t> deinterlace_int(std::uint64_t k, int d, int b) {
    if (d < 1) throw std::invalid_argument("d must be positive");
    std::vector<std::uint64_t> out(std::size_t(d), 0), place(std::size_t(d), 1);
    auto dig = integer_digits(b, k);
    for (std::size_t i = 0; i < dig.size(); ++i) {
        std::size_t j = i % std::size_t(d);
        out[j] += std::uint64_t(dig[i]) * place[j];
        place[j] *= std::uint64_t(b);
    }
    return out;
}

int mu_weight(std::uint64_t k, int b, int alpha) {
    auto dig = integer_digits(b, k);
    int total = 0, taken = 0;
    for (std::size_t a = dig.size(); a-- > 0 && taken < alpha;) {
        if (dig[a] == 0) continue;
        total += int(a) + 1;
        ++taken;
    }
    return total;
}

}  // namespace hodn
