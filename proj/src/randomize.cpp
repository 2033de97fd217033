#include "hodn/randomize.hpp"

#include <cmath>

#include "hodn/digits.hpp"

namespace hodn {

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
    constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        if (round) {
            key[0] += W0;
            key[1] += W1;
        }
        std::uint64_t p0 = std::uint64_t(M0) * ctr[0];
        std::uint64_t p1 = std::uint64_t(M1) * ctr[2];
        ctr = {std::uint32_t(p1 >> 32) ^ ctr[1] ^ key[0], std::uint32_t(p1), std::uint32_t(p0 >> 32) ^ ctr[3] ^ key[1],
               std::uint32_t(p0)};
    }
    return ctr;
}

std::uint32_t WordStream::next() {
    if (used_ == 4) {
        buf_ = philox4x32({std::uint32_t(block_), std::uint32_t(block_ >> 32), std::uint32_t(stream_), std::uint32_t(stream_ >> 32)},
                          {std::uint32_t(seed_), std::uint32_t(seed_ >> 32)});
        ++block_;
        used_ = 0;
    }
    return buf_[std::size_t(used_++)];
}

int WordStream::digit(int b) {
    const std::uint64_t limit = (std::uint64_t(1) << 32) / std::uint64_t(b) * std::uint64_t(b);
    while (true) {
        std::uint32_t w = next();
        if (w < limit) return int(w % std::uint32_t(b));
    }
}

int default_shift_precision(int b) {
    if (b == 2) return 53;
    return int(std::floor(52.0 / std::log2(double(b))));
}

DigitalShift random_shift(int b, int dim, int precision, std::uint64_t seed, std::uint64_t stream) {
    require_prime_base(b);
    require_power(b, precision);
    if (precision > 63) throw std::invalid_argument("shift precision too large");
    DigitalShift sh{b, precision, {}};
    WordStream ws(seed, stream);
    for (int j = 0; j < dim; ++j) {
        std::uint64_t v = 0;
        if (b == 2) {
            std::uint64_t hi = ws.next(), lo = ws.next();
            v = ((hi << 32) | lo) >> (64 - precision);
            if (precision == 0) v = 0;
        } else {
            for (int i = 0; i < precision; ++i) v = v * std::uint64_t(b) + std::uint64_t(ws.digit(b));
        }
        sh.sigma.push_back(v);
    }
    return sh;
}

PointSet apply_shift(const PointSet& points, const DigitalShift& shift) {
    if (shift.b != points.b) throw std::invalid_argument("shift base differs from point base");
    if (Eigen::Index(shift.sigma.size()) != points.dim()) throw std::invalid_argument("shift dimension mismatch");
    if (shift.precision < points.precision) throw std::invalid_argument("shift precision below point precision");
    std::uint64_t lift = require_power(points.b, shift.precision - points.precision);
    PointSet out{points.b, shift.precision, DigitMatrix(points.size(), points.dim())};
    for (Eigen::Index n = 0; n < points.size(); ++n)
        for (Eigen::Index j = 0; j < points.dim(); ++j)
            out.y(n, j) = digitwise_add(points.b, points.y(n, j) * lift, shift.sigma[std::size_t(j)]);
    return out;
}

double test_function(std::span<const double> x) {
    double s = 1.0;
    for (std::size_t j = 0; j < x.size(); ++j) s += x[j] / (double(j + 1) * double(j + 1));
    return 1.0 / s;
}

double qmc_estimate(const Integrand& f, const PointSet& points) {
    if (points.size() == 0) throw std::invalid_argument("empty point set");
    const long double scale = int_power<long double>((long double)points.b, -points.precision);
    std::vector<double> x(std::size_t(points.dim()));
    compensated_sum<double> acc;
    for (Eigen::Index n = 0; n < points.size(); ++n) {
        for (Eigen::Index j = 0; j < points.dim(); ++j) x[std::size_t(j)] = double((long double)points.y(n, j) * scale);
        acc.add(f(x));
    }
    return acc.value() / double(points.size());
}

RmseReport rmse_experiment(const Integrand& f, const PointSet& points, int shifts, std::uint64_t seed, int precision) {
    if (shifts < 2) throw std::invalid_argument("rmse needs at least two shifts");
    if (precision == 0) precision = std::max(default_shift_precision(points.b), points.precision);
    RmseReport rep;
    rep.shifts = shifts;
    rep.seed = seed;
    rep.precision = precision;
    rep.estimates.assign(std::size_t(shifts), 0.0);
    parallel_blocks(std::size_t(shifts), 1, [&](std::size_t, std::size_t lo, std::size_t hi) {
        for (std::size_t l = lo; l < hi; ++l) {
            auto sh = random_shift(points.b, int(points.dim()), precision, seed, l);
            rep.estimates[l] = qmc_estimate(f, apply_shift(points, sh));
        }
    });
    compensated_sum<double> mean;
    for (double q : rep.estimates) mean.add(q);
    rep.mean = mean.value() / shifts;
    compensated_sum<double> ss;
    for (double q : rep.estimates) ss.add((q - rep.mean) * (q - rep.mean));
    rep.rmse = std::sqrt(ss.value() / (double(shifts) * double(shifts - 1)));
    return rep;
}

ShiftAverage sampled_mean_square_wce(const PointSet& points, const Weights& weights, int alpha, int shifts,
                                     std::uint64_t seed, int precision) {
    if (shifts < 2) throw std::invalid_argument("need at least two shifts");
    if (precision == 0) precision = std::max(default_shift_precision(points.b), points.precision);
    std::vector<long double> v(static_cast<std::size_t>(shifts));
    for (int l = 0; l < shifts; ++l)
        v[std::size_t(l)] = kernel_wce_squared(apply_shift(points, random_shift(points.b, int(points.dim()), precision, seed, std::uint64_t(l))),
                                               weights, alpha);
    long double mean = 0;
    for (auto x : v) mean += x;
    mean /= shifts;
    long double ss = 0;
    for (auto x : v) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / ((long double)shifts * (shifts - 1)))};
}

}  // namespace hodn
