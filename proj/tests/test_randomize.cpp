#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hodn/cbc.hpp"
#include "hodn/digits.hpp"
#include "hodn/interlace.hpp"
#include "hodn/randomize.hpp"

using namespace hodn;

namespace {

PointSet lattice_points(int b, int m, int s) {
    auto res = cbc_construct_fast(m, s, {b, 2, 1}, Weights::parse("j^-2", s));
    return generate_points(res.lattice());
}

}  // namespace

TEST_CASE("Philox known answers") {
    using A4 = std::array<std::uint32_t, 4>;
    using A2 = std::array<std::uint32_t, 2>;
    CHECK(philox4x32(A4{0, 0, 0, 0}, A2{0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32(A4{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, A2{0xffffffff, 0xffffffff}) ==
          A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32(A4{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, A2{0xa4093822, 0x299f31d0}) ==
          A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("word streams are reproducible and independent") {
    WordStream a(5, 0), b(5, 0), c(5, 1), d(6, 0);
    int same_c = 0, same_d = 0;
    for (int i = 0; i < 100; ++i) {
        auto x = a.next();
        CHECK(x == b.next());
        same_c += x == c.next();
        same_d += x == d.next();
    }
    CHECK(same_c < 3);
    CHECK(same_d < 3);
}

TEST_CASE("random digits are uniform") {
    for (int b : {2, 3, 5}) {
        WordStream ws(11, 3);
        std::vector<int> counts(std::size_t(b), 0);
        const int n = 60000;
        for (int i = 0; i < n; ++i) ++counts[std::size_t(ws.digit(b))];
        double chi2 = 0, e = double(n) / b;
        for (int c : counts) chi2 += (c - e) * (c - e) / e;
        // 99.9% quantile for up to 4 degrees of freedom
        CHECK(chi2 < 18.5);
    }
}

TEST_CASE("shifts") {
    auto ps = lattice_points(3, 4, 3);
    auto sh = random_shift(3, 3, 20, 42, 0);
    CHECK(sh.precision == 20);
    for (auto v : sh.sigma) CHECK(v < require_power(3, 20));
    auto once = apply_shift(ps, sh);
    CHECK(once.precision == 20);
    // subtracting the shift digitwise recovers the lifted points
    DigitalShift neg = sh;
    for (auto& v : neg.sigma) v = digitwise_add(3, 0, v, -1);
    auto back = apply_shift(once, neg);
    const std::uint64_t lift = require_power(3, 16);
    for (Eigen::Index n = 0; n < ps.size(); ++n)
        for (Eigen::Index j = 0; j < 3; ++j) CHECK(back.y(n, j) == ps.y(n, j) * lift);

    auto two = lattice_points(2, 6, 2);
    auto s2 = random_shift(2, 2, 53, 1, 9);
    auto twice = apply_shift(apply_shift(two, s2), s2);
    for (Eigen::Index n = 0; n < two.size(); ++n)
        for (Eigen::Index j = 0; j < 2; ++j) CHECK(twice.y(n, j) == two.y(n, j) << 47);

    DigitalShift zero{2, 6, {0, 0}};
    CHECK(apply_shift(two, zero).y == two.y);
    CHECK(random_shift(2, 2, 0, 1, 1).sigma == std::vector<std::uint64_t>{0, 0});
    CHECK(random_shift(2, 2, 30, 7, 4).sigma == random_shift(2, 2, 30, 7, 4).sigma);
    CHECK(random_shift(2, 2, 30, 7, 4).sigma != random_shift(2, 2, 30, 7, 5).sigma);
    CHECK_THROWS(apply_shift(two, DigitalShift{2, 3, {0, 0}}));
    CHECK_THROWS(apply_shift(two, DigitalShift{3, 6, {0, 0}}));
    CHECK_THROWS(random_shift(4, 1, 3, 0, 0));
    CHECK(default_shift_precision(2) == 53);
    CHECK(default_shift_precision(3) == 32);
}

TEST_CASE("quadrature") {
    auto ps = lattice_points(2, 8, 3);
    CHECK(qmc_estimate([](std::span<const double>) { return 2.5; }, ps) == doctest::Approx(2.5).epsilon(1e-15));
    // the first coordinate runs through the grid
    double mean_x = qmc_estimate([](std::span<const double> x) { return x[0]; }, ps);
    CHECK(mean_x == doctest::Approx((256.0 - 1) / 512).epsilon(1e-15));
    std::vector<double> zero{0, 0, 0}, ones{1, 1, 1};
    CHECK(test_function(zero) == 1.0);
    CHECK(test_function(ones) == doctest::Approx(1 / (1 + 1 + 0.25 + 1.0 / 9)));
    std::vector<double> half{0.5};
    CHECK(test_function(half) == doctest::Approx(2.0 / 3));

    // the one-dimensional test integral is ln 2
    double prev = 1;
    for (int m : {6, 10, 14}) {
        auto one = lattice_points(2, m, 1);
        auto rep = rmse_experiment(test_function, one, 8, 3);
        double err = std::fabs(rep.mean - std::numbers::ln2);
        CHECK(err < prev);
        // a shifted grid has star discrepancy at most 1/N and f has variation 1/2
        CHECK(err <= 0.5 / double(one.size()));
        prev = err;
    }
}

TEST_CASE("rmse experiments") {
    auto ps = lattice_points(2, 6, 2);
    auto c = rmse_experiment([](std::span<const double>) { return 1.0; }, ps, 10, 0);
    CHECK(c.rmse == 0);
    CHECK(c.mean == 1.0);
    CHECK(c.generator == "philox4x32-10");
    CHECK(c.precision == 53);

    auto a = rmse_experiment(test_function, ps, 20, 99);
    auto b = rmse_experiment(test_function, ps, 20, 99);
    CHECK(a.estimates == b.estimates);
    CHECK(a.rmse == b.rmse);
    double mean = 0, ss = 0;
    for (double e : a.estimates) mean += e;
    mean /= 20;
    for (double e : a.estimates) ss += (e - mean) * (e - mean);
    CHECK(a.mean == doctest::Approx(mean).epsilon(1e-14));
    CHECK(a.rmse == doctest::Approx(std::sqrt(ss / (20.0 * 19))).epsilon(1e-12));
    CHECK(rmse_experiment(test_function, ps, 20, 100).rmse != a.rmse);
    CHECK_THROWS(rmse_experiment(test_function, ps, 1, 0));
}

TEST_CASE("averaging over every shift is unbiased on the grid") {
    // points with 3 digits, shifts with 4 digits: the mean over all shifts is the grid average
    for (int b : {2, 3}) {
        const int m = 2, P = m + 1 + (b == 2 ? 1 : 0);
        PolyLattice lat{b, m, smallest_irreducible(b, m), {GFPoly(b, {1}), GFPoly::from_encoding(b, b + 1)}};
        auto raw = generate_points(lat);
        PointSet pts{b, m, raw.y};
        auto f = [](std::span<const double> x) { return std::exp(x[0]) * (1 + x[1] * x[1]); };
        const std::uint64_t G = require_power(b, P);
        long double over_shifts = 0, grid = 0;
        std::vector<double> x(2);
        for (std::uint64_t s0 = 0; s0 < G; ++s0)
            for (std::uint64_t s1 = 0; s1 < G; ++s1) {
                DigitalShift sh{b, P, {s0, s1}};
                over_shifts += qmc_estimate(f, apply_shift(pts, sh));
                x = {double(s0) / double(G), double(s1) / double(G)};
                grid += f(x);
            }
        CHECK(double(over_shifts / (G * G)) == doctest::Approx(double(grid / (G * G))).epsilon(1e-12));
    }
}

TEST_CASE("sampled shift average of the worst-case error") {
    CriterionParams params{2, 2, 2};
    auto res = cbc_construct_fast(3, 2, params, Weights::parse("1", 2));
    auto net = interlace_net(2, generate_points(res.lattice()));
    auto w = Weights::parse("1", 2);
    long double exact = shifted_mean_square_wce(net, w, 2);
    auto sampled = sampled_mean_square_wce(net, w, 2, 4000, 8);
    CHECK(sampled.std_error > 0);
    CHECK(std::fabs(double(sampled.mean - exact)) <= 4 * double(sampled.std_error));
    CHECK(exact <= criterion_B(generate_points(res.lattice()), w, params));
}
