#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "hodn/digits.hpp"
#include "hodn/pointset.hpp"

using namespace hodn;

namespace {

const std::string data_dir = HODN_DATA_DIR;

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("hodn_pointset_" + name)).string();
}

PolyLattice lattice(int b, int m, const std::string& p, std::vector<std::string> q) {
    PolyLattice lat{b, m, GFPoly::parse(b, p), {}};
    for (const auto& t : q) lat.q.push_back(GFPoly::parse(b, t));
    return lat;
}

std::vector<std::uint64_t> column(const PointSet& ps, Eigen::Index j) {
    std::vector<std::uint64_t> c;
    for (Eigen::Index n = 0; n < ps.size(); ++n) c.push_back(ps.y(n, j));
    return c;
}

}  // namespace

TEST_CASE("small lattice examples") {
    auto lat = lattice(2, 2, "x^2+x+1", {"1"});
    auto ps = generate_points(lat);
    auto c = column(ps, 0);
    std::sort(c.begin(), c.end());
    CHECK(c == std::vector<std::uint64_t>{0, 1, 2, 3});

    auto lat3 = lattice(2, 3, "x^3+x+1", {"1"});
    auto p3 = generate_points(lat3);
    CHECK(p3.y(1, 0) == 1);
    CHECK(p3.coordinate(1, 0) == doctest::Approx(0.125));
    CHECK((p3.y.row(0).array() == 0).all());
}

TEST_CASE("recurrence generation agrees with direct Laurent expansion") {
    std::mt19937_64 rng(5);
    for (int b : {2, 3, 5})
        for (int m : {1, 3, 6}) {
            auto p = smallest_irreducible(b, m);
            Residues R(p);
            PolyLattice lat{b, m, p, {}};
            for (int j = 0; j < 4; ++j) lat.q.push_back(GFPoly::from_encoding(b, 1 + rng() % (R.size() - 1)));
            auto ps = generate_points(lat);
            REQUIRE(ps.size() == Eigen::Index(R.size()));
            for (Eigen::Index n = 0; n < ps.size(); ++n)
                for (int j = 0; j < 4; ++j) CHECK(ps.y(n, j) == lattice_point_direct(lat, std::uint64_t(n), j));
        }
}

TEST_CASE("lattice points form a group under digitwise addition") {
    for (int b : {2, 3}) {
        int m = b == 2 ? 6 : 4;
        auto p = smallest_irreducible(b, m);
        PolyLattice lat{b, m, p, {GFPoly(b, {1}), GFPoly::from_encoding(b, 5), GFPoly::from_encoding(b, 11)}};
        auto ps = generate_points(lat);
        std::set<std::vector<std::uint64_t>> rows;
        for (Eigen::Index n = 0; n < ps.size(); ++n) rows.insert(std::vector<std::uint64_t>(ps.y.row(n).begin(), ps.y.row(n).end()));
        CHECK(rows.size() == std::size_t(ps.size()));
        for (Eigen::Index a = 0; a < ps.size(); ++a)
            for (Eigen::Index c = 0; c < ps.size(); ++c) {
                std::vector<std::uint64_t> sum;
                for (Eigen::Index j = 0; j < ps.dim(); ++j) sum.push_back(digitwise_add(b, ps.y(a, j), ps.y(c, j)));
                CHECK(rows.count(sum) == 1);
            }
        // q_1 = 1 makes the first coordinate a permutation of the grid
        auto c0 = column(ps, 0);
        std::sort(c0.begin(), c0.end());
        for (std::size_t i = 0; i < c0.size(); ++i) CHECK(c0[i] == i);
    }
}

TEST_CASE("invalid lattices are rejected") {
    CHECK_THROWS(generate_points(lattice(2, 3, "x^2+x+1", {"1"})));
    CHECK_THROWS(generate_points(lattice(2, 2, "x^2+x+1", {"x^2"})));
}

TEST_CASE("dual net membership") {
    auto lat = lattice(2, 2, "x^2+x+1", {"1"});
    std::vector<std::uint64_t> k{0};
    CHECK(dual_contains(lat, k));
    k = {4};
    CHECK(dual_contains(lat, k));
    k = {1};
    CHECK_FALSE(dual_contains(lat, k));
    // tr_2(7) = x + 1, which p does not divide
    k = {7};
    CHECK_FALSE(dual_contains(lat, k));

    auto lat2 = lattice(2, 3, "x^3+x+1", {"1", "x"});
    std::vector<std::uint64_t> kk{8, 16};
    CHECK(dual_contains(lat2, kk));
}

TEST_CASE("Walsh characters") {
    CHECK(walsh(2, 0, 5, 3) == std::complex<double>(1, 0));
    CHECK(walsh(2, 1, 1, 1).real() == doctest::Approx(-1.0));
    auto w = walsh(3, 1, 2, 1);
    auto omega2 = std::polar(1.0, 2 * 2 * M_PI / 3);
    CHECK(std::abs(w - omega2) < 1e-14);
    CHECK(walsh_phase(3, 1, 2, 1) == 2);
    // digits of k beyond the precision do not contribute
    CHECK(walsh_phase(2, 8, 7, 3) == 0);
}

TEST_CASE("character sums are indicator functions of the dual net") {
    for (int b : {2, 3}) {
        int m = 2;
        auto p = smallest_irreducible(b, m);
        PolyLattice lat{b, m, p, {GFPoly(b, {1}), GFPoly::from_encoding(b, b + 1)}};
        auto ps = generate_points(lat);
        std::uint64_t top = require_power(b, m + 1);
        for (std::uint64_t k1 = 0; k1 < top; ++k1)
            for (std::uint64_t k2 = 0; k2 < top; ++k2) {
                std::vector<std::uint64_t> k{k1, k2};
                double cs = character_sum(ps, k);
                CHECK(std::abs(cs - (dual_contains(lat, k) ? 1.0 : 0.0)) <= 1e-12);
            }
    }
    auto lat = lattice(2, 2, "x^2+x+1", {"1"});
    auto ps = generate_points(lat);
    std::vector<std::uint64_t> k7{7}, k4{4}, k0{0};
    CHECK(character_sum(ps, k0) == doctest::Approx(1.0));
    CHECK(std::abs(character_sum(ps, k7)) < 1e-12);
    CHECK(character_sum(ps, k4) == doctest::Approx(1.0));
}

TEST_CASE("Sobol' ingestion") {
    const std::string jk = data_dir + "/joe-kuo-6.1024.txt";
    auto vdc = load_external_net(jk, 1, 3);
    std::vector<double> got;
    for (Eigen::Index n = 0; n < vdc.size(); ++n) got.push_back(vdc.coordinate(n, 0));
    CHECK(got == std::vector<double>{0, 0.5, 0.25, 0.75, 0.125, 0.625, 0.375, 0.875});

    auto one = load_external_net(jk, 3, 0);
    CHECK(one.size() == 1);
    CHECK((one.y.array() == 0).all());

    // second coordinate: m_1 = 1 gives the Pascal matrix
    auto two = load_external_net(jk, 2, 3);
    std::vector<std::uint64_t> second = column(two, 1);
    CHECK(second == std::vector<std::uint64_t>{0, 4, 6, 2, 5, 1, 3, 7});

    CHECK_THROWS_AS(load_external_net(jk, 2000, 4), malformed_input);
    CHECK_THROWS_AS(load_external_net(temp_path("missing"), 2, 4), malformed_input);
}

TEST_CASE("generating-matrix files") {
    auto path = temp_path("gen.txt");
    {
        std::ofstream f(path);
        f << "2 2 2\n1 0\n0 1\n\n1 0\n0 1\n";
    }
    auto ps = load_external_net(path, 2, 2);
    CHECK(ps.size() == 4);
    for (Eigen::Index n = 0; n < ps.size(); ++n) CHECK(ps.y(n, 0) == ps.y(n, 1));

    // a matrix file against direct matrix-vector products
    std::mt19937_64 rng(9);
    const int m = 5, b = 3;
    {
        std::ofstream f(path);
        f << b << ' ' << m << " 2\n";
        for (int j = 0; j < 2; ++j)
            for (int i = 0; i < m; ++i) {
                for (int k = 0; k < m; ++k) f << rng() % b << ' ';
                f << '\n';
            }
    }
    int fb = 0;
    auto mats = read_generating_matrices(path, fb, 2, m);
    CHECK(fb == b);
    auto net = load_external_net(path, 2, m);
    for (Eigen::Index n = 0; n < net.size(); ++n) {
        std::vector<int> nd(m, 0);
        std::uint64_t t = std::uint64_t(n);
        for (int k = 0; k < m; ++k, t /= b) nd[std::size_t(k)] = int(t % b);
        for (int j = 0; j < 2; ++j) {
            std::vector<int> y(m, 0);
            for (int i = 0; i < m; ++i) {
                int acc = 0;
                for (int k = 0; k < m; ++k) acc += mats[std::size_t(j)](i, k) * nd[std::size_t(k)];
                y[std::size_t(i)] = acc % b;
            }
            CHECK(net.y(n, j) == from_fixed_digits(b, y));
        }
    }

    {
        std::ofstream f(path);
        f << "2 2 1\n1 0\n0 7\n";
    }
    CHECK_THROWS_AS(load_external_net(path, 1, 2), malformed_input);
    std::remove(path.c_str());
}

TEST_CASE("CSV and binary round trips") {
    auto lat = lattice(2, 10, "1033", {"1", "123", "456"});
    auto ps = generate_points(lat);
    auto csv = temp_path("pts.csv"), bin = temp_path("pts.bin");
    save_points_csv(ps, csv, "made by a test");
    auto back = load_points(csv);
    CHECK(back.b == ps.b);
    CHECK(back.precision == ps.precision);
    CHECK(back.y == ps.y);
    save_points_binary(back, bin);
    auto back2 = load_points(bin);
    CHECK(back2.y == ps.y);
    CHECK(std::filesystem::file_size(bin) == 32 + 8 * std::size_t(ps.size() * ps.dim()));

    for (int b : {3, 5}) {
        auto p = smallest_irreducible(b, 4);
        PolyLattice l{b, 4, p, {GFPoly(b, {1}), GFPoly::from_encoding(b, 7)}};
        auto q = generate_points(l);
        save_points_csv(q, csv);
        CHECK(load_points(csv).y == q.y);
    }

    {
        std::ofstream f(csv);
        f << "# b=2 precision=3 dim=1 n=2\n0.5\n";
    }
    CHECK_THROWS_AS(load_points(csv), malformed_input);
    {
        std::ofstream f(bin, std::ios::binary);
        f << "abc";
    }
    CHECK_THROWS_AS(load_points(bin), malformed_input);
    std::remove(csv.c_str());
    std::remove(bin.c_str());
}
