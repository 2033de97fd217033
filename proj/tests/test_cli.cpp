#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "hodn/cbc.hpp"
#include "hodn/interlace.hpp"

using namespace hodn;

namespace {

namespace fs = std::filesystem;

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = cli::run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string tmp(const std::string& name) {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / "hodn_cli_test";
        fs::create_directories(d);
        return d;
    }();
    return (dir / name).string();
}

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

double value_after(const std::string& text, const std::string& key) {
    auto at = text.find(key + " = ");
    REQUIRE(at != std::string::npos);
    return std::stod(text.substr(at + key.size() + 3));
}

const std::string directions = std::string(HODN_DATA_DIR) + "/joe-kuo-6.1024.txt";

}  // namespace

TEST_CASE("usage errors and help") {
    CHECK(run({}).code == cli::usage);
    CHECK(run({"--help"}).code == cli::ok);
    CHECK(run({"frobnicate"}).code == cli::usage);
    CHECK(run({"construct", "--m", "4"}).code == cli::usage);
    CHECK(run({"construct", "--m", "4", "--s", "1", "--out", tmp("x.json"), "--mode", "slow"}).code == cli::usage);
    CHECK(run({"construct", "--m", "4", "--s", "1", "--out", tmp("x.json"), "--b", "4"}).code == cli::usage);
    CHECK(run({"construct", "--m", "4", "--s", "1", "--out", tmp("x.json"), "--alpha", "1"}).code == cli::usage);
    CHECK(run({"construct", "--m", "4", "--s", "1", "--out", tmp("x.json"), "--p", "x^4+1"}).code == cli::usage);
    CHECK(run({"construct", "--m", "4", "--s", "1", "--out", tmp("x.json"), "--p", "x^3+x+1"}).code == cli::usage);
    CHECK(run({"criterion"}).code == cli::usage);
    CHECK(run({"table"}).code == cli::usage);
    CHECK(run({"table", "--table", "12"}).code == cli::usage);
}

TEST_CASE("budget and malformed input") {
    auto r = run({"construct", "--m", "12", "--s", "4", "--mode", "naive", "--budget", "1e6", "--out", tmp("b.json")});
    CHECK(r.code == cli::budget);
    CHECK_FALSE(r.err.empty());

    {
        std::ofstream f(tmp("bad.json"));
        f << "{ not json";
    }
    CHECK(run({"points", "--net", tmp("bad.json"), "--out", tmp("bad.csv")}).code == cli::malformed);
    CHECK(run({"criterion", "--net", tmp("missing.json")}).code == cli::malformed);
    {
        std::ofstream f(tmp("bad.csv"));
        f << "# b=2 precision=4 dim=1 n=3\n0.5\n";
    }
    CHECK(run({"criterion", "--points", tmp("bad.csv"), "--d", "1"}).code == cli::malformed);

    REQUIRE(run({"construct", "--m", "10", "--s", "3", "--out", tmp("big.json")}).code == cli::ok);
    CHECK(run({"criterion", "--net", tmp("big.json"), "--oracle"}).code == cli::budget);
}

TEST_CASE("construct: naive and fast agree and the file reproduces the criterion") {
    auto f = run({"construct", "--m", "7", "--s", "3", "--weights", "j^-2", "--out", tmp("f.json")});
    auto n = run({"construct", "--m", "7", "--s", "3", "--weights", "j^-2", "--mode", "naive", "--out", tmp("n.json")});
    REQUIRE(f.code == cli::ok);
    REQUIRE(n.code == cli::ok);
    auto a = load_result(tmp("f.json")), b = load_result(tmp("n.json"));
    REQUIRE(a.q.size() == b.q.size());
    for (std::size_t j = 0; j < a.q.size(); ++j) CHECK(a.q[j] == b.q[j]);
    CHECK(a.mode == "fast");
    CHECK(b.mode == "naive");
    CHECK(f.out.find("B_final = ") != std::string::npos);

    auto c = run({"criterion", "--net", tmp("f.json")});
    REQUIRE(c.code == cli::ok);
    CHECK(value_after(c.out, "B") == doctest::Approx(a.B_final).epsilon(1e-12));

    CHECK(run({"construct", "--m", "4", "--s", "2", "--weights", "general:@" + tmp("none.txt"), "--out", tmp("g.json")})
              .code != cli::ok);
}

TEST_CASE("construct with a given modulus and general weights") {
    auto r = run({"construct", "--m", "4", "--s", "1", "--p", "x^4+x+1", "--out", tmp("p.json")});
    REQUIRE(r.code == cli::ok);
    CHECK(load_result(tmp("p.json")).p == GFPoly::parse(2, "x^4+x+1"));
    CHECK(r.out.find("2.11e-5") != std::string::npos);

    {
        std::ofstream f(tmp("w.txt"));
        f << "1:1\n2:0.5\n1,2:0.2\n";
    }
    const std::string spec = "general:@" + tmp("w.txt");
    CHECK(run({"construct", "--m", "4", "--s", "2", "--weights", spec, "--out", tmp("g.json")}).code == cli::usage);
    REQUIRE(run({"construct", "--m", "4", "--s", "2", "--weights", spec, "--mode", "naive", "--out", tmp("g.json")})
                .code == cli::ok);
    auto res = load_result(tmp("g.json"));
    auto c = run({"criterion", "--net", tmp("g.json"), "--weights", spec});
    CHECK(value_after(c.out, "B") == doctest::Approx(res.B_final).epsilon(1e-12));
}

TEST_CASE("criterion oracle on a small net") {
    REQUIRE(run({"construct", "--m", "3", "--s", "1", "--out", tmp("small.json")}).code == cli::ok);
    auto c = run({"criterion", "--net", tmp("small.json"), "--oracle"});
    REQUIRE(c.code == cli::ok);
    double B = value_after(c.out, "B"), o = value_after(c.out, "oracle"), t = value_after(c.out, "oracle_tail_bound");
    CHECK(o <= B * (1 + 1e-12));
    CHECK(B - o <= t * (1 + 1e-9) + 1e-15);
    CHECK(run({"criterion", "--sobol", directions, "--m", "4", "--s", "1", "--oracle"}).code == cli::usage);
}

TEST_CASE("criterion of the Sobol' net") {
    auto c = run({"criterion", "--sobol", directions, "--m", "4", "--s", "1"});
    REQUIRE(c.code == cli::ok);
    CHECK(value_after(c.out, "B") == doctest::Approx(2.13e-5).epsilon(0.02));
    CHECK(run({"criterion", "--sobol", directions, "--s", "1"}).code == cli::usage);
}

TEST_CASE("points: raw, interlaced and file formats") {
    REQUIRE(run({"construct", "--m", "6", "--s", "2", "--d", "3", "--out", tmp("pts.json")}).code == cli::ok);
    auto res = load_result(tmp("pts.json"));
    REQUIRE(run({"points", "--net", tmp("pts.json"), "--raw", "--out", tmp("raw.csv")}).code == cli::ok);
    REQUIRE(run({"points", "--net", tmp("pts.json"), "--out", tmp("il.csv")}).code == cli::ok);
    REQUIRE(run({"points", "--net", tmp("pts.json"), "--interlaced", "--format", "bin", "--out", tmp("il.bin")}).code ==
            cli::ok);
    auto raw = load_points(tmp("raw.csv"));
    auto il = load_points(tmp("il.csv"));
    CHECK(raw.dim() == 6);
    CHECK(il.dim() == 2);
    CHECK(il.precision == 18);
    CHECK(interlace_net(3, raw).y == il.y);
    CHECK(load_points(tmp("il.bin")).y == il.y);
    CHECK(raw.y == generate_points(res.lattice()).y);
    CHECK(run({"points", "--net", tmp("pts.json"), "--raw", "--interlaced", "--out", tmp("x.csv")}).code == cli::usage);

    // the raw points feed the criterion directly
    auto c = run({"criterion", "--points", tmp("raw.csv"), "--d", "3"});
    CHECK(value_after(c.out, "B") == doctest::Approx(res.B_final).epsilon(1e-12));
}

TEST_CASE("provenance") {
    REQUIRE(run({"construct", "--m", "4", "--s", "1", "--provenance", "--out", tmp("prov.json")}).code == cli::ok);
    auto j = nlohmann::json::parse(slurp(tmp("prov.json")));
    REQUIRE(j.contains("provenance"));
    CHECK(j["provenance"]["command"].get<std::string>().find("construct") != std::string::npos);
    CHECK(load_result(tmp("prov.json")).m == 4);

    REQUIRE(run({"points", "--net", tmp("prov.json"), "--provenance", "--out", tmp("prov.csv")}).code == cli::ok);
    CHECK(slurp(tmp("prov.csv")).find("# provenance") != std::string::npos);
    CHECK(load_points(tmp("prov.csv")).size() == 16);
    REQUIRE(run({"points", "--net", tmp("prov.json"), "--provenance", "--format", "bin", "--out", tmp("prov.bin")})
                .code == cli::ok);
    CHECK(fs::exists(tmp("prov.bin") + ".provenance.json"));
}

TEST_CASE("integrate") {
    REQUIRE(run({"construct", "--m", "8", "--s", "2", "--weights", "j^-2", "--out", tmp("int.json")}).code == cli::ok);
    auto r = run({"integrate", "--net", tmp("int.json"), "--shifts", "10", "--seed", "5", "--out", tmp("int_rep.json"),
                  "--csv", tmp("int.csv")});
    REQUIRE(r.code == cli::ok);
    auto rep = nlohmann::json::parse(slurp(tmp("int_rep.json")));
    CHECK(rep["generator"] == "philox4x32-10");
    CHECK(rep["estimates"].size() == 10);
    CHECK(value_after(r.out, "rmse") == doctest::Approx(rep["rmse"].get<double>()));
    auto csv = slurp(tmp("int.csv"));
    CHECK(csv.rfind("m,s,alpha,d,weights,r,Q_bar,rmse,seed\n", 0) == 0);
    CHECK(csv.find("8,2,2,2,\"j^-2\",10,") != std::string::npos);

    auto again = run({"integrate", "--net", tmp("int.json"), "--shifts", "10", "--seed", "5"});
    CHECK(again.out == r.out);
    auto c = run({"integrate", "--net", tmp("int.json"), "--function", "const", "--shifts", "4"});
    CHECK(value_after(c.out, "rmse") == 0);
    CHECK(run({"integrate", "--net", tmp("int.json"), "--function", "nope"}).code == cli::usage);
    CHECK(run({"integrate", "--net", tmp("int.json"), "--shifts", "1"}).code == cli::usage);
}

TEST_CASE("tables") {
    auto t = run({"table", "--s", "1,2", "--m-range", "3:5", "--directions", directions});
    REQUIRE(t.code == cli::ok);
    std::istringstream lines(t.out);
    std::string header, row;
    std::getline(lines, header);
    CHECK(header == "m,s1_sobol,s1_plps,s2_sobol,s2_plps");
    int rows = 0;
    while (std::getline(lines, row)) ++rows;
    CHECK(rows == 3);

    auto n = run({"table", "--s", "1", "--alpha-d", "2,3", "--m-range", "4:4", "--no-sobol"});
    REQUIRE(n.code == cli::ok);
    CHECK(n.out.rfind("m,s1_a2d2_plps,s1_a3d3_plps\n4,", 0) == 0);

    auto empty = run({"table", "--s", "1", "--m-range", "5:4", "--no-sobol"});
    CHECK(empty.code == cli::ok);
    CHECK(empty.out == "m,s1_plps\n");
    CHECK(run({"table", "--s", "1", "--m-range", "a:b"}).code == cli::usage);

    auto f = run({"table", "--table", "1", "--m-range", "4:5", "--out", tmp("t1.csv"), "--directions", directions});
    REQUIRE(f.code == cli::ok);
    auto csv = slurp(tmp("t1.csv"));
    CHECK(csv.rfind("m,s1_sobol,s1_plps,s2_sobol,s2_plps,s5_sobol,s5_plps\n4,", 0) == 0);
    CHECK(f.out.find("2.11e-5") != std::string::npos);
}

TEST_CASE("config files") {
    {
        std::ofstream f(tmp("run.ini"));
        f << "[construct]\nm = 5\ns = 2\nweights = \"j^-2\"\nout = \"" << tmp("cfg.json") << "\"\n";
    }
    auto r = run({"--config", tmp("run.ini"), "construct"});
    REQUIRE(r.code == cli::ok);
    auto res = load_result(tmp("cfg.json"));
    CHECK(res.m == 5);
    CHECK(res.s == 2);
    CHECK(res.weights == "j^-2");
}
