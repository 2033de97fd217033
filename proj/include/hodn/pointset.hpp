#pragma once

#include <Eigen/Core>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hodn/galois.hpp"

namespace hodn {

using DigitMatrix = Eigen::Matrix<std::uint64_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Rows are points, columns are coordinates; entry y encodes y * b^-precision.
struct PointSet {
    int b = 2;
    int precision = 0;
    DigitMatrix y;

    Eigen::Index size() const { return y.rows(); }
    Eigen::Index dim() const { return y.cols(); }
    double coordinate(Eigen::Index n, Eigen::Index j) const;
    Eigen::MatrixXd to_real() const;
    PointSet leading_columns(Eigen::Index r) const;
};

struct PolyLattice {
    int b = 2;
    int m = 0;
    GFPoly p{2};
    std::vector<GFPoly> q;

    int dim() const { return int(q.size()); }
};

class malformed_input : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Columns C[.][k] of the generating matrix of coordinate j as m-digit values.
std::vector<std::uint64_t> generating_columns(const PolyLattice& lat, int j);
PointSet generate_points(const PolyLattice& lat);
// Single point evaluated directly by Laurent expansion of n(x) q_j(x) / p(x).
std::uint64_t lattice_point_direct(const PolyLattice& lat, std::uint64_t n, int j);

bool dual_contains(const PolyLattice& lat, std::span<const std::uint64_t> k);
int walsh_phase(int b, std::uint64_t k, std::uint64_t y, int precision);
std::complex<double> walsh(int b, std::uint64_t k, std::uint64_t y, int precision);
double character_sum(const PointSet& points, std::span<const std::uint64_t> k);

// Digital net from generating matrices C[j] (m x m, entries in F_b).
PointSet digital_net(int b, int m, const std::vector<Eigen::MatrixXi>& matrices);
std::vector<Eigen::MatrixXi> sobol_matrices(const std::string& path, int dim, int m);
std::vector<Eigen::MatrixXi> read_generating_matrices(const std::string& path, int& b, int dim, int m);
PointSet load_external_net(const std::string& path, int dim, int m);

// comment, if given, goes on a second '#' line
void save_points_csv(const PointSet& points, const std::string& path, const std::string& comment = {});
void save_points_binary(const PointSet& points, const std::string& path);
PointSet load_points(const std::string& path);

}  // namespace hodn
