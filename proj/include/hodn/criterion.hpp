#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hodn/numeric.hpp"
#include "hodn/pointset.hpp"

namespace hodn {

struct CriterionParams {
    int b = 2;
    int alpha = 2;
    int d = 2;

    int mu() const { return alpha < d ? alpha : d; }
    void validate() const;
};

// Weights gamma_u; gamma_emptyset is always 1.
class Weights {
public:
    static Weights product(std::vector<double> gamma, std::string descriptor = {});
    static Weights general(int s, std::map<std::uint64_t, double> by_mask, std::string descriptor = {});
    // "1", "0.5", "j^-2", "list:a,b,c", "general:@file"
    static Weights parse(const std::string& spec, int s);

    bool is_product() const { return product_; }
    int dimension() const { return s_; }
    double gamma_j(int j) const;  // 1-based, product weights only
    double gamma_u(std::uint64_t mask) const;  // bit j-1 marks coordinate j
    const std::string& descriptor() const { return descriptor_; }
    const std::vector<double>& product_values() const { return gamma_; }
    const std::map<std::uint64_t, double>& general_values() const { return general_; }

private:
    bool product_ = true;
    int s_ = 0;
    std::vector<double> gamma_;
    std::map<std::uint64_t, double> general_;
    std::string descriptor_;
};

// C_{tau,b}, Ctilde_{2 alpha,b}, D_{alpha,b} and Dtilde_{alpha,b,d}.
long double walsh_constant_C(int tau, int b);
long double walsh_constant_Ctilde(int alpha, int b);
long double walsh_decay_constant(int alpha, int b);
long double dtilde(const CriterionParams& params);

// chi for y with ⌊log_b y⌋ = -t; t = 0 stands for y = 0.
template <typename Scalar>
Scalar chi_by_position(const CriterionParams& params, int t) {
    const Scalar b(params.b);
    const int mu = params.mu();
    Scalar num = b - Scalar(1);
    if (t > 0) num -= int_power(b, -(2 * mu - 1) * t) * (int_power(b, 2 * mu) - Scalar(1));
    return num / (int_power(b, params.alpha) * (int_power(b, 2 * mu) - b));
}

// Position t of the leading nonzero digit of a fixed-point value (0 if y = 0).
int leading_position(int b, int precision, std::uint64_t y);

template <typename Scalar>
std::vector<Scalar> chi_table(const CriterionParams& params, int precision) {
    std::vector<Scalar> out;
    for (int t = 0; t <= precision; ++t) out.push_back(chi_by_position<Scalar>(params, t));
    return out;
}

template <typename Scalar>
Scalar chi(const CriterionParams& params, std::uint64_t y, int precision) {
    return chi_by_position<Scalar>(params, leading_position(params.b, precision, y));
}

// Direct evaluation from a point set given in the lattice (non-interlaced) layout;
// only the first r coordinates are used.
extended criterion_B_partial(const PointSet& points, int r, const Weights& weights, const CriterionParams& params);
extended criterion_B(const PointSet& points, const Weights& weights, const CriterionParams& params);

// r_{alpha,d}(l)
long double r_weight(const CriterionParams& params, std::uint64_t l);
// Sum over l >= 1 of r^lambda(l), and over multiples of b^m.
long double r_weight_sum(const CriterionParams& params, long double lambda);
long double r_weight_sum_multiples(const CriterionParams& params, long double lambda, int m);

struct DualOracleResult {
    long double value = 0;
    long double tail_bound = 0;
};

// Criterion summed over the dual net with mu_1(l) <= cap per coordinate.
DualOracleResult criterion_B_dual_oracle(const PolyLattice& lat, const Weights& weights, const CriterionParams& params,
                                          int cap);

// Bernoulli polynomial B_r(x), r <= 6.
long double bernoulli(int r, long double x);
long double sobolev_kernel_1d(int alpha, long double x, long double y);
// e^2 of the unshifted point set.
long double kernel_wce_squared(const PointSet& points, const Weights& weights, int alpha);
// Exact mean square worst-case error over uniformly random digital shifts.
long double shifted_mean_square_wce(const PointSet& points, const Weights& weights, int alpha);

}  // namespace hodn
