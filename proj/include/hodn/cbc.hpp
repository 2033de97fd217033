#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hodn/criterion.hpp"
#include "hodn/galois.hpp"
#include "hodn/pointset.hpp"

namespace hodn {

class budget_exceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Product with the circulant matrix whose first column is col:
// y[i] = sum_n col[(i - n) mod L] x[n].
class Circulant {
public:
    explicit Circulant(Eigen::VectorXd col, std::size_t direct_below = 1024);

    Eigen::Index size() const { return col_.size(); }
    bool uses_fft() const { return use_fft_; }
    // err_bound receives an upper estimate of the largest absolute error.
    Eigen::VectorXd apply(const Eigen::VectorXd& x, double* err_bound = nullptr) const;

private:
    Eigen::VectorXd col_;
    bool use_fft_;
    Eigen::Index padded_ = 0;
    Eigen::VectorXcd col_hat_;
    double col_hat_max_ = 0;
};

Eigen::VectorXd circulant_apply(const Eigen::VectorXd& col, const Eigen::VectorXd& x, double* err_bound = nullptr,
                                std::size_t direct_below = 1024);

struct CbcOptions {
    // naive scans refuse when ds * b^(2m) exceeds this
    double naive_budget = 4.0e9;
    // fast construction refuses when its working set would exceed this many bytes
    double memory_budget = 2.0e9;
    std::size_t direct_circulant_below = 1024;
    std::size_t max_shortlist = 64;
    double lambda = 1.0;
    // optional scan order for the naive search (a permutation of 1..b^m-1)
    std::vector<std::uint64_t> candidate_order;
};

struct ConstructionResult {
    int b = 2;
    int m = 0;
    int s = 0;
    int alpha = 2;
    int d = 2;
    GFPoly p{2};
    std::vector<GFPoly> q;
    std::string weights;
    std::vector<double> weight_values;
    std::vector<double> B_trace;
    double B_final = 0;
    double lambda = 1.0;
    double bound = 0;
    std::vector<double> bound_trace;
    std::string mode;

    PolyLattice lattice() const { return PolyLattice{b, m, p, q}; }
};

// Prefix-product state shared by the naive and fast searches.
class CbcState {
public:
    CbcState(const CriterionParams& params, const Weights& weights, int m, std::uint64_t N);

    void begin_component(int r);
    // pos[n] = leading digit position of y_{n,r} (0 for y = 0)
    extended evaluate(const std::vector<std::uint8_t>& pos) const;
    void commit(const std::vector<std::uint8_t>& pos);
    // Candidate-dependent weights x_n with B = const + (1/N) sum_n x_n chi(y_{n,r}),
    // centred over n >= 1 (x_0 = 0); the constant absorbs the shift.
    std::vector<double> ranking_weights() const;
    extended tie_tolerance() const;

    const std::vector<extended>& block_product_minus_one() const { return A_; }
    const std::vector<extended>& inner_product_minus_one() const { return e_; }
    const std::vector<extended>& chi_values() const { return chi_; }

private:
    CriterionParams params_;
    const Weights& weights_;
    int m_;
    std::uint64_t N_;
    extended Dt_;
    std::vector<extended> chi_;
    int r_ = 0, j1_ = 0, d1_ = 0;
    std::vector<extended> A_;  // product weights: prod over finished blocks minus one
    std::vector<extended> e_;  // current block: prod (1 + chi) minus one
    std::vector<std::vector<extended>> blocks_;  // general weights: finished block values
    std::vector<extended> U_, W_;
};

ConstructionResult cbc_construct_naive(int m, int s, const CriterionParams& params, const Weights& weights,
                                       const std::optional<GFPoly>& p = std::nullopt, const CbcOptions& options = {});
ConstructionResult cbc_construct_fast(int m, int s, const CriterionParams& params, const Weights& weights,
                                      const std::optional<GFPoly>& p = std::nullopt, const CbcOptions& options = {});

// Upper bound on the criterion of the first r components found by the search.
long double cbc_bound_constant(const CriterionParams& params, long double lambda);
long double cbc_error_bound(const CriterionParams& params, const Weights& weights, int m, int r, long double lambda);

std::string result_to_json(const ConstructionResult& result, bool provenance = false, int indent = 2);
ConstructionResult result_from_json(const std::string& text);
ConstructionResult load_result(const std::string& path);

}  // namespace hodn
