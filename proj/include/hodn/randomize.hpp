#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hodn/criterion.hpp"
#include "hodn/pointset.hpp"

namespace hodn {

// Philox4x32-10 counter-based generator.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key);

// Sequential 32-bit words of stream `stream` under `seed`.
class WordStream {
public:
    WordStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}
    std::uint32_t next();
    int digit(int b);

private:
    std::uint64_t seed_, stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int used_ = 4;
};

struct DigitalShift {
    int b = 2;
    int precision = 0;
    std::vector<std::uint64_t> sigma;
};

int default_shift_precision(int b);
DigitalShift random_shift(int b, int dim, int precision, std::uint64_t seed, std::uint64_t stream);
PointSet apply_shift(const PointSet& points, const DigitalShift& shift);

using Integrand = std::function<double(std::span<const double>)>;

double test_function(std::span<const double> x);
double qmc_estimate(const Integrand& f, const PointSet& points);

struct RmseReport {
    double mean = 0;
    double rmse = 0;
    int shifts = 0;
    std::uint64_t seed = 0;
    int precision = 0;
    std::string generator = "philox4x32-10";
    std::vector<double> estimates;
};

RmseReport rmse_experiment(const Integrand& f, const PointSet& points, int shifts, std::uint64_t seed, int precision = 0);

struct ShiftAverage {
    long double mean = 0;
    long double std_error = 0;
};

// Monte Carlo average of the worst-case error over random digital shifts.
ShiftAverage sampled_mean_square_wce(const PointSet& points, const Weights& weights, int alpha, int shifts,
                                     std::uint64_t seed, int precision = 0);

}  // namespace hodn
