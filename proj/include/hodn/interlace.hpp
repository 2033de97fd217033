#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hodn/pointset.hpp"

namespace hodn {

// D_d: digit a of component j goes to position (a-1)d + j.
std::uint64_t interlace_point(int d, std::span<const std::uint64_t> ys, int b, int m);
PointSet interlace_net(int d, const PointSet& points);

// E_d: integer digit a of l_j goes to position a*d + j - 1.
std::uint64_t interlace_int(int d, std::span<const std::uint64_t> ls, int b);
std::vector<std::uint64_t> deinterlace_int(std::uint64_t k, int d, int b);

// mu_alpha(k): sum of the alpha largest nonzero digit positions.
int mu_weight(std::uint64_t k, int b, int alpha);

}  // namespace hodn
