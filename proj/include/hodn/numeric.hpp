#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <string>
#include <thread>
#include <vector>

namespace hodn {

#if defined(__SIZEOF_FLOAT128__) && !defined(HODN_NO_FLOAT128)
using extended = __float128;
#else
using extended = long double;
#endif

inline constexpr extended extended_epsilon() {
#if defined(__SIZEOF_FLOAT128__) && !defined(HODN_NO_FLOAT128)
    // 2^-112
    extended e = 1;
    for (int i = 0; i < 112; ++i) e /= 2;
    return e;
#else
    return std::numeric_limits<long double>::epsilon();
#endif
}

template <typename Scalar>
Scalar abs_value(Scalar x) {
    return x < Scalar(0) ? -x : x;
}

template <typename Scalar>
Scalar int_power(Scalar base, int e) {
    Scalar r(1);
    bool neg = e < 0;
    unsigned k = neg ? unsigned(-e) : unsigned(e);
    Scalar p = base;
    while (k) {
        if (k & 1u) r *= p;
        p *= p;
        k >>= 1;
    }
    return neg ? Scalar(1) / r : r;
}

// Neumaier variant of compensated summation.
template <typename Scalar>
class compensated_sum {
public:
    void add(Scalar x) {
        Scalar t = sum_ + x;
        if (abs_value(sum_) >= abs_value(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    Scalar value() const { return sum_ + comp_; }

private:
    Scalar sum_{0};
    Scalar comp_{0};
};

// acc holds (prod - 1); multiplies prod by (1 + x).
template <typename Scalar>
inline void accumulate_product_minus_one(Scalar& acc, Scalar x) {
    acc = acc + x + acc * x;
}

inline std::uint64_t checked_power(std::uint64_t b, int e) {
    std::uint64_t r = 1;
    for (int i = 0; i < e; ++i) {
        if (r > UINT64_MAX / b) return 0;
        r *= b;
    }
    return r;
}

inline int thread_count() {
    if (const char* env = std::getenv("HODN_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : int(hc);
}

// Runs fn(begin, end) over fixed blocks; block boundaries do not depend on the
// thread count, so per-block reductions are reproducible.
inline void parallel_blocks(std::size_t count, std::size_t block,
                            const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
    if (count == 0) return;
    if (block == 0) block = 1;
    std::size_t nblocks = (count + block - 1) / block;
    int threads = std::min<int>(thread_count(), int(nblocks));
    auto run = [&](std::size_t first_block, std::size_t stride) {
        for (std::size_t k = first_block; k < nblocks; k += stride)
            fn(k, k * block, std::min(count, (k + 1) * block));
    };
    if (threads <= 1) {
        run(0, 1);
        return;
    }
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(run, std::size_t(t), std::size_t(threads));
    for (auto& th : pool) th.join();
}

std::string format_sci(double v, int sig = 3);
std::string format_full(double v);

}  // namespace hodn
