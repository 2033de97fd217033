#include "hodn/criterion.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include "hodn/digits.hpp"
#include "hodn/interlace.hpp"

namespace hodn {

void CriterionParams::validate() const {
    require_prime_base(b);
    if (alpha < 2 || alpha > 12) throw std::invalid_argument("alpha must lie in 2..12");
    if (d < 1 || d > 16) throw std::invalid_argument("interlacing factor d must be positive");
}

Weights Weights::product(std::vector<double> gamma, std::string descriptor) {
    Weights w;
    for (double g : gamma)
        if (!(g >= 0) || !std::isfinite(g)) throw std::invalid_argument("weights must be finite and non-negative");
    w.product_ = true;
    w.s_ = int(gamma.size());
    w.gamma_ = std::move(gamma);
    w.descriptor_ = std::move(descriptor);
    return w;
}

Weights Weights::general(int s, std::map<std::uint64_t, double> by_mask, std::string descriptor) {
    if (s < 0 || s > 20) throw std::invalid_argument("general weights support at most 20 coordinates");
    Weights w;
    w.product_ = false;
    w.s_ = s;
    for (auto [mask, g] : by_mask) {
        if (!(g >= 0) || !std::isfinite(g)) throw std::invalid_argument("weights must be finite and non-negative");
        if (mask >> s) throw std::invalid_argument("weight subset exceeds dimension");
    }
    w.general_ = std::move(by_mask);
    w.descriptor_ = std::move(descriptor);
    return w;
}

Weights Weights::parse(const std::string& spec, int s) {
    if (s < 0) throw std::invalid_argument("negative dimension");
    auto to_double = [&](const std::string& t) {
        std::size_t pos = 0;
        double v = std::stod(t, &pos);
        if (pos != t.size()) throw std::invalid_argument("bad number '" + t + "' in weights '" + spec + "'");
        return v;
    };
    try {
        if (spec.rfind("j^", 0) == 0) {
            double e = to_double(spec.substr(2));
            std::vector<double> g;
            for (int j = 1; j <= s; ++j) g.push_back(std::pow(double(j), e));
            return product(g, spec);
        }
        if (spec.rfind("list:", 0) == 0) {
            std::vector<double> g;
            std::stringstream ss(spec.substr(5));
            for (std::string t; std::getline(ss, t, ',');) g.push_back(to_double(t));
            if (int(g.size()) < s)
                throw std::invalid_argument("weight list has " + std::to_string(g.size()) + " entries, need " + std::to_string(s));
            g.resize(std::size_t(s));
            return product(g, spec);
        }
        if (spec.rfind("general:@", 0) == 0) {
            std::string path = spec.substr(9);
            std::ifstream in(path);
            if (!in) throw malformed_input("cannot open weight file " + path);
            std::map<std::uint64_t, double> by_mask;
            std::string line;
            while (std::getline(in, line)) {
                auto hash = line.find('#');
                if (hash != std::string::npos) line.resize(hash);
                if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
                auto colon = line.find(':');
                if (colon == std::string::npos) throw malformed_input("weight line without ':' in " + path);
                std::uint64_t mask = 0;
                std::stringstream ss(line.substr(0, colon));
                for (std::string t; std::getline(ss, t, ',');) {
                    int j = std::stoi(t);
                    if (j < 1 || j > s) throw malformed_input("coordinate " + t + " out of range in " + path);
                    mask |= std::uint64_t(1) << (j - 1);
                }
                if (mask == 0) throw malformed_input("empty subset in " + path);
                std::string v = line.substr(colon + 1);
                v.erase(0, v.find_first_not_of(" \t"));
                v.erase(v.find_last_not_of(" \t\r") + 1);
                by_mask[mask] = to_double(v);
            }
            return general(s, by_mask, spec);
        }
        double c = to_double(spec);
        return product(std::vector<double>(std::size_t(s), c), spec);
    } catch (const std::invalid_argument&) {
        throw;
    } catch (const malformed_input&) {
        throw;
    } catch (const std::exception&) {
        throw std::invalid_argument("cannot parse weights '" + spec + "'");
    }
}

double Weights::gamma_j(int j) const {
    if (!product_) throw std::logic_error("gamma_j requires product weights");
    if (j < 1 || j > s_) throw std::out_of_range("weight index out of range");
    return gamma_[std::size_t(j - 1)];
}

double Weights::gamma_u(std::uint64_t mask) const {
    if (mask == 0) return 1.0;
    if (product_) {
        double g = 1.0;
        for (int j = 0; mask; ++j, mask >>= 1)
            if (mask & 1u) {
                if (j >= s_) throw std::out_of_range("weight subset exceeds dimension");
                g *= gamma_[std::size_t(j)];
            }
        return g;
    }
    auto it = general_.find(mask);
    return it == general_.end() ? 0.0 : it->second;
}

long double walsh_constant_C(int tau, int b) {
    long double two_sin = 2.0L * std::sin(std::numbers::pi_v<long double> / (long double)b);
    if (tau == 1) return 1.0L / two_sin;
    long double base = 1.0L + 1.0L / b + 1.0L / ((long double)b * (b + 1));
    return std::pow(base, (long double)(tau - 2)) / std::pow(two_sin, (long double)tau);
}

long double walsh_constant_Ctilde(int alpha, int b) {
    long double two_sin = 2.0L * std::sin(std::numbers::pi_v<long double> / (long double)b);
    long double base = 1.0L + 1.0L / b + 1.0L / ((long double)b * (b + 1));
    return 2.0L * std::pow(base, (long double)(2 * alpha - 2)) / std::pow(two_sin, (long double)(2 * alpha));
}

long double walsh_decay_constant(int alpha, int b) {
    if (alpha < 2) throw std::invalid_argument("alpha must be at least 2");
    long double best = 0;
    long double ct = walsh_constant_Ctilde(alpha, b);
    for (int nu = 1; nu <= alpha; ++nu) {
        long double cp = 0;
        for (int tau = nu; tau <= alpha; ++tau) {
            long double c = walsh_constant_C(tau, b);
            cp += c * c * int_power<long double>((long double)b, -2 * (tau - nu));
        }
        best = std::max(best, cp + ct * int_power<long double>((long double)b, -2 * (alpha - nu)));
    }
    return best;
}

long double dtilde(const CriterionParams& params) {
    return int_power<long double>((long double)params.b, (2 * params.d - 1) * params.alpha) *
           walsh_decay_constant(params.alpha, params.b);
}

int leading_position(int b, int precision, std::uint64_t y) {
    if (y == 0) return 0;
    int len = 0;
    while (y) {
        ++len;
        y /= std::uint64_t(b);
    }
    return precision - len + 1;
}

namespace {

struct BlockPlan {
    int j1;
    int d1;
};

BlockPlan plan_for(int r, int d) {
    int j1 = (r - 1) / d + 1;
    return {j1, r - d * (j1 - 1)};
}

}  // namespace

extended criterion_B_partial(const PointSet& points, int r, const Weights& weights, const CriterionParams& params) {
    params.validate();
    if (points.b != params.b) throw std::invalid_argument("point set base does not match criterion base");
    if (r < 1 || r > points.dim()) throw std::invalid_argument("partial dimension out of range");
    const int d = params.d;
    auto [j1, d1] = plan_for(r, d);
    if (weights.dimension() < j1) throw std::invalid_argument("weights do not cover all coordinates");
    const extended Dt = extended(dtilde(params));
    const auto table = chi_table<extended>(params, points.precision);
    const Eigen::Index N = points.size();

    std::vector<extended> gD;
    if (weights.is_product())
        for (int j = 1; j <= j1; ++j) gD.push_back(extended(weights.gamma_j(j)) * Dt);

    compensated_sum<extended> total;
    std::vector<extended> a(static_cast<std::size_t>(j1));
    for (Eigen::Index n = 0; n < N; ++n) {
        for (int j = 0; j < j1; ++j) {
            int width = j + 1 < j1 ? d : d1;
            extended e = 0;
            for (int l = 0; l < width; ++l) {
                int t = leading_position(points.b, points.precision, points.y(n, Eigen::Index(j * d + l)));
                accumulate_product_minus_one(e, table[std::size_t(t)]);
            }
            a[std::size_t(j)] = e;
        }
        extended term = 0;
        if (weights.is_product()) {
            for (int j = 0; j < j1; ++j) accumulate_product_minus_one(term, gD[std::size_t(j)] * a[std::size_t(j)]);
        } else {
            std::uint64_t full = std::uint64_t(1) << (j1 - 1);
            std::uint64_t last = std::uint64_t(1) << (j1 - 1);
            for (std::uint64_t u = 0; u < full; ++u) {
                extended prod = 1;
                int card = 0;
                for (int j = 0; j < j1 - 1; ++j)
                    if ((u >> j) & 1u) {
                        prod *= a[std::size_t(j)];
                        ++card;
                    }
                if (u) term += extended(weights.gamma_u(u)) * int_power(Dt, card) * prod;
                term += extended(weights.gamma_u(u | last)) * int_power(Dt, card + 1) * prod * a[std::size_t(j1 - 1)];
            }
        }
        total.add(term);
    }
    return total.value() / extended(N);
}

extended criterion_B(const PointSet& points, const Weights& weights, const CriterionParams& params) {
    return criterion_B_partial(points, int(points.dim()), weights, params);
}

long double r_weight(const CriterionParams& params, std::uint64_t l) {
    if (l == 0) return 1.0L;
    return int_power<long double>((long double)params.b, -2 * params.mu() * mu_weight(l, params.b, 1) - params.alpha);
}

long double r_weight_sum(const CriterionParams& params, long double lambda) {
    long double b = params.b;
    return (b - 1) / (std::pow(b, lambda * params.alpha) * (std::pow(b, 2 * lambda * params.mu()) - b));
}

long double r_weight_sum_multiples(const CriterionParams& params, long double lambda, int m) {
    long double b = params.b;
    return (b - 1) / (std::pow(b, 2 * lambda * params.mu() * m + lambda * params.alpha) *
                      (std::pow(b, 2 * lambda * params.mu()) - b));
}

DualOracleResult criterion_B_dual_oracle(const PolyLattice& lat, const Weights& weights, const CriterionParams& params,
                                          int cap) {
    params.validate();
    if (lat.b != params.b) throw std::invalid_argument("lattice base does not match criterion base");
    const int ds = lat.dim();
    if (ds % params.d != 0) throw std::invalid_argument("lattice dimension must be a multiple of d");
    if (ds > 16) throw std::invalid_argument("dual oracle limited to 16 coordinates");
    if (cap < lat.m) throw std::invalid_argument("cap must be at least m");
    const std::uint64_t M = require_power(lat.b, lat.m);
    const std::uint64_t top = require_power(lat.b, cap);

    std::vector<long double> S(M, 0.0L);
    for (std::uint64_t l = 1; l < top; ++l) S[l % M] += r_weight(params, l);
    long double R = r_weight_sum(params, 1.0L);
    long double head = 0;
    for (auto v : S) head += v;
    long double T = std::max(0.0L, R - head);

    Residues ring(lat.p);
    std::vector<std::uint64_t> q;
    for (const auto& g : lat.q) q.push_back(ring.reduce(g.encoding()));
    const long double Dt = dtilde(params);

    DualOracleResult out;
    for (std::uint64_t w = 1; w < (std::uint64_t(1) << ds); ++w) {
        std::vector<int> idx;
        std::uint64_t phi = 0;
        for (int r = 0; r < ds; ++r)
            if ((w >> r) & 1u) {
                idx.push_back(r);
                phi |= std::uint64_t(1) << (r / params.d);
            }
        long double coef = (long double)weights.gamma_u(phi) * int_power(Dt, __builtin_popcountll(phi));
        std::size_t k = idx.size();
        std::vector<std::uint64_t> t(k, 0);
        long double sum = 0;
        while (true) {
            std::uint64_t acc = 0;
            for (std::size_t i = 0; i < k; ++i) acc = digitwise_add(lat.b, acc, ring.mul(t[i], q[std::size_t(idx[i])]));
            if (acc == 0) {
                long double prod = 1;
                for (std::size_t i = 0; i < k; ++i) prod *= S[t[i]];
                sum += prod;
            }
            std::size_t i = 0;
            while (i < k && ++t[i] == M) t[i++] = 0;
            if (i == k) break;
        }
        out.value += coef * sum;
        out.tail_bound += coef * (std::pow(R, (long double)k) - std::pow(R - T, (long double)k));
    }
    return out;
}

long double bernoulli(int r, long double x) {
    switch (r) {
        case 0: return 1.0L;
        case 1: return x - 0.5L;
        case 2: return x * x - x + 1.0L / 6;
        case 3: return x * x * x - 1.5L * x * x + 0.5L * x;
        case 4: return x * x * x * x - 2 * x * x * x + x * x - 1.0L / 30;
        case 5: return std::pow(x, 5) - 2.5L * std::pow(x, 4) + 5.0L / 3 * x * x * x - x / 6;
        case 6: return std::pow(x, 6) - 3 * std::pow(x, 5) + 2.5L * std::pow(x, 4) - 0.5L * x * x + 1.0L / 42;
        default: throw std::invalid_argument("Bernoulli polynomial degree above 6");
    }
}

namespace {

long double factorial(int k) {
    long double f = 1;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

long double smooth_part(int alpha, long double x, long double y) {
    long double s = 0;
    for (int r = 1; r <= alpha; ++r) {
        long double f = factorial(r);
        s += bernoulli(r, x) * bernoulli(r, y) / (f * f);
    }
    return s;
}

long double rough_part(int alpha, long double x, long double y) {
    long double sign = (alpha % 2 == 1) ? 1.0L : -1.0L;
    return sign * bernoulli(2 * alpha, std::fabs(x - y)) / factorial(2 * alpha);
}

template <typename PairKernel>
long double weighted_pair_sum(const PointSet& points, const Weights& weights, PairKernel&& k) {
    const Eigen::Index N = points.size(), s = points.dim();
    if (weights.dimension() < s) throw std::invalid_argument("weights do not cover all coordinates");
    compensated_sum<long double> total;
    std::vector<long double> kv(static_cast<std::size_t>(s));
    for (Eigen::Index n = 0; n < N; ++n)
        for (Eigen::Index n2 = 0; n2 < N; ++n2) {
            for (Eigen::Index j = 0; j < s; ++j) kv[std::size_t(j)] = k(j, points.y(n, j), points.y(n2, j));
            long double term = 0;
            if (weights.is_product()) {
                for (Eigen::Index j = 0; j < s; ++j)
                    accumulate_product_minus_one(term, (long double)weights.gamma_j(int(j) + 1) * kv[std::size_t(j)]);
            } else {
                for (std::uint64_t u = 1; u < (std::uint64_t(1) << s); ++u) {
                    long double g = weights.gamma_u(u);
                    if (g == 0) continue;
                    long double prod = g;
                    for (Eigen::Index j = 0; j < s; ++j)
                        if ((u >> j) & 1u) prod *= kv[std::size_t(j)];
                    term += prod;
                }
            }
            total.add(term);
        }
    return total.value() / ((long double)N * (long double)N);
}

}  // namespace

long double sobolev_kernel_1d(int alpha, long double x, long double y) {
    return smooth_part(alpha, x, y) + rough_part(alpha, x, y);
}

long double kernel_wce_squared(const PointSet& points, const Weights& weights, int alpha) {
    long double scale = int_power<long double>((long double)points.b, -points.precision);
    return weighted_pair_sum(points, weights, [&](Eigen::Index, std::uint64_t a, std::uint64_t c) {
        return sobolev_kernel_1d(alpha, a * scale, c * scale);
    });
}

long double shifted_mean_square_wce(const PointSet& points, const Weights& weights, int alpha) {
    const int b = points.b, P = points.precision;
    const std::uint64_t cells = require_power(b, P);
    if (cells > (std::uint64_t(1) << 24)) throw std::invalid_argument("too many digital shifts for exhaustive averaging");
    const long double h = int_power<long double>((long double)b, -P);
    // four-point Gauss-Legendre rule on [0,1]
    const long double r1 = std::sqrt((3.0L - 2.0L * std::sqrt(6.0L / 5)) / 7), r2 = std::sqrt((3.0L + 2.0L * std::sqrt(6.0L / 5)) / 7);
    const long double w1 = (18.0L + std::sqrt(30.0L)) / 72, w2 = (18.0L - std::sqrt(30.0L)) / 72;
    const long double nodes[4] = {(1 - r2) / 2, (1 - r1) / 2, (1 + r1) / 2, (1 + r2) / 2};
    const long double wts[4] = {w2, w1, w1, w2};

    std::unordered_map<std::uint64_t, long double> cache;
    auto k_shift = [&](std::uint64_t delta) {
        auto it = cache.find(delta);
        if (it != cache.end()) return it->second;
        compensated_sum<long double> acc;
        for (std::uint64_t v = 0; v < cells; ++v) {
            std::uint64_t u = digitwise_add(b, v, delta);
            long double xu = u * h, xv = v * h;
            long double smooth = 0;
            for (int g = 0; g < 4; ++g) smooth += wts[g] * smooth_part(alpha, xu + nodes[g] * h, xv + nodes[g] * h);
            acc.add(smooth + rough_part(alpha, xu, xv));
        }
        long double val = acc.value() / (long double)cells;
        cache.emplace(delta, val);
        return val;
    };
    return weighted_pair_sum(points, weights, [&](Eigen::Index, std::uint64_t a, std::uint64_t c) {
        return k_shift(digitwise_add(b, a, c, -1));
    });
}

}  // namespace hodn
