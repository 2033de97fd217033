#include "hodn/cbc.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <unsupported/Eigen/FFT>

#include "hodn/digits.hpp"

namespace hodn {

namespace {

constexpr double unit_roundoff = std::numeric_limits<double>::epsilon() / 2;

struct BlockPlan {
    int j1;
    int d1;
};

BlockPlan plan_for(int r, int d) {
    int j1 = (r - 1) / d + 1;
    return {j1, r - d * (j1 - 1)};
}

inline std::uint8_t position_of(int b, int m, std::uint64_t y) {
    if (y == 0) return 0;
    if (b == 2) return std::uint8_t(m - (63 - __builtin_clzll(y)));
    return std::uint8_t(leading_position(b, m, y));
}

}  // namespace

Circulant::Circulant(Eigen::VectorXd col, std::size_t direct_below)
    : col_(std::move(col)), use_fft_(std::size_t(col_.size()) >= direct_below) {
    if (!use_fft_) return;
    Eigen::Index L = col_.size();
    padded_ = 4;
    while (padded_ < 2 * L - 1) padded_ <<= 1;
    std::vector<double> buf(std::size_t(padded_), 0.0);
    for (Eigen::Index i = 0; i < L; ++i) buf[std::size_t(i)] = col_[i];
    Eigen::FFT<double> fft;
    fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
    std::vector<std::complex<double>> spec;
    fft.fwd(spec, buf);
    col_hat_ = Eigen::Map<Eigen::VectorXcd>(spec.data(), Eigen::Index(spec.size()));
    col_hat_max_ = col_hat_.cwiseAbs().maxCoeff();
}

Eigen::VectorXd Circulant::apply(const Eigen::VectorXd& x, double* err_bound) const {
    const Eigen::Index L = col_.size();
    if (x.size() != L) throw std::invalid_argument("circulant size mismatch");
    Eigen::VectorXd y = Eigen::VectorXd::Zero(L);
    if (L == 0) {
        if (err_bound) *err_bound = 0;
        return y;
    }
    if (!use_fft_) {
        for (Eigen::Index i = 0; i < L; ++i) {
            double acc = 0;
            for (Eigen::Index n = 0; n <= i; ++n) acc += col_[i - n] * x[n];
            for (Eigen::Index n = i + 1; n < L; ++n) acc += col_[i - n + L] * x[n];
            y[i] = acc;
        }
        if (err_bound) *err_bound = 1.01 * double(L) * unit_roundoff * col_.cwiseAbs().maxCoeff() * x.lpNorm<1>();
        return y;
    }
    std::vector<double> buf(std::size_t(padded_), 0.0);
    for (Eigen::Index i = 0; i < L; ++i) buf[std::size_t(i)] = x[i];
    Eigen::FFT<double> fft;
    fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
    std::vector<std::complex<double>> spec;
    fft.fwd(spec, buf);
    double x_hat_max = 0;
    for (std::size_t k = 0; k < spec.size(); ++k) {
        x_hat_max = std::max(x_hat_max, std::abs(spec[k]));
        spec[k] *= col_hat_[Eigen::Index(k)];
    }
    std::vector<double> lin;
    fft.inv(lin, spec, padded_);
    double lin_norm = 0, lin_max = 0;
    for (double v : lin) {
        lin_norm += v * v;
        lin_max = std::max(lin_max, std::fabs(v));
    }
    lin_norm = std::sqrt(lin_norm);
    for (Eigen::Index i = 0; i < L; ++i) y[i] = lin[std::size_t(i)] + (i + L < padded_ ? lin[std::size_t(i + L)] : 0.0);
    if (err_bound) {
        double lg = std::log2(double(padded_));
        *err_bound = 2.0 * (6.0 * unit_roundoff * lg * (x.norm() * col_hat_max_ + x_hat_max * col_.norm() + lin_norm) +
                            2.0 * unit_roundoff * lin_max);
    }
    return y;
}

Eigen::VectorXd circulant_apply(const Eigen::VectorXd& col, const Eigen::VectorXd& x, double* err_bound,
                                std::size_t direct_below) {
    return Circulant(col, direct_below).apply(x, err_bound);
}

CbcState::CbcState(const CriterionParams& params, const Weights& weights, int m, std::uint64_t N)
    : params_(params), weights_(weights), m_(m), N_(N), Dt_(extended(dtilde(params))),
      chi_(chi_table<extended>(params, m)), A_(N, 0), e_(N, 0), U_(N, 0), W_(N, 0) {}

void CbcState::begin_component(int r) {
    if (r != r_ + 1) throw std::logic_error("components must be processed in order");
    auto [j1, d1] = plan_for(r, params_.d);
    if (j1 > weights_.dimension()) throw std::invalid_argument("weights do not cover all coordinates");
    r_ = r;
    j1_ = j1;
    d1_ = d1;
    if (d1 != 1) return;
    if (weights_.is_product()) {
        extended gD = extended(weights_.gamma_j(j1)) * Dt_;
        for (std::uint64_t n = 0; n < N_; ++n) {
            U_[n] = A_[n];
            W_[n] = (1 + A_[n]) * gD;
        }
        return;
    }
    const int prev = j1 - 1;
    const std::uint64_t subsets = std::uint64_t(1) << prev;
    const std::uint64_t last = std::uint64_t(1) << prev;
    std::vector<extended> gu(subsets), gul(subsets);
    std::vector<int> card(subsets);
    for (std::uint64_t u = 0; u < subsets; ++u) {
        card[u] = __builtin_popcountll(u);
        gu[u] = extended(weights_.gamma_u(u)) * int_power(Dt_, card[u]);
        gul[u] = extended(weights_.gamma_u(u | last)) * int_power(Dt_, card[u] + 1);
    }
    std::vector<extended> prod(subsets);
    for (std::uint64_t n = 0; n < N_; ++n) {
        prod[0] = 1;
        extended U = 0, W = gul[0];
        for (std::uint64_t u = 1; u < subsets; ++u) {
            int low = __builtin_ctzll(u);
            prod[u] = prod[u & (u - 1)] * blocks_[std::size_t(low)][n];
            U += gu[u] * prod[u];
            W += gul[u] * prod[u];
        }
        U_[n] = U;
        W_[n] = W;
    }
}

extended CbcState::evaluate(const std::vector<std::uint8_t>& pos) const {
    compensated_sum<extended> total;
    for (std::uint64_t n = 0; n < N_; ++n) {
        extended c = chi_[pos[n]];
        extended a = e_[n];
        accumulate_product_minus_one(a, c);
        total.add(U_[n] + W_[n] * a);
    }
    return total.value() / extended(N_);
}

void CbcState::commit(const std::vector<std::uint8_t>& pos) {
    const bool closes_block = d1_ == params_.d;
    if (!closes_block) {
        for (std::uint64_t n = 0; n < N_; ++n) accumulate_product_minus_one(e_[n], chi_[pos[n]]);
        return;
    }
    if (weights_.is_product()) {
        extended gD = extended(weights_.gamma_j(j1_)) * Dt_;
        for (std::uint64_t n = 0; n < N_; ++n) {
            extended a = e_[n];
            accumulate_product_minus_one(a, chi_[pos[n]]);
            accumulate_product_minus_one(A_[n], gD * a);
            e_[n] = 0;
        }
        return;
    }
    std::vector<extended> block(N_);
    for (std::uint64_t n = 0; n < N_; ++n) {
        extended a = e_[n];
        accumulate_product_minus_one(a, chi_[pos[n]]);
        block[n] = a;
        e_[n] = 0;
    }
    blocks_.push_back(std::move(block));
}

std::vector<double> CbcState::ranking_weights() const {
    std::vector<double> x(N_, 0.0);
    if (N_ < 2) return x;
    compensated_sum<extended> total;
    for (std::uint64_t n = 1; n < N_; ++n) total.add(W_[n] * (1 + e_[n]));
    const extended mean = total.value() / extended(N_ - 1);
    for (std::uint64_t n = 1; n < N_; ++n) x[n] = double(W_[n] * (1 + e_[n]) - mean);
    return x;
}

extended CbcState::tie_tolerance() const {
    extended chi_max = 0;
    for (auto c : chi_) chi_max = std::max(chi_max, abs_value(c));
    compensated_sum<extended> scale;
    for (std::uint64_t n = 0; n < N_; ++n) {
        extended e = abs_value(e_[n]);
        scale.add(abs_value(U_[n]) + abs_value(W_[n]) * (e + (1 + e) * chi_max));
    }
    return extended(1 << 20) * extended_epsilon() * scale.value() / extended(N_);
}

namespace {

struct Setup {
    GFPoly p;
    std::uint64_t N;
};

Setup prepare(int m, int s, const CriterionParams& params, const Weights& weights, const std::optional<GFPoly>& p) {
    params.validate();
    if (m < 1) throw std::invalid_argument("m must be positive");
    if (s < 1) throw std::invalid_argument("s must be positive");
    if (weights.dimension() < s) throw std::invalid_argument("weights do not cover all coordinates");
    std::uint64_t N = require_power(params.b, m);
    if (N > (std::uint64_t(1) << 40)) throw budget_exceeded("b^m too large");
    GFPoly mod = p ? *p : smallest_irreducible(params.b, m);
    if (mod.base() != params.b) throw std::invalid_argument("modulus base mismatch");
    if (mod.degree() != m) throw std::invalid_argument("deg(p) must equal m");
    return {mod, N};
}

ConstructionResult base_result(int m, int s, const CriterionParams& params, const Weights& weights, const GFPoly& p,
                               const char* mode, const CbcOptions& options) {
    ConstructionResult res;
    res.b = params.b;
    res.m = m;
    res.s = s;
    res.alpha = params.alpha;
    res.d = params.d;
    res.p = p;
    res.weights = weights.descriptor();
    if (weights.is_product()) res.weight_values = weights.product_values();
    res.mode = mode;
    res.lambda = options.lambda;
    return res;
}

void finish(ConstructionResult& res, const CriterionParams& params, const Weights& weights) {
    res.B_final = res.B_trace.empty() ? 0.0 : res.B_trace.back();
    for (int r = 1; r <= int(res.q.size()); ++r)
        res.bound_trace.push_back(double(cbc_error_bound(params, weights, res.m, r, res.lambda)));
    res.bound = res.bound_trace.empty() ? 0.0 : res.bound_trace.back();
}

std::uint64_t pick(const std::vector<std::pair<std::uint64_t, extended>>& scored, extended tie) {
    extended best = scored.front().second;
    for (auto& [q, v] : scored) best = std::min(best, v);
    std::uint64_t chosen = UINT64_MAX;
    for (auto& [q, v] : scored)
        if (v <= best + tie) chosen = std::min(chosen, q);
    return chosen;
}

}  // namespace

ConstructionResult cbc_construct_naive(int m, int s, const CriterionParams& params, const Weights& weights,
                                       const std::optional<GFPoly>& p, const CbcOptions& options) {
    auto [mod, N] = prepare(m, s, params, weights, p);
    const int ds = params.d * s;
    if (double(ds) * double(N) * double(N) > options.naive_budget)
        throw budget_exceeded("naive search needs ds*b^(2m) = " + std::to_string(double(ds) * double(N) * double(N)) +
                              " steps, above the budget");
    ConstructionResult res = base_result(m, s, params, weights, mod, "naive", options);

    std::vector<std::uint64_t> order = options.candidate_order;
    if (order.empty())
        for (std::uint64_t q = 1; q < N; ++q) order.push_back(q);
    {
        auto sorted = order;
        std::sort(sorted.begin(), sorted.end());
        for (std::uint64_t i = 0; i < sorted.size(); ++i)
            if (sorted.size() != N - 1 || sorted[i] != i + 1)
                throw std::invalid_argument("candidate order must be a permutation of 1..b^m-1");
    }

    CbcState state(params, weights, m, N);
    auto positions_for = [&](std::uint64_t qcode, std::vector<std::uint8_t>& pos) {
        PolyLattice lat{params.b, m, mod, {GFPoly::from_encoding(params.b, qcode)}};
        PointSet pts = generate_points(lat);
        for (std::uint64_t n = 0; n < N; ++n) pos[n] = position_of(params.b, m, pts.y(Eigen::Index(n), 0));
    };

    std::vector<std::uint8_t> pos(N);
    for (int r = 1; r <= ds; ++r) {
        state.begin_component(r);
        std::uint64_t chosen = 1;
        if (r > 1) {
            std::vector<std::pair<std::uint64_t, extended>> scored(order.size());
            std::size_t block = std::max<std::size_t>(1, order.size() / 64);
            parallel_blocks(order.size(), block, [&](std::size_t, std::size_t lo, std::size_t hi) {
                std::vector<std::uint8_t> local(N);
                for (std::size_t i = lo; i < hi; ++i) {
                    positions_for(order[i], local);
                    scored[i] = {order[i], state.evaluate(local)};
                }
            });
            chosen = pick(scored, state.tie_tolerance());
        }
        positions_for(chosen, pos);
        res.B_trace.push_back(double(state.evaluate(pos)));
        state.commit(pos);
        res.q.push_back(GFPoly::from_encoding(params.b, chosen));
    }
    finish(res, params, weights);
    return res;
}

ConstructionResult cbc_construct_fast(int m, int s, const CriterionParams& params, const Weights& weights,
                                      const std::optional<GFPoly>& p, const CbcOptions& options) {
    auto [mod, N] = prepare(m, s, params, weights, p);
    if (!weights.is_product()) throw std::invalid_argument("fast construction needs product weights");
    if (!is_irreducible(mod)) throw std::invalid_argument("fast construction needs an irreducible modulus");
    const int ds = params.d * s;
    const std::uint64_t L = N - 1;
    std::uint64_t M = 1;
    while (M < 2 * L - 1) M <<= 1;
    double bytes = double(N) * (8 + 8 + 8 + 8 + 1 + 4 * sizeof(extended)) + double(M) * 64;
    if (bytes > options.memory_budget)
        throw budget_exceeded("fast construction needs about " + std::to_string(bytes) + " bytes, above the budget");
    ConstructionResult res = base_result(m, s, params, weights, mod, "fast", options);

    Residues ring(mod);
    std::uint64_t g = primitive_element(mod).encoding();
    std::vector<std::uint64_t> pw(L), lg(N, 0);
    std::uint64_t cur = ring.reduce(1);
    for (std::uint64_t t = 0; t < L; ++t) {
        pw[t] = cur;
        lg[cur] = t;
        cur = ring.mul(cur, g);
    }
    std::vector<std::uint8_t> pos_of_power(L);
    for (std::uint64_t t = 0; t < L; ++t) pos_of_power[t] = std::uint8_t(m - ring.degree(pw[t]));

    CbcState state(params, weights, m, N);
    const auto chi_d = chi_table<double>(params, m);
    Eigen::VectorXd psi(static_cast<Eigen::Index>(L));
    for (std::uint64_t t = 0; t < L; ++t) psi[Eigen::Index(t)] = chi_d[pos_of_power[t]];
    Circulant circ(psi, options.direct_circulant_below);

    auto positions_for_power = [&](std::uint64_t i, std::vector<std::uint8_t>& pos) {
        pos[0] = 0;
        for (std::uint64_t n = 1; n < N; ++n) {
            std::uint64_t t = lg[n] + i;
            if (t >= L) t -= L;
            pos[n] = pos_of_power[t];
        }
    };

    std::vector<std::uint8_t> pos(N);
    for (int r = 1; r <= ds; ++r) {
        state.begin_component(r);
        std::uint64_t chosen_power = 0;
        if (r > 1) {
            auto w = state.ranking_weights();
            // x'[k] = w(g^{-k}) so that c = circulant(psi) * x'
            Eigen::VectorXd x(static_cast<Eigen::Index>(L));
            for (std::uint64_t k = 0; k < L; ++k) x[Eigen::Index(k)] = w[pw[k == 0 ? 0 : L - k]];
            double err = 0;
            Eigen::VectorXd c = circ.apply(x, &err);
            // rounding of x and psi themselves
            err += 2.02 * unit_roundoff * psi.cwiseAbs().maxCoeff() * x.lpNorm<1>();
            double cmin = c.minCoeff();
            double window = cmin + 2.0 * err + double(state.tie_tolerance()) * double(N);
            std::vector<std::pair<double, std::uint64_t>> shortlist;
            for (std::uint64_t i = 0; i < L; ++i)
                if (c[Eigen::Index(i)] <= window) shortlist.push_back({c[Eigen::Index(i)], i});
            if (shortlist.size() > options.max_shortlist) {
                std::sort(shortlist.begin(), shortlist.end(), [&](const auto& a, const auto& b2) {
                    if (a.first != b2.first) return a.first < b2.first;
                    return pw[a.second] < pw[b2.second];
                });
                shortlist.resize(std::max<std::size_t>(1, options.max_shortlist));
            }
            std::vector<std::pair<std::uint64_t, extended>> scored;
            std::vector<std::uint8_t> local(N);
            for (auto& [score, i] : shortlist) {
                positions_for_power(i, local);
                scored.push_back({pw[i], state.evaluate(local)});
            }
            std::uint64_t chosen = pick(scored, state.tie_tolerance());
            chosen_power = lg[chosen];
        }
        positions_for_power(chosen_power, pos);
        res.B_trace.push_back(double(state.evaluate(pos)));
        state.commit(pos);
        res.q.push_back(GFPoly::from_encoding(params.b, pw[chosen_power]));
    }
    finish(res, params, weights);
    return res;
}

long double cbc_bound_constant(const CriterionParams& params, long double lambda) {
    long double b = params.b;
    int mu = params.mu();
    long double first = std::pow((b - 1) / (std::pow(b, 2.0L * mu) - b), lambda);
    long double second = (b - 1) / (std::pow(b, 2.0L * lambda * mu) - b);
    return std::pow(b, -params.alpha * lambda) * std::max(first, second);
}

long double cbc_error_bound(const CriterionParams& params, const Weights& weights, int m, int r, long double lambda) {
    params.validate();
    if (!(lambda > 1.0L / (2 * params.mu()) && lambda <= 1.0L))
        throw std::invalid_argument("lambda must lie in (1/(2 min(alpha,d)), 1]");
    auto [j1, d1] = plan_for(r, params.d);
    if (weights.dimension() < j1) throw std::invalid_argument("weights do not cover all coordinates");
    long double C = cbc_bound_constant(params, lambda);
    long double Dl = std::pow(dtilde(params), lambda);
    auto G = [&](int a) { return Dl * (std::pow(1 + C, (long double)a) - 1); };
    long double Gd = G(params.d), Gd1 = G(d1);
    long double first = 0, second = 0;
    if (weights.is_product()) {
        long double prod = 1;
        for (int j = 1; j < j1; ++j) prod *= 1 + std::pow((long double)weights.gamma_j(j), lambda) * Gd;
        first = prod - 1;
        second = std::pow((long double)weights.gamma_j(j1), lambda) * prod;
    } else {
        std::uint64_t last = std::uint64_t(1) << (j1 - 1);
        for (std::uint64_t u = 0; u < last; ++u) {
            long double gp = std::pow(Gd, (long double)__builtin_popcountll(u));
            if (u) first += std::pow((long double)weights.gamma_u(u), lambda) * gp;
            second += std::pow((long double)weights.gamma_u(u | last), lambda) * gp;
        }
    }
    long double inner = first + Gd1 * second;
    long double N1 = int_power<long double>((long double)params.b, m) - 1;
    return std::pow(inner / N1, 1.0L / lambda);
}

}  // namespace hodn
