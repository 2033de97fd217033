#include "hodn/pointset.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "hodn/digits.hpp"

namespace hodn {

double PointSet::coordinate(Eigen::Index n, Eigen::Index j) const {
    long double scale = int_power<long double>((long double)b, -precision);
    return double((long double)y(n, j) * scale);
}

Eigen::MatrixXd PointSet::to_real() const {
    long double scale = int_power<long double>((long double)b, -precision);
    Eigen::MatrixXd x(y.rows(), y.cols());
    for (Eigen::Index n = 0; n < y.rows(); ++n)
        for (Eigen::Index j = 0; j < y.cols(); ++j) x(n, j) = double((long double)y(n, j) * scale);
    return x;
}

PointSet PointSet::leading_columns(Eigen::Index r) const {
    PointSet out{b, precision, y.leftCols(r)};
    return out;
}

namespace {

void validate_lattice(const PolyLattice& lat) {
    require_prime_base(lat.b);
    if (lat.p.base() != lat.b) throw std::invalid_argument("modulus base mismatch");
    if (lat.m != lat.p.degree() && !(lat.m == 0 && lat.p.degree() <= 0))
        throw std::invalid_argument("deg(p) must equal m");
    for (const auto& q : lat.q) {
        if (q.base() != lat.b) throw std::invalid_argument("generator base mismatch");
        if (lat.m > 0 && q.degree() >= lat.m)
            throw std::invalid_argument("generating polynomial " + q.to_string() + " has degree >= m");
    }
    require_power(lat.b, lat.m);
}

// Fills column j of out by y[n] = y[n - kappa b^k] + kappa col_k, k the top digit of n.
void fill_from_columns(int b, int m, const std::vector<std::uint64_t>& cols, DigitMatrix& out, Eigen::Index j) {
    std::uint64_t N = require_power(b, m);
    out(0, j) = 0;
    if (b == 2) {
        for (std::uint64_t n = 1; n < N; ++n) {
            int k = 63 - __builtin_clzll(n);
            out(Eigen::Index(n), j) = out(Eigen::Index(n ^ (std::uint64_t(1) << k)), j) ^ cols[std::size_t(k)];
        }
        return;
    }
    std::vector<std::vector<std::uint64_t>> scaled(static_cast<std::size_t>(b));
    for (int kappa = 0; kappa < b; ++kappa)
        for (int k = 0; k < m; ++k) scaled[std::size_t(kappa)].push_back(digitwise_scale(b, cols[std::size_t(k)], kappa));
    std::uint64_t place = 1;
    int k = 0;
    for (std::uint64_t n = 1; n < N; ++n) {
        if (n == place * std::uint64_t(b)) {
            place *= std::uint64_t(b);
            ++k;
        }
        std::uint64_t kappa = n / place;
        std::uint64_t rest = n - kappa * place;
        out(Eigen::Index(n), j) = digitwise_add(b, out(Eigen::Index(rest), j), scaled[std::size_t(kappa)][std::size_t(k)]);
    }
}

std::vector<std::string> content_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw malformed_input("cannot open " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        auto pos = line.find_first_not_of(" \t\r");
        if (pos == std::string::npos || line[pos] == '#') continue;
        lines.push_back(line);
    }
    return lines;
}

}  // namespace

std::vector<std::uint64_t> generating_columns(const PolyLattice& lat, int j) {
    validate_lattice(lat);
    std::vector<std::uint64_t> cols;
    if (lat.m == 0) return cols;
    Residues ring(lat.p);
    std::uint64_t q = lat.q[std::size_t(j)].encoding();
    std::uint64_t xk = ring.reduce(1);
    std::uint64_t x = ring.reduce(std::uint64_t(lat.b));
    for (int k = 0; k < lat.m; ++k) {
        cols.push_back(ring.laurent_value(ring.mul(xk, q)));
        xk = ring.mul(xk, x);
    }
    return cols;
}

PointSet generate_points(const PolyLattice& lat) {
    validate_lattice(lat);
    std::uint64_t N = require_power(lat.b, lat.m);
    PointSet out;
    out.b = lat.b;
    out.precision = lat.m;
    out.y = DigitMatrix::Zero(Eigen::Index(N), lat.dim());
    if (lat.m == 0) return out;
    for (int j = 0; j < lat.dim(); ++j) fill_from_columns(lat.b, lat.m, generating_columns(lat, j), out.y, j);
    return out;
}

std::uint64_t lattice_point_direct(const PolyLattice& lat, std::uint64_t n, int j) {
    GFPoly nx = GFPoly::from_encoding(lat.b, n);
    auto u = laurent_digits(nx * lat.q[std::size_t(j)], lat.p, lat.m);
    return from_fixed_digits(lat.b, u);
}

bool dual_contains(const PolyLattice& lat, std::span<const std::uint64_t> k) {
    validate_lattice(lat);
    if (k.size() != lat.q.size()) throw std::invalid_argument("dual vector dimension mismatch");
    GFPoly acc(lat.b);
    for (std::size_t j = 0; j < k.size(); ++j) acc = acc + truncate_integer(lat.b, k[j], lat.m) * lat.q[j];
    return (acc % lat.p).is_zero();
}

int walsh_phase(int b, std::uint64_t k, std::uint64_t y, int precision) {
    auto kd = integer_digits(b, k);
    int phase = 0;
    for (std::size_t a = 0; a < kd.size() && int(a) < precision; ++a)
        phase += kd[a] * fixed_digit(b, precision, y, int(a) + 1);
    return phase % b;
}

std::complex<double> walsh(int b, std::uint64_t k, std::uint64_t y, int precision) {
    double angle = 2.0 * std::numbers::pi * walsh_phase(b, k, y, precision) / b;
    return {std::cos(angle), std::sin(angle)};
}

double character_sum(const PointSet& points, std::span<const std::uint64_t> k) {
    if (Eigen::Index(k.size()) != points.dim()) throw std::invalid_argument("wavenumber dimension mismatch");
    std::vector<std::uint64_t> hist(std::size_t(points.b), 0);
    for (Eigen::Index n = 0; n < points.size(); ++n) {
        int phase = 0;
        for (Eigen::Index j = 0; j < points.dim(); ++j)
            phase += walsh_phase(points.b, k[std::size_t(j)], points.y(n, j), points.precision);
        ++hist[std::size_t(phase % points.b)];
    }
    std::complex<double> s = 0;
    for (int t = 0; t < points.b; ++t) {
        double angle = 2.0 * std::numbers::pi * t / points.b;
        s += double(hist[std::size_t(t)]) * std::complex<double>(std::cos(angle), std::sin(angle));
    }
    return s.real() / double(points.size());
}

PointSet digital_net(int b, int m, const std::vector<Eigen::MatrixXi>& matrices) {
    require_prime_base(b);
    std::uint64_t N = require_power(b, m);
    PointSet out;
    out.b = b;
    out.precision = m;
    out.y = DigitMatrix::Zero(Eigen::Index(N), Eigen::Index(matrices.size()));
    if (m == 0) return out;
    for (std::size_t j = 0; j < matrices.size(); ++j) {
        const auto& C = matrices[j];
        if (C.rows() < m || C.cols() < m) throw std::invalid_argument("generating matrix smaller than m x m");
        std::vector<std::uint64_t> cols;
        for (int k = 0; k < m; ++k) {
            std::uint64_t v = 0;
            for (int i = 0; i < m; ++i) {
                int c = ((C(i, k) % b) + b) % b;
                v = v * std::uint64_t(b) + std::uint64_t(c);
            }
            cols.push_back(v);
        }
        fill_from_columns(b, m, cols, out.y, Eigen::Index(j));
    }
    return out;
}

std::vector<Eigen::MatrixXi> sobol_matrices(const std::string& path, int dim, int m) {
    if (m > 62) throw std::invalid_argument("m too large for Sobol' matrices");
    std::vector<Eigen::MatrixXi> out;
    if (dim <= 0) return out;
    out.push_back(Eigen::MatrixXi::Identity(m, m));
    if (dim == 1) return out;
    auto lines = content_lines(path);
    std::size_t li = 0;
    if (li < lines.size() && lines[li].find_first_of("dD") != std::string::npos &&
        lines[li].find_first_of("0123456789") == std::string::npos)
        ++li;
    for (int j = 2; j <= dim; ++j, ++li) {
        if (li >= lines.size())
            throw malformed_input("direction number file has only " + std::to_string(j - 1) + " dimensions");
        std::istringstream is(lines[li]);
        long long d = 0, s = 0, a = 0;
        if (!(is >> d >> s >> a) || s < 1 || s > 62 || a < 0)
            throw malformed_input("bad direction number row: " + lines[li]);
        std::vector<std::uint64_t> mv;
        for (long long i = 0; i < s; ++i) {
            long long v;
            if (!(is >> v) || v <= 0 || v % 2 == 0 || v >= (1LL << (i + 1)))
                throw malformed_input("bad direction number in row: " + lines[li]);
            mv.push_back(std::uint64_t(v));
        }
        for (int k = int(s); k < m; ++k) {
            std::uint64_t v = mv[std::size_t(k - s)] ^ (mv[std::size_t(k - s)] << s);
            for (int t = 1; t < s; ++t)
                if ((a >> (s - 1 - t)) & 1) v ^= mv[std::size_t(k - t)] << t;
            mv.push_back(v);
        }
        Eigen::MatrixXi C = Eigen::MatrixXi::Zero(m, m);
        for (int k = 0; k < m; ++k)
            for (int i = 0; i <= k; ++i) C(i, k) = int((mv[std::size_t(k)] >> (k - i)) & 1u);
        out.push_back(C);
    }
    return out;
}

std::vector<Eigen::MatrixXi> read_generating_matrices(const std::string& path, int& b, int dim, int m) {
    auto lines = content_lines(path);
    std::ostringstream joined;
    for (auto& l : lines) joined << l << '\n';
    std::istringstream is(joined.str());
    int fm = 0, fs = 0;
    if (!(is >> b >> fm >> fs) || fm < 0 || fs < 0) throw malformed_input("bad generating matrix header in " + path);
    require_prime_base(b);
    if (dim > fs) throw malformed_input("file holds " + std::to_string(fs) + " coordinates, requested " + std::to_string(dim));
    if (m > fm) throw malformed_input("file holds " + std::to_string(fm) + "x" + std::to_string(fm) + " matrices, requested m=" + std::to_string(m));
    std::vector<Eigen::MatrixXi> out;
    for (int j = 0; j < fs; ++j) {
        Eigen::MatrixXi C(fm, fm);
        for (int i = 0; i < fm; ++i)
            for (int k = 0; k < fm; ++k) {
                int v;
                if (!(is >> v) || v < 0 || v >= b) throw malformed_input("bad generating matrix entry in " + path);
                C(i, k) = v;
            }
        if (j < dim) out.push_back(C.topLeftCorner(m, m));
    }
    return out;
}

PointSet load_external_net(const std::string& path, int dim, int m) {
    auto lines = content_lines(path);
    if (lines.empty()) throw malformed_input("empty net file " + path);
    std::istringstream first(lines[0]);
    std::vector<std::string> tok;
    for (std::string t; first >> t;) tok.push_back(t);
    if (tok.size() != 3) return digital_net(2, m, sobol_matrices(path, dim, m));
    int b = 2;
    auto mats = read_generating_matrices(path, b, dim, m);
    return digital_net(b, m, mats);
}

void save_points_csv(const PointSet& points, const std::string& path, const std::string& comment) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    int digits = int(std::ceil(points.precision * std::log10(double(points.b)))) + 2;
    out << "# b=" << points.b << " precision=" << points.precision << " dim=" << points.dim()
        << " n=" << points.size() << '\n';
    if (!comment.empty()) out << "# " << comment << '\n';
    long double scale = int_power<long double>((long double)points.b, -points.precision);
    char buf[96];
    for (Eigen::Index n = 0; n < points.size(); ++n) {
        for (Eigen::Index j = 0; j < points.dim(); ++j) {
            std::snprintf(buf, sizeof buf, "%.*Lf", digits, (long double)points.y(n, j) * scale);
            if (j) out << ',';
            out << buf;
        }
        out << '\n';
    }
}

namespace {

void put_u64(std::ostream& out, std::uint64_t v) {
    unsigned char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(bytes), 8);
}

bool get_u64(std::istream& in, std::uint64_t& v) {
    unsigned char bytes[8];
    if (!in.read(reinterpret_cast<char*>(bytes), 8)) return false;
    v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | bytes[i];
    return true;
}

}  // namespace

void save_points_binary(const PointSet& points, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    put_u64(out, std::uint64_t(points.b));
    put_u64(out, std::uint64_t(points.precision));
    put_u64(out, std::uint64_t(points.dim()));
    put_u64(out, std::uint64_t(points.size()));
    for (Eigen::Index n = 0; n < points.size(); ++n)
        for (Eigen::Index j = 0; j < points.dim(); ++j) put_u64(out, points.y(n, j));
}

PointSet load_points(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw malformed_input("cannot open " + path);
    int c = in.peek();
    PointSet ps;
    if (c == '#') {
        std::string header;
        std::getline(in, header);
        long long b = 0, prec = -1, dim = -1, n = -1;
        if (std::sscanf(header.c_str(), "# b=%lld precision=%lld dim=%lld n=%lld", &b, &prec, &dim, &n) != 4 || prec < 0 ||
            dim < 0 || n < 0)
            throw malformed_input("bad CSV point header in " + path);
        require_prime_base(int(b));
        ps.b = int(b);
        ps.precision = int(prec);
        std::uint64_t full = require_power(ps.b, ps.precision);
        long double scale = int_power<long double>((long double)b, int(prec));
        ps.y = DigitMatrix::Zero(n, dim);
        std::string line;
        for (long long i = 0; i < n; ++i) {
            do {
                if (!std::getline(in, line)) throw malformed_input("CSV point file truncated: " + path);
            } while (!line.empty() && line[0] == '#');
            std::istringstream ls(line);
            for (long long j = 0; j < dim; ++j) {
                std::string cell;
                if (!std::getline(ls, cell, ',')) throw malformed_input("CSV row too short in " + path);
                char* end = nullptr;
                long double x = std::strtold(cell.c_str(), &end);
                if (end == cell.c_str() || x < 0 || x >= 1) throw malformed_input("bad coordinate '" + cell + "'");
                long double v = std::nearbyint(x * scale);
                std::uint64_t iv = std::uint64_t(v);
                if (iv >= full) throw malformed_input("coordinate out of range '" + cell + "'");
                ps.y(i, j) = iv;
            }
        }
        return ps;
    }
    std::uint64_t b, prec, dim, n;
    if (!get_u64(in, b) || !get_u64(in, prec) || !get_u64(in, dim) || !get_u64(in, n))
        throw malformed_input("truncated point header in " + path);
    if (b < 2 || b > 251 || !is_prime(b) || prec > 64 || dim > (1u << 20) || n > (std::uint64_t(1) << 40))
        throw malformed_input("bad binary point header in " + path);
    ps.b = int(b);
    ps.precision = int(prec);
    std::uint64_t full = require_power(ps.b, ps.precision);
    ps.y = DigitMatrix::Zero(Eigen::Index(n), Eigen::Index(dim));
    for (std::uint64_t i = 0; i < n; ++i)
        for (std::uint64_t j = 0; j < dim; ++j) {
            std::uint64_t v;
            if (!get_u64(in, v)) throw malformed_input("binary point file truncated: " + path);
            if (v >= full) throw malformed_input("binary point value out of range in " + path);
            ps.y(Eigen::Index(i), Eigen::Index(j)) = v;
        }
    return ps;
}

}  // namespace hodn
