#include "speclab/spectra.hpp"

#include "speclab/lattice.hpp"
#include "speclab/weyl.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace speclab {

namespace {

constexpr std::uint64_t kBlock = 1ULL << 22;
constexpr std::uint64_t kWideBlock = 1ULL << 16;

void put_u64(std::ostream& out, std::uint64_t v) {
    std::array<char, 8> b{};
    for (int i = 0; i < 8; ++i) b[static_cast<std::size_t>(i)] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(b.data(), 8);
}

std::uint64_t get_u64(std::istream& in) {
    std::array<unsigned char, 8> b{};
    in.read(reinterpret_cast<char*>(b.data()), 8);
    if (!in) throw std::runtime_error("line table: truncated binary data");
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[static_cast<std::size_t>(i)];
    return v;
}

LineTable sphere_lines(int d, Convention conv, std::uint64_t q4_max) {
    std::vector<std::uint64_t> q4;
    std::vector<BigInt> mult;
    // binom(k + d, d) for k and k - 1, k - 2
    BigInt c_k = 1, c_km1 = 0, c_km2 = 0;
    for (std::uint64_t k = 0;; ++k) {
        if (k > 0) {
            c_km2 = c_km1;
            c_km1 = c_k;
            c_k = c_k * (k + static_cast<std::uint64_t>(d)) / k;
        }
        unsigned __int128 v;
        if (conv == Convention::Shifted) {
            const unsigned __int128 a = 2 * static_cast<unsigned __int128>(k) + static_cast<unsigned>(d) - 1;
            v = a * a;
        } else {
            v = 4 * static_cast<unsigned __int128>(k) * (k + static_cast<unsigned>(d) - 1);
        }
        if (v > q4_max) break;
        q4.push_back(static_cast<std::uint64_t>(v));
        mult.push_back(c_k - c_km2);
    }
    bool narrow = true;
    for (const auto& m : mult)
        if (m > std::numeric_limits<std::uint64_t>::max()) narrow = false;
    if (narrow) {
        std::vector<std::uint64_t> m64;
        m64.reserve(mult.size());
        for (const auto& m : mult) m64.push_back(m.convert_to<std::uint64_t>());
        return LineTable(std::move(q4), std::move(m64));
    }
    return LineTable(std::move(q4), std::move(mult));
}

LineTable torus_lines(int n, std::uint64_t q4_max, const EnumerationLimits& limits) {
    const std::uint64_t m_max = q4_max / 4;
    if (m_max > limits.max_torus_m)
        throw ResourceError("torus table up to |j|^2 = " + std::to_string(m_max) + " exceeds cap");
    const ShellTable t = rn_table(n, m_max);
    std::vector<std::uint64_t> q4;
    if (t.is_wide()) {
        std::vector<BigInt> mult;
        for (std::uint64_t m = 0; m <= m_max; ++m) {
            BigInt v = t[m];
            if (v != 0) {
                q4.push_back(4 * m);
                mult.push_back(std::move(v));
            }
        }
        return LineTable(std::move(q4), std::move(mult));
    }
    std::vector<std::uint64_t> mult;
    const auto& vals = t.narrow_values();
    for (std::uint64_t m = 0; m <= m_max; ++m) {
        if (vals[m] != 0) {
            q4.push_back(4 * m);
            mult.push_back(vals[m]);
        }
    }
    return LineTable(std::move(q4), std::move(mult));
}

// Index range of b's lines with q4 in [lo, hi).
std::pair<std::size_t, std::size_t> range_in(const std::vector<std::uint64_t>& q, std::uint64_t lo, std::uint64_t hi) {
    const auto first = std::lower_bound(q.begin(), q.end(), lo);
    const auto last = std::lower_bound(first, q.end(), hi);
    return {static_cast<std::size_t>(first - q.begin()), static_cast<std::size_t>(last - q.begin())};
}

struct BlockLines {
    std::vector<std::uint64_t> q4;
    std::vector<std::uint64_t> mult;
    std::vector<BigInt> wide;
    bool overflow = false;
};

// Output q4 in [lo, hi) of the convolution, dense accumulation.
BlockLines convolve_block_narrow(const LineTable& a, const LineTable& b, std::uint64_t lo, std::uint64_t hi) {
    BlockLines out;
    std::vector<std::uint64_t> acc(hi - lo, 0);
    const auto& qa = a.q4_values();
    const auto& qb = b.q4_values();
    for (std::size_t i = 0; i < qa.size() && qa[i] < hi; ++i) {
        const std::uint64_t base = qa[i];
        const std::uint64_t ma = a.mult64(i);
        const auto [j0, j1] = range_in(qb, lo > base ? lo - base : 0, hi - base);
        for (std::size_t j = j0; j < j1; ++j) {
            std::uint64_t prod;
            if (__builtin_mul_overflow(ma, b.mult64(j), &prod) ||
                __builtin_add_overflow(acc[base + qb[j] - lo], prod, &acc[base + qb[j] - lo])) {
                out.overflow = true;
                return out;
            }
        }
    }
    for (std::uint64_t k = 0; k < acc.size(); ++k) {
        if (acc[k] != 0) {
            out.q4.push_back(lo + k);
            out.mult.push_back(acc[k]);
        }
    }
    return out;
}

BlockLines convolve_block_wide(const LineTable& a, const LineTable& b, std::uint64_t lo, std::uint64_t hi) {
    BlockLines out;
    std::vector<BigInt> acc(hi - lo);
    const auto& qa = a.q4_values();
    const auto& qb = b.q4_values();
    for (std::size_t i = 0; i < qa.size() && qa[i] < hi; ++i) {
        const std::uint64_t base = qa[i];
        const BigInt ma = a.mult(i);
        const auto [j0, j1] = range_in(qb, lo > base ? lo - base : 0, hi - base);
        for (std::size_t j = j0; j < j1; ++j) acc[base + qb[j] - lo] += ma * b.mult(j);
    }
    for (std::uint64_t k = 0; k < acc.size(); ++k) {
        if (acc[k] != 0) {
            out.q4.push_back(lo + k);
            out.wide.push_back(std::move(acc[k]));
        }
    }
    return out;
}

std::uint64_t pair_count(const LineTable& a, const LineTable& b, std::uint64_t q4_max) {
    std::uint64_t pairs = 0;
    const auto& qb = b.q4_values();
    for (std::size_t i = 0; i < a.size() && a.q4(i) <= q4_max; ++i)
        pairs += static_cast<std::uint64_t>(std::upper_bound(qb.begin(), qb.end(), q4_max - a.q4(i)) - qb.begin());
    return pairs;
}

}  // namespace

std::string to_string(Convention c) { return c == Convention::Shifted ? "shifted" : "geometric"; }

Convention parse_convention(const std::string& text) {
    if (text == "shifted") return Convention::Shifted;
    if (text == "geometric") return Convention::Geometric;
    throw std::invalid_argument("unknown convention '" + text + "' (expected shifted|geometric)");
}

double SpectralLine::lambda() const { return 0.5 * std::sqrt(static_cast<double>(q4)); }

LineTable::LineTable(std::vector<std::uint64_t> q4, std::vector<std::uint64_t> mult)
    : q4_(std::move(q4)), narrow_(std::move(mult)) {
    if (q4_.size() != narrow_.size()) throw std::invalid_argument("LineTable: size mismatch");
    for (std::size_t i = 0; i < q4_.size(); ++i) {
        if (narrow_[i] == 0) throw std::invalid_argument("LineTable: zero multiplicity");
        if (i && q4_[i] <= q4_[i - 1]) throw std::invalid_argument("LineTable: q4 not strictly increasing");
    }
    build_prefix();
}

LineTable::LineTable(std::vector<std::uint64_t> q4, std::vector<BigInt> mult) : q4_(std::move(q4)), wide_(std::move(mult)) {
    if (q4_.size() != wide_.size()) throw std::invalid_argument("LineTable: size mismatch");
    for (std::size_t i = 0; i < q4_.size(); ++i) {
        if (wide_[i] <= 0) throw std::invalid_argument("LineTable: non-positive multiplicity");
        if (i && q4_[i] <= q4_[i - 1]) throw std::invalid_argument("LineTable: q4 not strictly increasing");
    }
    build_prefix();
}

void LineTable::build_prefix() {
    if (!is_wide()) {
        prefix_.resize(q4_.size());
        std::uint64_t s = 0;
        bool overflow = false;
        for (std::size_t i = 0; i < q4_.size(); ++i) {
            if (__builtin_add_overflow(s, narrow_[i], &s)) {
                overflow = true;
                break;
            }
            prefix_[i] = s;
        }
        if (!overflow) return;
        wide_.assign(narrow_.begin(), narrow_.end());
        narrow_.clear();
        prefix_.clear();
    }
    wide_prefix_.resize(q4_.size());
    BigInt s = 0;
    for (std::size_t i = 0; i < q4_.size(); ++i) {
        s += wide_[i];
        wide_prefix_[i] = s;
    }
}

double LineTable::mult_double(std::size_t i) const {
    return is_wide() ? wide_[i].convert_to<double>() : static_cast<double>(narrow_[i]);
}

std::vector<SpectralLine> LineTable::lines() const {
    std::vector<SpectralLine> out;
    out.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) out.push_back({q4_[i], mult(i)});
    return out;
}

std::size_t LineTable::upper_index(std::uint64_t bound) const {
    return static_cast<std::size_t>(std::upper_bound(q4_.begin(), q4_.end(), bound) - q4_.begin());
}

BigInt LineTable::count_upto(std::uint64_t bound) const {
    const std::size_t idx = upper_index(bound);
    if (idx == 0) return 0;
    return is_wide() ? wide_prefix_[idx - 1] : BigInt(prefix_[idx - 1]);
}

BigInt LineTable::count_between(std::uint64_t lo, std::uint64_t hi) const {
    if (lo > hi) return 0;
    BigInt c = count_upto(hi);
    if (lo > 0) c -= count_upto(lo - 1);
    return c;
}

BigInt LineTable::total() const {
    if (empty()) return 0;
    return is_wide() ? wide_prefix_.back() : BigInt(prefix_.back());
}

LineTable LineTable::truncated(std::uint64_t bound) const {
    const std::size_t idx = upper_index(bound);
    std::vector<std::uint64_t> q(q4_.begin(), q4_.begin() + static_cast<std::ptrdiff_t>(idx));
    if (is_wide()) return LineTable(std::move(q), std::vector<BigInt>(wide_.begin(), wide_.begin() + static_cast<std::ptrdiff_t>(idx)));
    return LineTable(std::move(q), std::vector<std::uint64_t>(narrow_.begin(), narrow_.begin() + static_cast<std::ptrdiff_t>(idx)));
}

void LineTable::write_csv(std::ostream& out) const {
    out << "q4,mult\n";
    for (std::size_t i = 0; i < size(); ++i) {
        out << q4_[i] << ',';
        if (is_wide()) out << wide_[i];
        else out << narrow_[i];
        out << '\n';
    }
}

void LineTable::write_binary(std::ostream& out) const {
    put_u64(out, size());
    put_u64(out, is_wide() ? 1 : 0);
    for (auto q : q4_) put_u64(out, q);
    if (!is_wide()) {
        for (auto m : narrow_) put_u64(out, m);
        return;
    }
    for (const auto& m : wide_) {
        const std::string s = m.str();
        put_u64(out, s.size());
        out.write(s.data(), static_cast<std::streamsize>(s.size()));
    }
}

LineTable LineTable::read_binary(std::istream& in) {
    const std::uint64_t n = get_u64(in);
    const std::uint64_t wide = get_u64(in);
    if (n > (1ULL << 34) || wide > 1) throw std::runtime_error("line table: corrupt header");
    std::vector<std::uint64_t> q(n);
    for (auto& v : q) v = get_u64(in);
    if (!wide) {
        std::vector<std::uint64_t> m(n);
        for (auto& v : m) v = get_u64(in);
        return LineTable(std::move(q), std::move(m));
    }
    std::vector<BigInt> m(n);
    for (auto& v : m) {
        const std::uint64_t len = get_u64(in);
        if (len > 100000) throw std::runtime_error("line table: corrupt multiplicity");
        std::string s(len, '\0');
        in.read(s.data(), static_cast<std::streamsize>(len));
        if (!in) throw std::runtime_error("line table: truncated binary data");
        v = BigInt(s);
    }
    return LineTable(std::move(q), std::move(m));
}

bool LineTable::operator==(const LineTable& other) const {
    if (q4_ != other.q4_) return false;
    for (std::size_t i = 0; i < size(); ++i)
        if (mult(i) != other.mult(i)) return false;
    return true;
}

Window::Window(const Rational& center, const Rational& halfwidth) {
    if (halfwidth < 0) throw std::domain_error("window halfwidth must be >= 0");
    if (center - halfwidth < 0) throw std::domain_error("window must satisfy center - halfwidth >= 0");
    lower_sq_ = (center - halfwidth) * (center - halfwidth);
    upper_sq_ = (center + halfwidth) * (center + halfwidth);
    finish();
}

Window Window::from_squared_bounds(const Rational& lower_sq, const Rational& upper_sq) {
    if (lower_sq < 0 || upper_sq < lower_sq) throw std::domain_error("window: need 0 <= lower^2 <= upper^2");
    Window w;
    w.lower_sq_ = lower_sq;
    w.upper_sq_ = upper_sq;
    w.finish();
    return w;
}

Window Window::inverse_width_at_root(std::uint64_t m) {
    if (m == 0) throw std::domain_error("inverse-width window needs m >= 1");
    const Rational inv(BigInt(1), BigInt(m));
    return from_squared_bounds(Rational(BigInt(m)) - 2 + inv, Rational(BigInt(m)) + 2 + inv);
}

void Window::finish() {
    const BigInt lo = ceil(4 * lower_sq_);
    const BigInt hi = floor(4 * upper_sq_);
    if (hi > BigInt(std::numeric_limits<std::uint64_t>::max())) throw ResourceError("window beyond 64-bit q4 range");
    q4_min_ = lo.convert_to<std::uint64_t>();
    q4_max_ = hi.convert_to<std::uint64_t>();
}

bool Window::contains(const Window& inner) const {
    return lower_sq_ <= inner.lower_sq_ && inner.upper_sq_ <= upper_sq_;
}

BigInt sphere_harmonic_dim(int d, std::uint64_t k) {
    if (d < 1) throw std::invalid_argument("sphere dimension must be positive");
    auto binom = [](std::uint64_t n, std::uint64_t r) -> BigInt {
        if (r > n) return 0;
        BigInt c = 1;
        for (std::uint64_t i = 1; i <= r; ++i) c = c * (n - r + i) / i;
        return c;
    };
    const auto du = static_cast<std::uint64_t>(d);
    const BigInt hi = binom(k + du, du);
    const BigInt lo = k >= 2 ? binom(k + du - 2, du) : BigInt(0);
    return hi - lo;
}

std::uint64_t q4_bound(const Rational& lambda) {
    if (lambda < 0) throw std::domain_error("spectral parameter must be >= 0");
    const BigInt q = floor(4 * lambda * lambda);
    if (q > BigInt(std::numeric_limits<std::uint64_t>::max() / 2)) throw ResourceError("lambda beyond 64-bit q4 range");
    return q.convert_to<std::uint64_t>();
}

LineTable convolve(const LineTable& a, const LineTable& b, std::uint64_t q4_max, const EnumerationLimits& limits) {
    if (a.empty() || b.empty()) return LineTable(std::vector<std::uint64_t>{}, std::vector<std::uint64_t>{});
    const std::uint64_t pairs = pair_count(a, b, q4_max);
    if (pairs > limits.max_pairs)
        throw ResourceError("convolution would examine " + std::to_string(pairs) + " pairs (cap " +
                            std::to_string(limits.max_pairs) + ")");
    const std::uint64_t lo0 = a.q4(0) + b.q4(0);
    if (lo0 > q4_max) return LineTable(std::vector<std::uint64_t>{}, std::vector<std::uint64_t>{});
    const std::uint64_t span = q4_max - lo0 + 1;

    auto run = [&](std::uint64_t block, bool wide) {
        const std::uint64_t blocks = (span + block - 1) / block;
        std::vector<BlockLines> parts(blocks);
        parallel_for(blocks, 1, [&](std::size_t b0, std::size_t b1) {
            for (std::size_t k = b0; k < b1; ++k) {
                const std::uint64_t lo = lo0 + k * block;
                const std::uint64_t hi = std::min(q4_max + 1, lo + block);
                parts[k] = wide ? convolve_block_wide(a, b, lo, hi) : convolve_block_narrow(a, b, lo, hi);
            }
        });
        return parts;
    };

    if (!a.is_wide() && !b.is_wide()) {
        auto parts = run(std::min(kBlock, limits.dense_q4), false);
        const bool overflow = std::any_of(parts.begin(), parts.end(), [](const BlockLines& p) { return p.overflow; });
        if (!overflow) {
            std::vector<std::uint64_t> q, m;
            for (auto& p : parts) {
                q.insert(q.end(), p.q4.begin(), p.q4.end());
                m.insert(m.end(), p.mult.begin(), p.mult.end());
            }
            return LineTable(std::move(q), std::move(m));
        }
    }
    auto parts = run(kWideBlock, true);
    std::vector<std::uint64_t> q;
    std::vector<BigInt> m;
    for (auto& p : parts) {
        q.insert(q.end(), p.q4.begin(), p.q4.end());
        for (auto& v : p.wide) m.push_back(std::move(v));
    }
    return LineTable(std::move(q), std::move(m));
}

LineTable enumerate_lines_q4(const ManifoldSpec& spec, Convention conv, std::uint64_t q4_max,
                             const EnumerationLimits& limits) {
    switch (spec.kind()) {
        case ManifoldSpec::Kind::Sphere: return sphere_lines(spec.dim(), conv, q4_max);
        case ManifoldSpec::Kind::Torus: return torus_lines(spec.dim(), q4_max, limits);
        case ManifoldSpec::Kind::Product: break;
    }
    const auto& f = spec.factors();
    LineTable acc = enumerate_lines_q4(f.front(), conv, q4_max, limits);
    for (std::size_t i = 1; i < f.size(); ++i)
        acc = convolve(acc, enumerate_lines_q4(f[i], conv, q4_max, limits), q4_max, limits);
    return acc;
}

LineTable enumerate_lines(const ManifoldSpec& spec, Convention conv, const Rational& lambda_max,
                          const EnumerationLimits& limits) {
    return enumerate_lines_q4(spec, conv, q4_bound(lambda_max), limits);
}

BigInt count_q4(const ManifoldSpec& spec, Convention conv, std::uint64_t q4_max, const EnumerationLimits& limits) {
    if (spec.kind() == ManifoldSpec::Kind::Torus) return ball_count_squared(spec.dim(), q4_max / 4);
    return enumerate_lines_q4(spec, conv, q4_max, limits).total();
}

BigInt count(const ManifoldSpec& spec, Convention conv, const Rational& lambda, const EnumerationLimits& limits) {
    return count_q4(spec, conv, q4_bound(lambda), limits);
}

BigInt window_count(const ManifoldSpec& spec, Convention conv, const Window& w, const EnumerationLimits& limits) {
    if (w.empty()) return 0;
    if (spec.kind() == ManifoldSpec::Kind::Torus) {
        // lines are q4 = 4m
        const std::uint64_t m_hi = w.q4_max() / 4;
        const std::uint64_t m_lo = (w.q4_min() + 3) / 4;
        if (m_lo > m_hi) return 0;
        BigInt c = ball_count_squared(spec.dim(), m_hi);
        if (m_lo > 0) c -= ball_count_squared(spec.dim(), m_lo - 1);
        return c;
    }
    return enumerate_lines_q4(spec, conv, w.q4_max(), limits).count_between(w.q4_min(), w.q4_max());
}

GapScan distinct_gap_scan(const ManifoldSpec& spec, Convention conv, const Rational& lambda_lo,
                          const Rational& lambda_hi, const EnumerationLimits& limits) {
    if (!(lambda_lo < lambda_hi)) throw std::invalid_argument("gap scan needs lambda_lo < lambda_hi");
    const LineTable t = enumerate_lines(spec, conv, lambda_hi, limits);
    const BigInt lo_big = ceil(4 * lambda_lo * lambda_lo);
    const std::uint64_t q_lo = lo_big.convert_to<std::uint64_t>();
    const auto& q = t.q4_values();
    const auto first = static_cast<std::size_t>(std::lower_bound(q.begin(), q.end(), q_lo) - q.begin());
    if (q.size() < first + 2) throw std::invalid_argument("gap scan: fewer than two eigenvalues in range");
    GapScan best;
    best.min_normalized_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = first; i + 1 < q.size(); ++i) {
        const long double a = std::sqrt(static_cast<long double>(q[i]));
        const long double b = std::sqrt(static_cast<long double>(q[i + 1]));
        // (lambda' - lambda) lambda with lambda = sqrt(q4)/2
        const long double g = static_cast<long double>(q[i + 1] - q[i]) / (2 * (a + b)) * (a / 2);
        if (g < best.min_normalized_gap) {
            best.min_normalized_gap = static_cast<double>(g);
            best.q4_lo = q[i];
            best.q4_hi = q[i + 1];
            best.lambda_lo = static_cast<double>(a / 2);
            best.lambda_hi = static_cast<double>(b / 2);
        }
    }
    return best;
}

BigInt product_count_convolution(const ManifoldSpec& x, const ManifoldSpec& y, Convention conv, const Rational& lambda,
                                 const EnumerationLimits& limits) {
    const std::uint64_t q4_max = q4_bound(lambda);
    const LineTable tx = enumerate_lines_q4(x, conv, q4_max, limits);
    BigInt total = 0;
    if (y.kind() == ManifoldSpec::Kind::Torus) {
        for (std::size_t i = 0; i < tx.size(); ++i)
            total += tx.mult(i) * ball_count_squared(y.dim(), (q4_max - tx.q4(i)) / 4);
        return total;
    }
    const LineTable ty = enumerate_lines_q4(y, conv, q4_max, limits);
    for (std::size_t i = 0; i < tx.size(); ++i) total += tx.mult(i) * ty.count_upto(q4_max - tx.q4(i));
    return total;
}

double projector_sup_ratio(const ManifoldSpec& spec, Convention conv, const Window& w, const EnumerationLimits& limits) {
    const BigInt c = window_count(spec, conv, w, limits);
    if (c == 0) return 0.0;
    return static_cast<double>(std::sqrt(to_long_double(c) / manifold_volume(spec).value()));
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

LineCache::LineCache(std::filesystem::path dir) : dir_(std::move(dir)) { std::filesystem::create_directories(dir_); }

std::string LineCache::key(const ManifoldSpec& spec, Convention conv, const Rational& lambda_max) {
    return "speclab-lines-v1|" + spec.str() + "|" + to_string(conv) + "|" + to_string(lambda_max);
}

std::filesystem::path LineCache::path_for(const std::string& key) const {
    std::ostringstream name;
    name << std::hex;
    name.width(16);
    name.fill('0');
    name << fnv1a64(key);
    return dir_ / ("lines-" + name.str() + ".bin");
}

std::optional<LineTable> LineCache::load(const std::string& key) const {
    std::ifstream in(path_for(key), std::ios::binary);
    if (!in) return std::nullopt;
    try {
        const std::uint64_t len = get_u64(in);
        if (len != key.size()) return std::nullopt;
        std::string stored(len, '\0');
        in.read(stored.data(), static_cast<std::streamsize>(len));
        if (!in || stored != key) return std::nullopt;
        return LineTable::read_binary(in);
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

void LineCache::store(const std::string& key, const LineTable& table) const {
    const auto path = path_for(key);
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write cache file " + tmp);
        put_u64(out, key.size());
        out.write(key.data(), static_cast<std::streamsize>(key.size()));
        table.write_binary(out);
    }
    std::filesystem::rename(tmp, path);
}

LineTable LineCache::enumerate(const ManifoldSpec& spec, Convention conv, const Rational& lambda_max,
                               const EnumerationLimits& limits) const {
    const std::string k = key(spec, conv, lambda_max);
    if (auto hit = load(k)) return std::move(*hit);
    LineTable t = enumerate_lines(spec, conv, lambda_max, limits);
    store(k, t);
    return t;
}

}  // namespace speclab
