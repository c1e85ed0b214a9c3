#include "speclab/lattice.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <span>

namespace speclab {

namespace {

void require_dim(int n) {
    if (n < 1) throw std::invalid_argument("lattice dimension must be positive");
}

// (2 sqrt(m) + 1)^n as a double; bounds every r_n(k), k <= m, and the ball count.
double ball_bound(int n, std::uint64_t m) {
    return std::pow(2.0 * std::sqrt(static_cast<double>(m)) + 1.0, n);
}

std::uint64_t factorial(int n) {
    std::uint64_t f = 1;
    for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
    return f;
}

// Signed permutations of a sorted non-negative tuple.
std::uint64_t orbit_size(std::span<const std::uint64_t> sorted, std::uint64_t n_factorial) {
    std::uint64_t w = n_factorial;
    std::size_t run = 1;
    int nonzero = sorted[0] != 0 ? 1 : 0;
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i] != 0) ++nonzero;
        if (sorted[i] == sorted[i - 1]) {
            ++run;
        } else {
            w /= factorial(static_cast<int>(run));
            run = 1;
        }
    }
    w /= factorial(static_cast<int>(run));
    return w << nonzero;
}

struct Enumerator {
    int n;
    std::uint64_t cap;
    std::uint64_t work = 0;
    std::uint64_t n_factorial;
    std::vector<std::uint64_t> tuple;

    Enumerator(int n_, std::uint64_t cap_) : n(n_), cap(cap_), n_factorial(factorial(n_)), tuple(n_) {}

    void tick() {
        if (++work > cap) throw ResourceError("lattice enumeration exceeded work cap");
    }

    // Exactly |j|^2 = target: coordinates i..n-1 non-decreasing from `lo`.
    std::uint64_t on_shell(int i, std::uint64_t lo, std::uint64_t rem) {
        if (i == n - 1) {
            tick();
            const std::uint64_t r = isqrt(rem);
            if (r * r != rem || r < lo) return 0;
            tuple[i] = r;
            return orbit_size(tuple, n_factorial);
        }
        std::uint64_t total = 0;
        const auto left = static_cast<std::uint64_t>(n - i);
        for (std::uint64_t j = lo; j * j * left <= rem; ++j) {
            tuple[i] = j;
            total += on_shell(i + 1, j, rem - j * j);
        }
        return total;
    }

    // All |j|^2 <= budget; adds orbit weights into hist[|j|^2].
    void in_ball(int i, std::uint64_t lo, std::uint64_t used, std::uint64_t budget, std::vector<std::uint64_t>& hist) {
        const auto left = static_cast<std::uint64_t>(n - i);
        for (std::uint64_t j = lo; used + j * j * left <= budget; ++j) {
            tuple[i] = j;
            if (i == n - 1) {
                tick();
                hist[used + j * j] += orbit_size(tuple, n_factorial);
            } else {
                in_ball(i + 1, j, used + j * j, budget, hist);
            }
        }
    }
};

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod(r, a, m);
        a = mulmod(a, a, m);
        e >>= 1;
    }
    return r;
}

// Brent's variant of Pollard rho; returns a non-trivial factor of composite n.
std::uint64_t pollard_brent(std::uint64_t n) {
    if (n % 2 == 0) return 2;
    for (std::uint64_t c = 1;; ++c) {
        auto f = [&](std::uint64_t x) { return (mulmod(x, x, n) + c) % n; };
        std::uint64_t y = 2, x = 2, g = 1, q = 1, ys = 2;
        std::uint64_t r = 1;
        constexpr std::uint64_t m = 128;
        do {
            x = y;
            for (std::uint64_t i = 0; i < r; ++i) y = f(y);
            std::uint64_t k = 0;
            do {
                ys = y;
                for (std::uint64_t i = 0; i < std::min(m, r - k); ++i) {
                    y = f(y);
                    q = mulmod(q, x > y ? x - y : y - x, n);
                }
                g = std::gcd(q, n);
                k += m;
            } while (k < r && g == 1);
            r <<= 1;
        } while (g == 1);
        if (g == n) {
            do {
                ys = f(ys);
                g = std::gcd(x > ys ? x - ys : ys - x, n);
            } while (g == 1);
        }
        if (g != n) return g;
    }
}

void split(std::uint64_t n, std::vector<std::uint64_t>& primes) {
    if (n == 1) return;
    if (is_prime(n)) {
        primes.push_back(n);
        return;
    }
    const std::uint64_t d = pollard_brent(n);
    split(d, primes);
    split(n / d, primes);
}

}  // namespace

ShellTable::ShellTable(int n, std::uint64_t m_max, std::vector<std::uint64_t> values)
    : n_(n), m_max_(m_max), narrow_(std::move(values)) {
    if (narrow_.size() != m_max_ + 1) throw std::invalid_argument("ShellTable: size mismatch");
}

ShellTable::ShellTable(int n, std::uint64_t m_max, std::vector<BigInt> values)
    : n_(n), m_max_(m_max), wide_(std::move(values)) {
    if (wide_.size() != m_max_ + 1) throw std::invalid_argument("ShellTable: size mismatch");
}

BigInt ShellTable::operator[](std::uint64_t m) const {
    if (m > m_max_) throw std::out_of_range("ShellTable: index beyond m_max");
    return is_wide() ? wide_[m] : BigInt(narrow_[m]);
}

std::uint64_t ShellTable::narrow(std::uint64_t m) const {
    if (is_wide()) throw std::overflow_error("ShellTable: table holds arbitrary-precision entries");
    return narrow_.at(m);
}

BigInt ShellTable::cumulative(std::uint64_t m) const {
    m = std::min(m, m_max_);
    BigInt sum = 0;
    if (is_wide()) {
        for (std::uint64_t i = 0; i <= m; ++i) sum += wide_[i];
    } else {
        unsigned __int128 s = 0;
        for (std::uint64_t i = 0; i <= m; ++i) s += narrow_[i];
        sum = BigInt(static_cast<std::uint64_t>(s >> 64));
        sum <<= 64;
        sum += static_cast<std::uint64_t>(s);
    }
    return sum;
}

void ShellTable::write_csv(std::ostream& out) const {
    out << "m,count\n";
    for (std::uint64_t m = 0; m <= m_max_; ++m) {
        out << m << ',';
        if (is_wide()) out << wide_[m];
        else out << narrow_[m];
        out << '\n';
    }
}

bool ShellTable::operator==(const ShellTable& other) const {
    if (n_ != other.n_ || m_max_ != other.m_max_) return false;
    for (std::uint64_t m = 0; m <= m_max_; ++m)
        if ((*this)[m] != other[m]) return false;
    return true;
}

std::uint64_t Factorization::value() const {
    std::uint64_t v = 1;
    for (auto [p, e] : factors)
        for (int i = 0; i < e; ++i) v *= p;
    return v;
}

std::uint64_t rn_bruteforce(int n, std::uint64_t m, std::uint64_t cap) {
    require_dim(n);
    if (n > 20) throw std::invalid_argument("rn_bruteforce: n > 20 unsupported");
    if (m > (1ULL << 62)) throw ResourceError("rn_bruteforce: m too large");
    Enumerator e(n, cap);
    return e.on_shell(0, 0, m);
}

std::vector<std::uint64_t> rn_bruteforce_table(int n, std::uint64_t m_max, std::uint64_t cap) {
    require_dim(n);
    if (n > 20) throw std::invalid_argument("rn_bruteforce_table: n > 20 unsupported");
    if (m_max > (1ULL << 32)) throw ResourceError("rn_bruteforce_table: m_max too large");
    std::vector<std::uint64_t> hist(m_max + 1, 0);
    Enumerator e(n, cap);
    e.in_ball(0, 0, 0, m_max, hist);
    return hist;
}

ShellTable rn_table(int n, std::uint64_t m_max) {
    require_dim(n);
    if (m_max > (1ULL << 34)) throw ResourceError("rn_table: m_max exceeds memory cap");
    const std::uint64_t root = isqrt(m_max);
    const bool narrow = ball_bound(n, m_max) < 9.0e18;

    if (narrow) {
        std::vector<std::uint64_t> base(m_max + 1, 0);
        base[0] = 1;
        for (std::uint64_t k = 1; k <= root; ++k) base[k * k] = 2;
        std::vector<std::uint64_t> cur = base;
        for (int dim = 2; dim <= n; ++dim) {
            std::vector<std::uint64_t> next(m_max + 1);
            parallel_for(m_max + 1, 1 << 16, [&](std::size_t lo, std::size_t hi) {
                std::copy(cur.begin() + static_cast<std::ptrdiff_t>(lo), cur.begin() + static_cast<std::ptrdiff_t>(hi),
                          next.begin() + static_cast<std::ptrdiff_t>(lo));
                for (std::uint64_t x = 1; x * x < hi; ++x) {
                    const std::uint64_t s = x * x;
                    const std::uint64_t start = std::max<std::uint64_t>(lo, s);
                    std::uint64_t* out = next.data();
                    const std::uint64_t* in = cur.data();
                    for (std::uint64_t m = start; m < hi; ++m) out[m] += 2 * in[m - s];
                }
            });
            cur = std::move(next);
        }
        return ShellTable(n, m_max, std::move(cur));
    }

    std::vector<BigInt> cur(m_max + 1, 0);
    cur[0] = 1;
    for (std::uint64_t k = 1; k <= root; ++k) cur[k * k] = 2;
    for (int dim = 2; dim <= n; ++dim) {
        std::vector<BigInt> next(cur);
        parallel_for(m_max + 1, 1 << 12, [&](std::size_t lo, std::size_t hi) {
            for (std::uint64_t x = 1; x * x < hi; ++x) {
                const std::uint64_t s = x * x;
                for (std::uint64_t m = std::max<std::uint64_t>(lo, s); m < hi; ++m) next[m] += 2 * cur[m - s];
            }
        });
        cur = std::move(next);
    }
    return ShellTable(n, m_max, std::move(cur));
}

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    static constexpr std::array<std::uint64_t, 12> kBases{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    for (std::uint64_t p : kBases) {
        if (n % p == 0) return n == p;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (std::uint64_t a : kBases) {
        std::uint64_t x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

Factorization factorize(std::uint64_t m) {
    if (m == 0) throw std::invalid_argument("factorize: zero has no factorization");
    std::vector<std::uint64_t> primes;
    for (std::uint64_t p = 2; p < 1000 && p * p <= m; p += (p == 2 ? 1 : 2)) {
        while (m % p == 0) {
            primes.push_back(p);
            m /= p;
        }
    }
    split(m, primes);
    std::sort(primes.begin(), primes.end());
    Factorization f;
    for (std::uint64_t p : primes) {
        if (!f.factors.empty() && f.factors.back().first == p) ++f.factors.back().second;
        else f.factors.emplace_back(p, 1);
    }
    return f;
}

std::uint64_t r2_divisor(std::uint64_t m) {
    if (m == 0) return 1;
    std::uint64_t r = 4;
    for (auto [p, e] : factorize(m).factors) {
        if (p % 4 == 3) {
            if (e % 2 != 0) return 0;
        } else if (p % 4 == 1) {
            r *= static_cast<std::uint64_t>(e + 1);
        }
    }
    return r;
}

BigInt ball_count_squared(int n, std::uint64_t m, std::uint64_t cap) {
    require_dim(n);
    if (n >= 3 && std::pow(2.0 * std::sqrt(static_cast<double>(m)) + 1.0, n - 2) > static_cast<double>(cap))
        throw ResourceError("ball_count: recursion would exceed work cap");
    if (ball_bound(n, m) >= 9.0e18) {
        // wide path: peel one coordinate at a time in BigInt
        if (n == 1) return BigInt(2 * isqrt(m) + 1);
        BigInt total = ball_count_squared(n - 1, m, cap);
        for (std::uint64_t x = 1; x * x <= m; ++x) total += 2 * ball_count_squared(n - 1, m - x * x, cap);
        return total;
    }
    auto rec = [](auto&& self, int dim, std::uint64_t rem) -> std::uint64_t {
        if (dim == 1) return 2 * isqrt(rem) + 1;
        std::uint64_t total = self(self, dim - 1, rem);
        for (std::uint64_t x = 1; x * x <= rem; ++x) total += 2 * self(self, dim - 1, rem - x * x);
        return total;
    };
    return BigInt(rec(rec, n, m));
}

BigInt ball_count(int n, const Rational& radius, std::uint64_t cap) {
    if (radius < 0) throw std::domain_error("ball_count: negative radius");
    const BigInt m = floor(radius * radius);
    if (m > BigInt(std::numeric_limits<std::uint64_t>::max() / 4)) throw ResourceError("ball_count: radius too large");
    return ball_count_squared(n, m.convert_to<std::uint64_t>(), cap);
}

}  // namespace speclab
