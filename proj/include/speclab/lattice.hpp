// lattice.hpp
//
// Sums of squares: r_n(m) = #{j in Z^n : |j|^2 = m}, lattice-point counts in
// balls, and the integer factorization behind the divisor formula for r_2.
#pragma once

#include "speclab/common.hpp"

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

namespace speclab {

// r_n(0..m_max). Stored in 64 bits when the ball-count bound (2 sqrt(m_max) + 1)^n
// fits; otherwise every entry is kept as a BigInt.
class ShellTable {
public:
    ShellTable() = default;
    ShellTable(int n, std::uint64_t m_max, std::vector<std::uint64_t> values);
    ShellTable(int n, std::uint64_t m_max, std::vector<BigInt> values);

    int dim() const { return n_; }
    std::uint64_t m_max() const { return m_max_; }
    bool is_wide() const { return !wide_.empty(); }

    BigInt operator[](std::uint64_t m) const;
    // Throws std::overflow_error for wide tables.
    std::uint64_t narrow(std::uint64_t m) const;
    const std::vector<std::uint64_t>& narrow_values() const { return narrow_; }

    // Sum of r_n(m) for m <= min(m, m_max).
    BigInt cumulative(std::uint64_t m) const;

    // "m,count" rows, m = 0..m_max.
    void write_csv(std::ostream& out) const;

    bool operator==(const ShellTable& other) const;

private:
    int n_ = 0;
    std::uint64_t m_max_ = 0;
    std::vector<std::uint64_t> narrow_;
    std::vector<BigInt> wide_;
};

// Prime factorization, primes strictly increasing.
struct Factorization {
    std::vector<std::pair<std::uint64_t, int>> factors;

    std::uint64_t value() const;
    bool operator==(const Factorization&) const = default;
};

// Work cap (loop iterations) for the enumeration oracles and recursive ball counts.
inline constexpr std::uint64_t kDefaultEnumerationCap = 4'000'000'000ULL;

// Exact r_n(m) by enumerating sorted non-negative tuples and weighting each by
// its number of signed permutations. Reference oracle for everything else.
std::uint64_t rn_bruteforce(int n, std::uint64_t m, std::uint64_t cap = kDefaultEnumerationCap);

// The same enumeration, histogrammed over all m <= m_max at once.
std::vector<std::uint64_t> rn_bruteforce_table(int n, std::uint64_t m_max,
                                               std::uint64_t cap = kDefaultEnumerationCap);

// Iterated convolution with the one-dimensional table (r_1(0) = 1, r_1(k^2) = 2).
ShellTable rn_table(int n, std::uint64_t m_max);

// Deterministic Miller-Rabin for all 64-bit integers.
bool is_prime(std::uint64_t n);
// Trial division, then Pollard-Brent splitting of composite cofactors.
Factorization factorize(std::uint64_t m);

// 4 (d_1(m) - d_3(m)) via the multiplicative formula.
std::uint64_t r2_divisor(std::uint64_t m);

// #{j in Z^n : |j| <= R}.
BigInt ball_count(int n, const Rational& radius, std::uint64_t cap = kDefaultEnumerationCap);
// #{j in Z^n : |j|^2 <= m}.
BigInt ball_count_squared(int n, std::uint64_t m, std::uint64_t cap = kDefaultEnumerationCap);

}  // namespace speclab
