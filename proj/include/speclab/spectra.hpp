// spectra.hpp
//
// Exact spectra of P = sqrt(-Delta) on spheres, tori and their products.
//
// Every eigenvalue is stored as the integer q4 = 4 lambda^2. Under the shifted
// convention the sphere S^d contributes lambda = k + (d-1)/2, i.e.
// q4 = (2k + d - 1)^2; under the geometric convention lambda^2 = k(k + d - 1).
// Tori contribute q4 = 4|j|^2. Squared eigenvalues add over product factors,
// so product spectra are integer convolutions of factor tables and all
// comparisons (windows, counts, distinctness) are integer comparisons.
#pragma once

#include "speclab/common.hpp"
#include "speclab/manifold.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace speclab {

enum class Convention { Shifted, Geometric };

std::string to_string(Convention c);
Convention parse_convention(const std::string& text);

struct SpectralLine {
    std::uint64_t q4 = 0;
    BigInt mult;

    double lambda() const;
    bool operator==(const SpectralLine&) const = default;
};

// Distinct eigenvalues in increasing order with multiplicities and running
// totals. Multiplicities live in 64 bits unless some running total overflows,
// in which case the whole table is held in BigInt.
class LineTable {
public:
    LineTable() = default;
    LineTable(std::vector<std::uint64_t> q4, std::vector<std::uint64_t> mult);
    LineTable(std::vector<std::uint64_t> q4, std::vector<BigInt> mult);

    std::size_t size() const { return q4_.size(); }
    bool empty() const { return q4_.empty(); }
    bool is_wide() const { return !wide_.empty(); }
    std::uint64_t q4(std::size_t i) const { return q4_[i]; }
    BigInt mult(std::size_t i) const { return is_wide() ? wide_[i] : BigInt(narrow_[i]); }
    // Valid only for narrow tables.
    std::uint64_t mult64(std::size_t i) const { return narrow_[i]; }
    double mult_double(std::size_t i) const;
    const std::vector<std::uint64_t>& q4_values() const { return q4_; }
    std::vector<SpectralLine> lines() const;

    // Sum of multiplicities with q4 <= bound.
    BigInt count_upto(std::uint64_t bound) const;
    // Sum of multiplicities with lo <= q4 <= hi.
    BigInt count_between(std::uint64_t lo, std::uint64_t hi) const;
    BigInt total() const;

    // Table truncated to q4 <= bound.
    LineTable truncated(std::uint64_t bound) const;

    // "q4,mult" rows.
    void write_csv(std::ostream& out) const;
    void write_binary(std::ostream& out) const;
    static LineTable read_binary(std::istream& in);

    bool operator==(const LineTable& other) const;

private:
    void build_prefix();
    std::size_t upper_index(std::uint64_t bound) const;

    std::vector<std::uint64_t> q4_;
    std::vector<std::uint64_t> narrow_;
    std::vector<BigInt> wide_;
    std::vector<std::uint64_t> prefix_;
    std::vector<BigInt> wide_prefix_;
};

// Closed spectral window. Membership is decided on the squared endpoints, so a
// window is any [a, b] with a^2, b^2 rational: rational centers and widths, and
// also [sqrt(m) - 1/sqrt(m), sqrt(m) + 1/sqrt(m)].
class Window {
public:
    Window(const Rational& center, const Rational& halfwidth);
    static Window from_squared_bounds(const Rational& lower_sq, const Rational& upper_sq);
    // [sqrt(m) - 1/sqrt(m), sqrt(m) + 1/sqrt(m)], m >= 1.
    static Window inverse_width_at_root(std::uint64_t m);

    const Rational& lower_sq() const { return lower_sq_; }
    const Rational& upper_sq() const { return upper_sq_; }
    std::uint64_t q4_min() const { return q4_min_; }
    std::uint64_t q4_max() const { return q4_max_; }
    bool empty() const { return q4_min_ > q4_max_; }
    bool contains_q4(std::uint64_t q4) const { return q4_min_ <= q4 && q4 <= q4_max_; }
    bool contains(const Window& inner) const;

private:
    Window() = default;
    void finish();

    Rational lower_sq_;
    Rational upper_sq_;
    std::uint64_t q4_min_ = 0;
    std::uint64_t q4_max_ = 0;
};

struct EnumerationLimits {
    // Product pairs examined by a single convolution.
    std::uint64_t max_pairs = 1ULL << 30;
    // Largest |j|^2 tabulated for a torus factor.
    std::uint64_t max_torus_m = 1ULL << 27;
    // Dense accumulation is used below this q4 bound.
    std::uint64_t dense_q4 = 1ULL << 24;
};

// dim H_k(S^d) = C(k + d, d) - C(k + d - 2, d).
BigInt sphere_harmonic_dim(int d, std::uint64_t k);

// floor(4 lambda^2) for a non-negative rational lambda.
std::uint64_t q4_bound(const Rational& lambda);

LineTable enumerate_lines(const ManifoldSpec& spec, Convention conv, const Rational& lambda_max,
                          const EnumerationLimits& limits = {});
LineTable enumerate_lines_q4(const ManifoldSpec& spec, Convention conv, std::uint64_t q4_max,
                             const EnumerationLimits& limits = {});

// Exact convolution of two line tables, restricted to q4 <= q4_max.
LineTable convolve(const LineTable& a, const LineTable& b, std::uint64_t q4_max, const EnumerationLimits& limits = {});

// N(lambda): eigenvalues <= lambda with multiplicity.
BigInt count(const ManifoldSpec& spec, Convention conv, const Rational& lambda, const EnumerationLimits& limits = {});
BigInt count_q4(const ManifoldSpec& spec, Convention conv, std::uint64_t q4_max, const EnumerationLimits& limits = {});

BigInt window_count(const ManifoldSpec& spec, Convention conv, const Window& w, const EnumerationLimits& limits = {});

struct GapScan {
    double min_normalized_gap = 0.0;
    std::uint64_t q4_lo = 0;
    std::uint64_t q4_hi = 0;
    double lambda_lo = 0.0;
    double lambda_hi = 0.0;
};

// Minimum of (lambda' - lambda) * lambda over consecutive distinct eigenvalues
// lambda < lambda' that both lie in [lambda_lo, lambda_hi].
GapScan distinct_gap_scan(const ManifoldSpec& spec, Convention conv, const Rational& lambda_lo,
                          const Rational& lambda_hi, const EnumerationLimits& limits = {});

// sum over eigenvalues mu of X below lambda of N_Y(sqrt(lambda^2 - mu^2)).
BigInt product_count_convolution(const ManifoldSpec& x, const ManifoldSpec& y, Convention conv, const Rational& lambda,
                                 const EnumerationLimits& limits = {});

// sqrt(window_count / Vol): the L^2 -> L^infinity norm of the window projector
// on a homogeneous model manifold.
double projector_sup_ratio(const ManifoldSpec& spec, Convention conv, const Window& w,
                           const EnumerationLimits& limits = {});

// On-disk cache of line tables, keyed by a content hash of (spec, convention, lambda_max).
class LineCache {
public:
    explicit LineCache(std::filesystem::path dir);

    static std::string key(const ManifoldSpec& spec, Convention conv, const Rational& lambda_max);
    std::filesystem::path path_for(const std::string& key) const;

    std::optional<LineTable> load(const std::string& key) const;
    void store(const std::string& key, const LineTable& table) const;

    LineTable enumerate(const ManifoldSpec& spec, Convention conv, const Rational& lambda_max,
                        const EnumerationLimits& limits = {}) const;

private:
    std::filesystem::path dir_;
};

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace speclab
