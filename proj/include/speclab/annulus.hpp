// annulus.hpp
//
// The eps-annulus A = {(mu, nu): |lambda - sqrt(mu^2 + nu^2)| <= eps} in the
// joint spectrum of X x Y (mu from X, nu from Y), split into
//   high:   nu >= lambda/2,
//   low:    nu <= 1,
//   ell:    nu in (lambda 2^-ell, lambda 2^-ell+1], 2 <= ell <= floor(log2 lambda).
// Points with 1 < nu <= lambda 2^-ell_max go to ell_max. All membership
// decisions are integer comparisons on q4 = 4 mu^2 and 4 nu^2.
#pragma once

#include "speclab/common.hpp"
#include "speclab/exponents.hpp"
#include "speclab/manifold.hpp"
#include "speclab/spectra.hpp"

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace speclab {

struct JointPoint {
    std::uint64_t mu_q4 = 0;
    std::uint64_t nu_q4 = 0;
    BigInt mult;  // product of the two line multiplicities

    bool operator==(const JointPoint&) const = default;
};

enum class AnnulusRegion { High, Low, Shell };

std::string to_string(AnnulusRegion r);

// Integer thresholds for one (lambda, eps).
struct AnnulusGeometry {
    Rational lambda;
    Rational eps;
    // mu_q4 + nu_q4 in [sum_min, sum_max]
    std::uint64_t sum_min = 0;
    std::uint64_t sum_max = 0;
    // high when nu_q4 >= high_min
    std::uint64_t high_min = 0;
    int ell_max = 2;
    // shell ell when nu_q4 > shell_floor[ell - 2] (first such ell)
    std::vector<std::uint64_t> shell_floor;

    AnnulusGeometry(const Rational& lambda, const Rational& eps);
    bool contains(std::uint64_t mu_q4, std::uint64_t nu_q4) const;
    // region and dyadic index (0 unless Shell)
    std::pair<AnnulusRegion, int> classify(std::uint64_t nu_q4) const;
};

struct AnnulusDecomposition {
    Rational lambda;
    Rational eps;
    int ell_max = 2;
    std::vector<JointPoint> members;  // every annulus point, (mu_q4, nu_q4) order
    std::vector<JointPoint> omega_high;
    std::vector<JointPoint> omega_low;
    std::map<int, std::vector<JointPoint>> omega_ell;
};

// Requires eps <= 1 <= lambda and eps >= 1/lambda.
AnnulusDecomposition decompose(const ManifoldSpec& x, const ManifoldSpec& y, Convention conv, const Rational& lambda,
                               const Rational& eps, const EnumerationLimits& limits = {});

struct Lemma1Report {
    double c_high = 0.0;
    double c_ell_max = 0.0;
    double interval_ratio_max = 0.0;
    double c_small_max = 0.0;
    bool partition_ok = true;

    double worst() const;
    bool within(double c0) const { return partition_ok && worst() <= c0; }
};

Lemma1Report verify_lemma1(const AnnulusDecomposition& d);

struct RegionStat {
    AnnulusRegion region = AnnulusRegion::High;
    int ell = 0;
    std::size_t points = 0;
    BigInt mult;
};

struct RegionStats {
    std::vector<RegionStat> rows;  // high, low, then shells by ell
    std::size_t total_points = 0;
    BigInt total_mult;
};

RegionStats region_stats(const AnnulusDecomposition& d);

// "mu_q4,nu_q4,mult,region,ell" rows in (mu_q4, nu_q4) order.
void write_csv(const AnnulusDecomposition& d, std::ostream& out);

// SplitMix64 output at position `counter` of the stream seeded by `seed`.
std::uint64_t splitmix64(std::uint64_t seed, std::uint64_t counter);

// lambda = k / 1024 with k uniform on [1024 lo, 1024 hi], drawn at `counter`.
Rational sample_lambda(std::uint64_t seed, std::uint64_t counter, std::uint64_t lo, std::uint64_t hi);

struct Lemma1Trial {
    std::uint64_t index = 0;
    Rational lambda;
    EpsSchedule schedule;
    Rational eps;
    std::size_t points = 0;
    Lemma1Report report;
};

struct Lemma1Sweep {
    std::vector<Lemma1Trial> trials;
    Lemma1Report worst;
    double c0 = 8.0;
    bool verdict = false;
};

// `samples` seeded lambdas in [lo, hi], each decomposed under every schedule.
Lemma1Sweep lemma1_sweep(const ManifoldSpec& x, const ManifoldSpec& y, Convention conv,
                         const std::vector<EpsSchedule>& schedules, std::uint64_t seed, std::size_t samples,
                         std::uint64_t lo = 100, std::uint64_t hi = 2000, double c0 = 8.0,
                         const EnumerationLimits& limits = {});

}  // namespace speclab
