// harmonics.hpp
//
// Extremal spherical harmonics on S^d and their L^q norms:
//   zonal:          Z_k(theta) = p_k(cos theta) / sqrt|S^{d-1}|, p_k the
//                   orthonormal Gegenbauer polynomial for (1 - x^2)^{(d-2)/2};
//   highest weight: c_k (x_1 + i x_2)^k, |f| = c_k r^k with r^2 = x_1^2 + x_2^2.
// Both are normalized to unit L^2 norm. Finite-q norms reduce to one-dimensional
// Gauss-Jacobi integrals; q = infinity is a refined grid maximum. Also the
// decay of the Fourier transform of (1 - tau^2)^delta_+.
#pragma once

#include "speclab/exponents.hpp"
#include "speclab/fit.hpp"
#include "speclab/quadrature.hpp"

#include <span>
#include <string>
#include <vector>

namespace speclab {

enum class HarmonicKind { Zonal, HighestWeight };

std::string to_string(HarmonicKind k);
HarmonicKind parse_harmonic_kind(const std::string& text);

struct HarmonicFamily {
    HarmonicKind kind = HarmonicKind::Zonal;
    int d = 2;
    int k = 0;

    static HarmonicFamily zonal(int d, int k);
    static HarmonicFamily highest_weight(int d, int k);
    // k + (d - 1)/2
    double lambda() const;
    std::string str() const;
};

// L^2-normalized zonal harmonic at each theta in [0, pi].
std::vector<double> zonal_values(int d, int k, std::span<const double> theta);

// c_k with c_k^2 pi |S^{d-2}| B(k + 1, (d - 1)/2) = 1.
double highest_weight_constant(int d, int k);

// ceil(q k) + d + 10: the polynomial degree a finite-q norm rule must reach.
int required_degree(const HarmonicFamily& f, const QExponent& q);

// The rule lq_norm uses for this family: Gauss-Jacobi in cos(theta) for zonal,
// in 2 r^2 - 1 for highest weight.
QuadratureRule norm_rule(const HarmonicFamily& f, int degree);

// (int_{S^d} |f|^q)^{1/q}, or the supremum for q = infinity.
double lq_norm(const HarmonicFamily& f, const QExponent& q);
// Same with a caller-supplied rule; throws std::invalid_argument if the rule is
// of the wrong kind or below required_degree.
double lq_norm(const HarmonicFamily& f, const QExponent& q, const QuadratureRule& rule);

struct GrowthSample {
    int k = 0;
    double lambda = 0.0;
    double norm = 0.0;
};

struct GrowthReport {
    std::vector<GrowthSample> samples;
    ExponentFit fit;
    // the exponent the family is expected to attain
    double expected = 0.0;
};

// About `points` distinct degrees, geometric between k_lo and k_hi inclusive.
std::vector<int> degree_ladder(int k_lo, int k_hi, int points);

// Slope of log ||f_k||_q against log lambda. Needs k_hi >= 10^{1.5} k_lo.
// Expected slope: the upper branch of alpha for zonal, the lower for highest weight.
GrowthReport fit_growth(HarmonicKind kind, int d, const QExponent& q, int k_lo = 20, int k_hi = 2000,
                        int points = 24);

struct TensorFactor {
    HarmonicKind kind = HarmonicKind::Zonal;
    int d = 2;
    // factor degree = degree_ratio * k; 0 freezes the factor at degree 0
    int degree_ratio = 1;
};

// Norms of tensor products are products of factor norms; lambda = sqrt(sum lambda_i^2).
// Expected slope: sum of the factor expectations over factors with nonzero degree.
GrowthReport tensor_growth(std::span<const TensorFactor> factors, const QExponent& q, int k_lo = 20,
                           int k_hi = 2000, int points = 24);

struct MultiplierSample {
    double t = 0.0;
    double value = 0.0;
    // difference against the next rule in the ladder
    double error = 0.0;
    int points = 0;
};

struct MultiplierReport {
    double delta = 0.0;
    std::vector<MultiplierSample> samples;
    ExponentFit fit;
    double bound = 0.0;  // -1 - delta
    double tolerance = 0.1;
    double max_error = 0.0;
    bool quadrature_ok = false;
    bool verdict = false;
};

// int_{-1}^{1} (1 - tau^2)^delta e^{-i t tau} d tau (real and even in t), with an error estimate.
MultiplierSample multiplier_value(double delta, double t);

// Geometric grid on [t_lo, t_hi] with `per_octave` points per doubling.
std::vector<double> multiplier_grid(double t_lo = 10.0, double t_hi = 1e4, int per_octave = 64);

// Envelope fit of |m_delta(t)|; verdict when slope <= -1 - delta + tolerance and
// every quadrature error estimate is below 1e-12.
MultiplierReport multiplier_decay(double delta, std::span<const double> t_grid, double tolerance = 0.1);

}  // namespace speclab
