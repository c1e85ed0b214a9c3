// weyl.hpp
//
// Weyl counting: main terms (2 pi)^{-d} omega_d Vol(M) lambda^d, exact
// remainder series, remainder exponent fits, Bochner-Riesz diagonal sums and
// the beta-function identities behind the product assembly of main terms.
#pragma once

#include "speclab/common.hpp"
#include "speclab/exponents.hpp"
#include "speclab/fit.hpp"
#include "speclab/manifold.hpp"
#include "speclab/spectra.hpp"

#include <span>
#include <string>
#include <vector>

namespace speclab {

// coeff * pi^pi_power, exact.
struct PiMonomial {
    Rational coeff{1};
    int pi_power = 0;

    long double value() const;
    std::string str() const;
    PiMonomial operator*(const PiMonomial& o) const { return {coeff * o.coeff, pi_power + o.pi_power}; }
};

struct BallVolume {
    PiMonomial omega;  // pi^{n/2} / Gamma(n/2 + 1)
    PiMonomial area;   // |S^{n-1}| = n omega_n
    double value = 0.0;
    double sphere_area = 0.0;
};

BallVolume unit_ball_volume(int n);

// Vol(S^d) = 2 pi^{(d+1)/2} / Gamma((d+1)/2), Vol(T^n) = (2 pi)^n, products multiply.
PiMonomial manifold_volume(const ManifoldSpec& spec);

// (2 pi)^{-d} omega_d Vol(M), the coefficient of lambda^d.
PiMonomial weyl_constant(const ManifoldSpec& spec);
double weyl_main_term(const ManifoldSpec& spec, double lambda);

struct RemainderSample {
    double lambda = 0.0;
    BigInt n;
    double main = 0.0;
    double r = 0.0;
};

// Exact N(lambda) at every grid point (each double is an exact dyadic rational),
// main term and remainder. Grid must be non-decreasing and positive.
std::vector<RemainderSample> remainder_series(const ManifoldSpec& spec, Convention conv,
                                              std::span<const double> grid, const EnumerationLimits& limits = {});

// Remainder bound exponent implied by a window schedule: d - 1 - sigma for
// eps = lambda^{-sigma}, d - 1 otherwise.
double remainder_bound_exponent(int d, const EpsSchedule& schedule);

struct RemainderFit {
    ExponentFit fit;
    double bound_exponent = 0.0;
    double tolerance = 0.15;
    bool verdict = false;
    // Log schedules cannot be resolved by power fits; verdict is then informational.
    bool informational = false;
};

RemainderFit fit_remainder(std::span<const RemainderSample> series, int d, const EpsSchedule& schedule,
                           double tolerance = 0.15);

// Log-log fit of N itself over all points (Weyl consistency: slope close to d).
// N is monotone, so a plain regression avoids the partial-block bias of envelopes.
ExponentFit fit_counting(std::span<const RemainderSample> series);

// Diagonal of the Bochner-Riesz kernel on a homogeneous space:
// (1/Vol) sum_{lambda_j <= lambda} (1 - lambda_j^2/lambda^2)^delta mult_j.
double riesz_diagonal(const ManifoldSpec& spec, Convention conv, const Rational& delta, const Rational& lambda,
                      const EnumerationLimits& limits = {});
// Same sum over a precomputed table with all lines up to lambda; returns Vol * diagonal.
long double riesz_sum(const LineTable& table, double delta, double lambda);

struct RieszMainTerm {
    double value = 0.0;
    // the O(lambda^{d-2}) remainder is only guaranteed for delta >= 1
    bool guaranteed = false;
};

// (2 pi)^{-d} |S^{d-1}| (1/2) B(delta + 1, d/2) lambda^d
RieszMainTerm riesz_main_term(int d, double delta, double lambda);

double beta_function(double s, double t);

struct BetaIdentity {
    // |omega_{dY} |S^{dX-1}| (1/2) B(dY/2 + 1, dX/2) - omega_{dX+dY}|
    double residual = 0.0;
    // the same expression with dY/2 + 2 in place of dY/2 + 1; kept for reports
    double residual_plus_two = 0.0;
};

BetaIdentity beta_identity_residual(int d_x, int d_y);

struct ProductWeylReport {
    RemainderFit x_fit;
    RemainderFit y_fit;
    RemainderFit product_fit;
    bool y_consistent = false;
    bool verdict = false;
};

// Checks that the product X x Y inherits the remainder improvement assumed for Y.
ProductWeylReport improved_product_weyl_check(const ManifoldSpec& x, const ManifoldSpec& y, Convention conv,
                                              const EpsSchedule& schedule, std::span<const double> grid,
                                              double tolerance = 0.15, const EnumerationLimits& limits = {});

}  // namespace speclab
