// exponents.hpp
//
// Exact exponent arithmetic for spectral cluster bounds: the universal
// exponent alpha(q, d), its critical exponent, window schedules eps(lambda)
// and growth laws lambda^a (log lambda)^b.
//
// Exponents q are carried as 1/q so that q = infinity is an ordinary value and
// every formula is affine in the stored quantity.
#pragma once

#include "speclab/common.hpp"

#include <compare>
#include <span>
#include <string>

namespace speclab {

class QExponent {
public:
    // q = 2
    QExponent();
    static QExponent from_q(const Rational& q);
    static QExponent from_inverse(const Rational& inv_q);
    static QExponent infinity();

    const Rational& inv_q() const { return inv_q_; }
    bool is_infinite() const { return inv_q_ == 0; }
    // Throws std::domain_error for q = infinity.
    Rational q() const;
    double q_double() const;
    std::string str() const;

    // Ordered by q (so larger q compares greater).
    std::strong_ordering operator<=>(const QExponent& other) const;
    bool operator==(const QExponent& other) const = default;

private:
    explicit QExponent(Rational inv_q);
    Rational inv_q_;
};

struct EpsSchedule {
    enum class Kind { PowerLaw, LogPower, Unit };
    Kind kind = Kind::Unit;
    Rational delta{0};

    static EpsSchedule power_law(const Rational& delta);
    static EpsSchedule log_power(const Rational& delta);
    static EpsSchedule unit();
    // "pow:1/2", "log:1", "unit"
    static EpsSchedule parse(const std::string& text);
    std::string str() const;

    double operator()(double lambda) const;
    // Exact rational approximation of eps(lambda) with denominator 2^bits,
    // rounded up so that the result is never below the true value.
    Rational rational_at(const Rational& lambda, int bits = 32) const;

    bool operator==(const EpsSchedule&) const = default;
};

// lambda^power * (log lambda)^log_power; constants are not tracked.
struct GrowthLaw {
    Rational power{0};
    Rational log_power{0};

    GrowthLaw operator*(const GrowthLaw& other) const {
        return {power + other.power, log_power + other.log_power};
    }
    std::strong_ordering operator<=>(const GrowthLaw& other) const;
    bool operator==(const GrowthLaw& other) const = default;
    std::string str() const;
};

// max(d(1/2 - 1/q) - 1/2, (d - 1)/2 (1/2 - 1/q)).
Rational alpha(const QExponent& q, int d);
Rational alpha_upper_branch(const QExponent& q, int d);
Rational alpha_lower_branch(const QExponent& q, int d);

// 2(d + 1)/(d - 1); d = 1 yields QExponent::infinity().
QExponent q_crit(int d);

struct ScheduleReport {
    bool ok = true;
    // Largest relative failure of monotonicity: t*eps(t) non-decreasing and
    // eps(t) non-increasing over consecutive grid points.
    double worst_violation = 0.0;
    double worst_at = 0.0;
};

ScheduleReport validate_schedule(const EpsSchedule& s, std::span<const double> grid);

// Growth of sqrt(eps) B lambda^{alpha(q, d_X) + 1/2}.
GrowthLaw product_cluster_law(const GrowthLaw& b, const EpsSchedule& s, const QExponent& q, int d_x);

// Sum of alpha(q, d_i) over the factors of a product of spheres.
Rational sphere_product_exponent(const QExponent& q, std::span<const int> dims);

// alpha(q, d) minus the linear interpolation (in 1/q) between the universal
// value at q_c(d) and `hi_exponent` at q_hi.
Rational interpolated_delta(const QExponent& q, int d, const QExponent& q_hi, const Rational& hi_exponent);

}  // namespace speclab
