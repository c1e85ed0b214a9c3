#include "speclab/exponents.hpp"

#include <limits>
#include <cmath>
#include <numbers>

namespace speclab {

namespace {

const Rational kHalf{1, 2};

void require_dim(int d) {
    if (d < 1) throw std::invalid_argument("dimension must be positive, got " + std::to_string(d));
}

}  // namespace

QExponent::QExponent() : inv_q_(kHalf) {}

QExponent::QExponent(Rational inv_q) : inv_q_(std::move(inv_q)) {
    if (inv_q_ < 0 || inv_q_ > kHalf) throw std::domain_error("exponent q must satisfy q >= 2");
}

QExponent QExponent::from_q(const Rational& q) {
    if (q < 2) throw std::domain_error("exponent q must satisfy q >= 2, got " + to_string(q));
    return QExponent(1 / q);
}

QExponent QExponent::from_inverse(const Rational& inv_q) { return QExponent(inv_q); }

QExponent QExponent::infinity() { return QExponent(Rational(0)); }

Rational QExponent::q() const {
    if (is_infinite()) throw std::domain_error("q is infinite");
    return 1 / inv_q_;
}

double QExponent::q_double() const {
    return is_infinite() ? std::numeric_limits<double>::infinity() : to_double(q());
}

std::string QExponent::str() const { return is_infinite() ? "inf" : to_string(q()); }

std::strong_ordering QExponent::operator<=>(const QExponent& other) const {
    // larger 1/q means smaller q
    if (inv_q_ == other.inv_q_) return std::strong_ordering::equal;
    return inv_q_ > other.inv_q_ ? std::strong_ordering::less : std::strong_ordering::greater;
}

EpsSchedule EpsSchedule::power_law(const Rational& delta) {
    if (delta <= 0 || delta > 1) throw std::domain_error("power-law schedule needs 0 < delta <= 1");
    return {Kind::PowerLaw, delta};
}

EpsSchedule EpsSchedule::log_power(const Rational& delta) {
    if (delta <= 0) throw std::domain_error("log-power schedule needs delta > 0");
    return {Kind::LogPower, delta};
}

EpsSchedule EpsSchedule::unit() { return {Kind::Unit, Rational(0)}; }

EpsSchedule EpsSchedule::parse(const std::string& text) {
    if (text == "unit") return unit();
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("bad schedule '" + text + "'");
    const std::string kind = text.substr(0, colon);
    const Rational delta = parse_rational(text.substr(colon + 1));
    if (kind == "pow") return power_law(delta);
    if (kind == "log") return log_power(delta);
    throw std::invalid_argument("bad schedule kind '" + kind + "'");
}

std::string EpsSchedule::str() const {
    switch (kind) {
        case Kind::PowerLaw: return "pow:" + to_string(delta);
        case Kind::LogPower: return "log:" + to_string(delta);
        case Kind::Unit: return "unit";
    }
    return "unit";
}

double EpsSchedule::operator()(double lambda) const {
    const double d = to_double(delta);
    switch (kind) {
        case Kind::PowerLaw: return std::pow(lambda, -d);
        case Kind::LogPower: return std::pow(std::log(lambda), -d);
        case Kind::Unit: return 1.0;
    }
    return 1.0;
}

Rational EpsSchedule::rational_at(const Rational& lambda, int bits) const {
    if (kind == Kind::Unit) return Rational(1);
    if (kind == Kind::PowerLaw && delta == 1) return 1 / lambda;
    const long double l = lambda.convert_to<long double>();
    const long double d = delta.convert_to<long double>();
    const long double v = kind == Kind::PowerLaw ? std::pow(l, -d) : std::pow(std::log(l), -d);
    const BigInt scale = BigInt(1) << bits;
    const auto num = static_cast<long long>(std::ceil(std::ldexp(v, bits)));
    return Rational(BigInt(num), scale);
}

std::strong_ordering GrowthLaw::operator<=>(const GrowthLaw& other) const {
    if (power != other.power) return power < other.power ? std::strong_ordering::less : std::strong_ordering::greater;
    if (log_power != other.log_power)
        return log_power < other.log_power ? std::strong_ordering::less : std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

std::string GrowthLaw::str() const {
    std::string s = "lambda^(" + to_string(power) + ")";
    if (log_power != 0) s += " * log(lambda)^(" + to_string(log_power) + ")";
    return s;
}

Rational alpha_upper_branch(const QExponent& q, int d) {
    require_dim(d);
    return Rational(d) * (kHalf - q.inv_q()) - kHalf;
}

Rational alpha_lower_branch(const QExponent& q, int d) {
    require_dim(d);
    return Rational(d - 1, 2) * (kHalf - q.inv_q());
}

Rational alpha(const QExponent& q, int d) {
    const Rational up = alpha_upper_branch(q, d);
    const Rational lo = alpha_lower_branch(q, d);
    return up > lo ? up : lo;
}

QExponent q_crit(int d) {
    require_dim(d);
    if (d == 1) return QExponent::infinity();
    return QExponent::from_inverse(Rational(d - 1, 2 * (d + 1)));
}

ScheduleReport validate_schedule(const EpsSchedule& s, std::span<const double> grid) {
    if (grid.empty()) throw std::invalid_argument("validate_schedule: empty grid");
    const double floor = s.kind == EpsSchedule::Kind::LogPower ? std::numbers::e : 1.0;
    if (grid.front() < floor)
        throw std::invalid_argument("validate_schedule: grid starts below " + std::to_string(floor));
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("validate_schedule: grid not strictly increasing");

    // Relative slack for rounding in pow/log.
    constexpr double kSlack = 1e-12;
    ScheduleReport rep;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double e0 = s(grid[i - 1]);
        const double e1 = s(grid[i]);
        const double te0 = grid[i - 1] * e0;
        const double te1 = grid[i] * e1;
        const double v = std::max(te0 / te1 - 1.0, e1 / e0 - 1.0);
        if (v > rep.worst_violation) {
            rep.worst_violation = v;
            rep.worst_at = grid[i];
        }
    }
    rep.ok = rep.worst_violation <= kSlack;
    return rep;
}

GrowthLaw product_cluster_law(const GrowthLaw& b, const EpsSchedule& s, const QExponent& q, int d_x) {
    GrowthLaw out = b * GrowthLaw{alpha(q, d_x) + kHalf, 0};
    switch (s.kind) {
        case EpsSchedule::Kind::PowerLaw: out.power -= s.delta / 2; break;
        case EpsSchedule::Kind::LogPower: out.log_power -= s.delta / 2; break;
        case EpsSchedule::Kind::Unit: break;
    }
    return out;
}

Rational sphere_product_exponent(const QExponent& q, std::span<const int> dims) {
    if (dims.empty()) throw std::invalid_argument("sphere_product_exponent: no factors");
    Rational sum{0};
    for (int d : dims) sum += alpha(q, d);
    return sum;
}

Rational interpolated_delta(const QExponent& q, int d, const QExponent& q_hi, const Rational& hi_exponent) {
    const QExponent qc = q_crit(d);
    if (!(qc < q_hi)) throw std::domain_error("interpolated_delta: q_hi must exceed q_c(d)");
    if (q < qc || q > q_hi) throw std::domain_error("interpolated_delta: q outside [q_c(d), q_hi]");
    const Rational s0 = qc.inv_q();
    const Rational s1 = q_hi.inv_q();
    const Rational a0 = alpha(qc, d);
    const Rational t = (s0 - q.inv_q()) / (s0 - s1);
    const Rational interpolated = a0 + t * (hi_exponent - a0);
    return alpha(q, d) - interpolated;
}

}  // namespace speclab
