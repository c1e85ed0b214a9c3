#include "speclab/weyl.hpp"

#include "speclab/lattice.hpp"

#include <cmath>
#include <numbers>

namespace speclab {

namespace {

constexpr long double kPi = std::numbers::pi_v<long double>;

Rational factorial(int n) {
    BigInt f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return Rational(f);
}

Rational double_factorial(int n) {
    BigInt f = 1;
    for (int i = n; i > 1; i -= 2) f *= i;
    return Rational(f);
}

void require_increasing(std::span<const double> grid) {
    if (grid.empty()) throw std::invalid_argument("empty lambda grid");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0) || !std::isfinite(grid[i])) throw std::invalid_argument("lambda grid must be positive");
        if (i && grid[i] < grid[i - 1]) throw std::invalid_argument("lambda grid must be non-decreasing");
    }
}

// Neumaier's compensated sum.
struct CompensatedSum {
    long double sum = 0;
    long double c = 0;
    void add(long double x) {
        const long double t = sum + x;
        if (std::fabs(sum) >= std::fabs(x)) c += (sum - t) + x;
        else c += (x - t) + sum;
        sum = t;
    }
    long double value() const { return sum + c; }
};

}  // namespace

long double PiMonomial::value() const { return coeff.convert_to<long double>() * std::pow(kPi, pi_power); }

std::string PiMonomial::str() const {
    std::string s = to_string(coeff);
    if (pi_power != 0) s += " pi^" + std::to_string(pi_power);
    return s;
}

BallVolume unit_ball_volume(int n) {
    if (n < 1) throw std::invalid_argument("unit_ball_volume: n must be positive");
    BallVolume v;
    const int k = n / 2;
    if (n % 2 == 0) v.omega = {1 / factorial(k), k};
    else v.omega = {Rational(BigInt(1) << (k + 1)) / double_factorial(n), k};
    v.area = {v.omega.coeff * n, v.omega.pi_power};
    v.value = static_cast<double>(v.omega.value());
    v.sphere_area = static_cast<double>(v.area.value());
    return v;
}

PiMonomial manifold_volume(const ManifoldSpec& spec) {
    switch (spec.kind()) {
        case ManifoldSpec::Kind::Sphere: return unit_ball_volume(spec.dim() + 1).area;
        case ManifoldSpec::Kind::Torus: return {Rational(BigInt(1) << spec.dim()), spec.dim()};
        case ManifoldSpec::Kind::Product: break;
    }
    PiMonomial v;
    for (const auto& f : spec.factors()) v = v * manifold_volume(f);
    return v;
}

PiMonomial weyl_constant(const ManifoldSpec& spec) {
    const int d = spec.dim();
    const PiMonomial omega = unit_ball_volume(d).omega;
    const PiMonomial vol = manifold_volume(spec);
    return {omega.coeff * vol.coeff / Rational(BigInt(1) << d), omega.pi_power + vol.pi_power - d};
}

double weyl_main_term(const ManifoldSpec& spec, double lambda) {
    if (lambda < 0) throw std::domain_error("weyl_main_term: lambda must be >= 0");
    return static_cast<double>(weyl_constant(spec).value() * std::pow(static_cast<long double>(lambda), spec.dim()));
}

std::vector<RemainderSample> remainder_series(const ManifoldSpec& spec, Convention conv,
                                              std::span<const double> grid, const EnumerationLimits& limits) {
    require_increasing(grid);
    std::vector<std::uint64_t> bounds(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) bounds[i] = q4_bound(to_rational(grid[i]));

    const bool torus = spec.kind() == ManifoldSpec::Kind::Torus;
    LineTable table;
    if (!torus) table = enumerate_lines_q4(spec, conv, bounds.back(), limits);

    const long double constant = weyl_constant(spec).value();
    std::vector<RemainderSample> out(grid.size());
    parallel_for(grid.size(), 16, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            RemainderSample& s = out[i];
            s.lambda = grid[i];
            s.n = torus ? ball_count_squared(spec.dim(), bounds[i] / 4) : table.count_upto(bounds[i]);
            const long double main = constant * std::pow(static_cast<long double>(grid[i]), spec.dim());
            s.main = static_cast<double>(main);
            s.r = static_cast<double>(to_long_double(s.n) - main);
        }
    });
    return out;
}

double remainder_bound_exponent(int d, const EpsSchedule& schedule) {
    if (schedule.kind == EpsSchedule::Kind::PowerLaw) return d - 1 - to_double(schedule.delta);
    return d - 1;
}

RemainderFit fit_remainder(std::span<const RemainderSample> series, int d, const EpsSchedule& schedule,
                           double tolerance) {
    std::vector<SeriesPoint> pts;
    pts.reserve(series.size());
    for (const auto& s : series) pts.push_back({s.lambda, std::fabs(s.r)});
    RemainderFit out;
    out.fit = envelope_exponent(pts);
    out.bound_exponent = remainder_bound_exponent(d, schedule);
    out.tolerance = tolerance;
    out.verdict = out.fit.slope <= out.bound_exponent + tolerance;
    out.informational = schedule.kind == EpsSchedule::Kind::LogPower;
    return out;
}

ExponentFit fit_counting(std::span<const RemainderSample> series) {
    std::vector<double> x, y;
    for (const auto& s : series) {
        if (s.n <= 0) continue;
        x.push_back(s.lambda);
        y.push_back(static_cast<double>(to_long_double(s.n)));
    }
    if (x.size() < 2) throw std::invalid_argument("fit_counting: need two points with N > 0");
    return loglog_fit(x, y);
}

long double riesz_sum(const LineTable& table, double delta, double lambda) {
    if (!(lambda > 0)) throw std::domain_error("riesz_sum: lambda must be positive");
    if (delta < 0) throw std::domain_error("riesz_sum: delta must be >= 0");
    const long double scale = 4.0L * static_cast<long double>(lambda) * lambda;
    const bool integral = delta == std::floor(delta) && delta <= 64;
    const int ipow = static_cast<int>(delta);
    CompensatedSum sum;
    for (std::size_t i = 0; i < table.size(); ++i) {
        const long double x = static_cast<long double>(table.q4(i)) / scale;
        if (x > 1) break;
        const long double base = 1 - x;
        long double w = 1;
        if (integral) {
            for (int k = 0; k < ipow; ++k) w *= base;
        } else {
            w = std::pow(base, static_cast<long double>(delta));
        }
        sum.add(w * (table.is_wide() ? to_long_double(table.mult(i)) : static_cast<long double>(table.mult64(i))));
    }
    return sum.value();
}

double riesz_diagonal(const ManifoldSpec& spec, Convention conv, const Rational& delta, const Rational& lambda,
                      const EnumerationLimits& limits) {
    if (lambda <= 0) throw std::domain_error("riesz_diagonal: lambda must be positive");
    if (delta < 0) throw std::domain_error("riesz_diagonal: delta must be >= 0");
    const LineTable t = enumerate_lines(spec, conv, lambda, limits);
    const long double s = riesz_sum(t, to_double(delta), to_double(lambda));
    return static_cast<double>(s / manifold_volume(spec).value());
}

double beta_function(double s, double t) {
    const long double ls = s, lt = t;
    return static_cast<double>(std::exp(std::lgamma(ls) + std::lgamma(lt) - std::lgamma(ls + lt)));
}

RieszMainTerm riesz_main_term(int d, double delta, double lambda) {
    if (d < 1) throw std::invalid_argument("riesz_main_term: d must be positive");
    if (delta < 0) throw std::domain_error("riesz_main_term: delta must be >= 0");
    const long double area = unit_ball_volume(d).area.value();
    const long double b = std::exp(std::lgamma(static_cast<long double>(delta) + 1) +
                                   std::lgamma(static_cast<long double>(d) / 2) -
                                   std::lgamma(static_cast<long double>(delta) + 1 + static_cast<long double>(d) / 2));
    const long double v = std::pow(2 * kPi, -d) * area * 0.5L * b * std::pow(static_cast<long double>(lambda), d);
    return {static_cast<double>(v), delta >= 1};
}

BetaIdentity beta_identity_residual(int d_x, int d_y) {
    if (d_x < 1 || d_y < 1) throw std::invalid_argument("beta identity needs d_x, d_y >= 1");
    const long double omega_y = unit_ball_volume(d_y).omega.value();
    const long double area_x = unit_ball_volume(d_x).area.value();
    const long double omega_d = unit_ball_volume(d_x + d_y).omega.value();
    auto beta = [](long double s, long double t) {
        return std::exp(std::lgamma(s) + std::lgamma(t) - std::lgamma(s + t));
    };
    const long double hx = static_cast<long double>(d_x) / 2;
    const long double hy = static_cast<long double>(d_y) / 2;
    BetaIdentity out;
    out.residual = static_cast<double>(std::fabs(omega_y * area_x * 0.5L * beta(hy + 1, hx) - omega_d));
    out.residual_plus_two = static_cast<double>(std::fabs(omega_y * area_x * 0.5L * beta(hy + 2, hx) - omega_d));
    return out;
}

ProductWeylReport improved_product_weyl_check(const ManifoldSpec& x, const ManifoldSpec& y, Convention conv,
                                              const EpsSchedule& schedule, std::span<const double> grid,
                                              double tolerance, const EnumerationLimits& limits) {
    ProductWeylReport rep;
    const auto ys = remainder_series(y, conv, grid, limits);
    rep.y_fit = fit_remainder(ys, y.dim(), schedule, tolerance);
    rep.y_consistent = rep.y_fit.verdict;
    const auto xs = remainder_series(x, conv, grid, limits);
    rep.x_fit = fit_remainder(xs, x.dim(), EpsSchedule::unit(), tolerance);
    const ManifoldSpec prod = ManifoldSpec::product({x, y});
    const auto ps = remainder_series(prod, conv, grid, limits);
    rep.product_fit = fit_remainder(ps, prod.dim(), schedule, tolerance);
    rep.verdict = rep.y_consistent && rep.product_fit.verdict;
    return rep;
}

}  // namespace speclab
