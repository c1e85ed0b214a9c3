#include "doctest.h"

#include "speclab/exponents.hpp"

#include <cmath>
#include <numbers>
#include <vector>

using namespace speclab;

namespace {

Rational R(long long a, long long b = 1) { return Rational(a, b); }
QExponent Q(long long a, long long b = 1) { return QExponent::from_q(R(a, b)); }

// Rational q-grid in (2, infinity]: 1/q = j/400 for j = 0..199.
std::vector<QExponent> q_grid() {
    std::vector<QExponent> out;
    for (int j = 0; j < 200; ++j) out.push_back(QExponent::from_inverse(R(j, 400)));
    return out;
}

}  // namespace

TEST_CASE("alpha examples") {
    CHECK(alpha(Q(6), 2) == R(1, 6));
    CHECK(alpha(Q(2), 5) == 0);
    CHECK(alpha(QExponent::infinity(), 3) == 1);
    CHECK_THROWS(alpha(Q(6), 0));
}

TEST_CASE("q_crit examples") {
    CHECK(q_crit(3) == Q(4));
    CHECK(q_crit(2) == Q(6));
    CHECK(q_crit(1).is_infinite());
}

TEST_CASE("QExponent storage and ordering") {
    CHECK(QExponent().inv_q() == R(1, 2));
    CHECK(Q(2).inv_q() == R(1, 2));
    CHECK(QExponent::infinity().is_infinite());
    CHECK_THROWS(QExponent::infinity().q());
    CHECK_THROWS(Q(1));
    CHECK(Q(4) < Q(6));
    CHECK(Q(6) < QExponent::infinity());
    CHECK(Q(7, 2).q() == R(7, 2));
}

TEST_CASE("branches agree exactly at the critical exponent") {
    for (int d = 2; d <= 20; ++d) {
        const QExponent qc = q_crit(d);
        CHECK(alpha_upper_branch(qc, d) == alpha_lower_branch(qc, d));
        CHECK(alpha(qc, d) == alpha_upper_branch(qc, d));
    }
}

TEST_CASE("alpha is monotone in q and d") {
    const auto grid = q_grid();
    for (int d = 1; d <= 12; ++d)
        for (std::size_t i = 1; i < grid.size(); ++i) CHECK(alpha(grid[i], d) <= alpha(grid[i - 1], d));
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        for (int d = 1; d < 12; ++d) CHECK(alpha(grid[i], d) <= alpha(grid[i], d + 1));
}

TEST_CASE("alpha is strictly superadditive for q > 2") {
    for (const auto& q : q_grid())
        for (int d1 = 1; d1 <= 8; ++d1)
            for (int d2 = 1; d2 <= 8; ++d2) CHECK(alpha(q, d1) + alpha(q, d2) < alpha(q, d1 + d2));
}

TEST_CASE("alpha is piecewise linear in 1/q with its kink at q_c") {
    for (int d = 2; d <= 10; ++d) {
        const Rational kink = q_crit(d).inv_q();
        // second differences vanish on both sides of the kink
        for (int j = 1; j + 1 < 200; ++j) {
            const Rational a = R(j - 1, 400), b = R(j, 400), c = R(j + 1, 400);
            if ((a < kink && c > kink) || b == kink) continue;
            const auto f = [&](const Rational& x) { return alpha(QExponent::from_inverse(x), d); };
            CHECK(f(a) - 2 * f(b) + f(c) == 0);
        }
    }
}

TEST_CASE("schedule parsing and evaluation") {
    CHECK(EpsSchedule::parse("pow:1/2") == EpsSchedule::power_law(R(1, 2)));
    CHECK(EpsSchedule::parse("log:1") == EpsSchedule::log_power(1));
    CHECK(EpsSchedule::parse("unit") == EpsSchedule::unit());
    CHECK(EpsSchedule::parse("pow:1/2").str() == "pow:1/2");
    CHECK_THROWS(EpsSchedule::parse("pow:0"));
    CHECK_THROWS(EpsSchedule::parse("pow:2"));
    CHECK_THROWS(EpsSchedule::parse("exp:1"));
    CHECK(EpsSchedule::power_law(1)(100.0) == doctest::Approx(0.01));
    CHECK(EpsSchedule::log_power(1)(std::exp(2.0)) == doctest::Approx(0.5));
    for (int lam : {3, 10, 100, 1777}) {
        for (const auto& s : {EpsSchedule::power_law(R(1, 2)), EpsSchedule::log_power(1), EpsSchedule::unit()}) {
            const Rational e = s.rational_at(lam);
            CHECK(to_double(e) >= s(lam));
            CHECK(to_double(e) - s(lam) <= 1e-9);
        }
    }
    CHECK(EpsSchedule::power_law(1).rational_at(100) == R(1, 100));
}

TEST_CASE("validate_schedule examples") {
    std::vector<double> grid;
    for (double t = 2; t <= 1e4; t *= 1.05) grid.push_back(t);
    CHECK(validate_schedule(EpsSchedule::power_law(1), grid).ok);
    // t (log t)^-2 decreases on [e, e^2), so the check only passes from e^2 on
    std::vector<double> lgrid, lgrid2;
    for (double t = std::numbers::e; t <= 1e4; t *= 1.05) lgrid.push_back(t);
    for (double t = std::exp(2.0); t <= 1e4; t *= 1.05) lgrid2.push_back(t);
    const auto early = validate_schedule(EpsSchedule::log_power(2), lgrid);
    CHECK_FALSE(early.ok);
    CHECK(early.worst_at < std::exp(2.0) * 1.05);
    CHECK(validate_schedule(EpsSchedule::log_power(2), lgrid2).ok);
    CHECK(validate_schedule(EpsSchedule::log_power(1), lgrid).ok);
    std::vector<double> low{0.5, 1, 2};
    CHECK_THROWS(validate_schedule(EpsSchedule::power_law(1), low));
    CHECK_THROWS(validate_schedule(EpsSchedule::power_law(1), std::vector<double>{}));
}

TEST_CASE("validate_schedule accepts delta <= 1 and rejects delta > 1") {
    std::vector<double> grid;
    for (double t = 3; t <= 1e6; t *= 1.1) grid.push_back(t);
    for (auto d : {R(1, 10), R(1, 2), R(1)}) CHECK(validate_schedule(EpsSchedule::power_law(d), grid).ok);
    EpsSchedule steep;
    steep.kind = EpsSchedule::Kind::PowerLaw;
    steep.delta = R(3, 2);
    const auto rep = validate_schedule(steep, grid);
    CHECK_FALSE(rep.ok);
    CHECK(rep.worst_violation > 0);
}

TEST_CASE("GrowthLaw algebra") {
    const GrowthLaw a{R(1, 2), R(1)}, b{R(1, 3), R(-2)};
    CHECK((a * b) == GrowthLaw{R(5, 6), R(-1)});
    CHECK(b < a);
    CHECK(GrowthLaw{R(1), R(0)} < GrowthLaw{R(1), R(1)});
}

TEST_CASE("product_cluster_law examples") {
    CHECK(product_cluster_law({R(1, 2), 0}, EpsSchedule::power_law(1), QExponent::infinity(), 2) ==
          GrowthLaw{R(1), 0});
    for (const auto& q : {Q(4), Q(10), QExponent::infinity()})
        for (int d = 1; d <= 6; ++d)
            CHECK(product_cluster_law({}, EpsSchedule::unit(), q, d) == GrowthLaw{alpha(q, d) + R(1, 2), 0});
    // B = lambda^{(d1 + d2)(1/2 - 1/q) - 1/2} for S2 x S2, X = S3: total 7(1/2 - 1/12) - 1
    const QExponent q = Q(12);
    const GrowthLaw b{4 * (R(1, 2) - R(1, 12)) - R(1, 2), 0};
    CHECK(product_cluster_law(b, EpsSchedule::power_law(1), q, 3).power == R(23, 12));
    CHECK(product_cluster_law({}, EpsSchedule::log_power(2), q, 3).log_power == -1);
}

TEST_CASE("product law reproduces d(1/2 - 1/q) - 1 above the critical exponents") {
    for (int j = 0; j < 40; ++j) {
        const QExponent q = QExponent::from_inverse(R(j, 400));
        for (int d1 = 2; d1 <= 4; ++d1)
            for (int d2 = 2; d2 <= 4; ++d2)
                for (int n = 2; n <= 4; ++n) {
                    if (q < q_crit(d1) || q < q_crit(d2) || q < q_crit(n)) continue;
                    const GrowthLaw b{(d1 + d2) * (R(1, 2) - q.inv_q()) - R(1, 2), 0};
                    CHECK(b.power == alpha(q, d1) + alpha(q, d2) + R(1, 2));
                    const int d = d1 + d2 + n;
                    CHECK(product_cluster_law(b, EpsSchedule::power_law(1), q, n).power ==
                          d * (R(1, 2) - q.inv_q()) - 1);
                }
    }
}

TEST_CASE("sphere_product_exponent examples") {
    const std::vector<int> d23{2, 3};
    CHECK(sphere_product_exponent(QExponent::infinity(), d23) == R(3, 2));
    CHECK(sphere_product_exponent(QExponent::infinity(), d23) < alpha(QExponent::infinity(), 5));
    CHECK(sphere_product_exponent(Q(2), std::vector<int>{4, 7, 1}) == 0);
    const std::vector<int> five(5, 3);
    CHECK(sphere_product_exponent(Q(6), five) == R(5, 2));
    CHECK(15 * (R(1, 2) - R(1, 6)) - R(5, 2) == R(5, 2));
}

TEST_CASE("interpolated_delta examples") {
    const int d = 7;
    const QExponent qhi = Q(12);
    const Rational hi = d * (R(1, 2) - R(1, 12)) - 1;
    CHECK(interpolated_delta(q_crit(d), d, qhi, hi) == 0);
    CHECK(interpolated_delta(qhi, d, qhi, hi) == alpha(qhi, d) - hi);
    // independent linear interpolation in 1/q
    const QExponent q = Q(8);
    const Rational x0 = q_crit(d).inv_q(), x1 = qhi.inv_q(), x = q.inv_q();
    const Rational y0 = alpha(q_crit(d), d);
    const Rational interp = y0 + (hi - y0) * (x - x0) / (x1 - x0);
    CHECK(interpolated_delta(q, d, qhi, hi) == alpha(q, d) - interp);
    CHECK(interpolated_delta(q, d, qhi, hi) == R(3, 7));
    CHECK_THROWS(interpolated_delta(Q(20), d, qhi, hi));
    CHECK_THROWS(interpolated_delta(Q(5, 2), d, qhi, hi));
    for (int j = 1; j < 20; ++j) {
        const QExponent qq = QExponent::from_inverse(x1 + (x0 - x1) * R(j, 20));
        CHECK(interpolated_delta(qq, d, qhi, hi) > 0);
    }
}
