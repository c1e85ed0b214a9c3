#include "doctest.h"

#include "speclab/weyl.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <numbers>
#include <vector>

using namespace speclab;

namespace {

constexpr double kPi = std::numbers::pi;

Rational R(long long a, long long b = 1) { return Rational(a, b); }

std::vector<double> geometric_grid(double lo, double hi, int per_octave) {
    std::vector<double> g;
    for (int i = 0;; ++i) {
        const double x = lo * std::exp2(static_cast<double>(i) / per_octave);
        if (x > hi) break;
        g.push_back(x);
    }
    return g;
}

// (2 pi)^{-d} |S^{d-1}| lambda^d int_0^1 (1 - r^2)^delta r^{d-1} dr by tanh-sinh quadrature.
double riesz_main_oracle(int d, double delta, double lambda) {
    boost::math::quadrature::tanh_sinh<double> ts;
    const double integral =
        ts.integrate([&](double r) { return std::pow(1 - r * r, delta) * std::pow(r, d - 1); }, 0.0, 1.0);
    const double area = 2 * std::pow(kPi, d / 2.0) / std::tgamma(d / 2.0);
    return std::pow(2 * kPi, -d) * area * std::pow(lambda, d) * integral;
}

}  // namespace

TEST_CASE("unit_ball_volume examples") {
    CHECK(unit_ball_volume(2).value == doctest::Approx(kPi).epsilon(1e-15));
    CHECK(unit_ball_volume(1).value == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(unit_ball_volume(3).value == doctest::Approx(4 * kPi / 3).epsilon(1e-15));
    CHECK(unit_ball_volume(2).omega.coeff == 1);
    CHECK(unit_ball_volume(3).omega.coeff == R(4, 3));
    CHECK(unit_ball_volume(3).omega.pi_power == 1);
    for (int n = 1; n <= 25; ++n) {
        const double v = std::pow(kPi, n / 2.0) / std::tgamma(n / 2.0 + 1);
        CHECK(unit_ball_volume(n).value == doctest::Approx(v).epsilon(1e-14));
        CHECK(unit_ball_volume(n).sphere_area == doctest::Approx(n * v).epsilon(1e-14));
    }
}

TEST_CASE("manifold_volume examples") {
    CHECK(manifold_volume(parse_spec("S2")).coeff == 4);
    CHECK(manifold_volume(parse_spec("S2")).pi_power == 1);
    CHECK(manifold_volume(parse_spec("T2")).coeff == 4);
    CHECK(manifold_volume(parse_spec("T2")).pi_power == 2);
    CHECK(manifold_volume(parse_spec("S2 x S3")).coeff == 8);
    CHECK(manifold_volume(parse_spec("S2 x S3")).pi_power == 3);
    for (int d = 1; d <= 12; ++d) {
        const double v = 2 * std::pow(kPi, (d + 1) / 2.0) / std::tgamma((d + 1) / 2.0);
        CHECK(static_cast<double>(manifold_volume(ManifoldSpec::sphere(d)).value()) == doctest::Approx(v).epsilon(1e-14));
    }
}

TEST_CASE("weyl_main_term examples") {
    for (double lam : {1.0, 7.5, 1000.0}) {
        CHECK(weyl_main_term(parse_spec("T2"), lam) == doctest::Approx(kPi * lam * lam).epsilon(1e-14));
        CHECK(weyl_main_term(parse_spec("S2"), lam) == doctest::Approx(lam * lam).epsilon(1e-14));
    }
    const double omega5 = 8 * kPi * kPi / 15;
    CHECK(weyl_main_term(parse_spec("S2 x S3"), 10) ==
          doctest::Approx(std::pow(2 * kPi, -5) * omega5 * 8 * std::pow(kPi, 3) * 1e5).epsilon(1e-14));
    CHECK(weyl_constant(parse_spec("T3")).coeff == R(4, 3));
    CHECK(weyl_constant(parse_spec("T3")).pi_power == 1);
}

TEST_CASE("remainder_series examples") {
    const auto grid = geometric_grid(1, 300, 32);
    for (const auto& s : remainder_series(parse_spec("T1"), Convention::Shifted, grid)) {
        CHECK(s.r > -1);
        CHECK(s.r <= 1);
        CHECK(s.r == doctest::Approx(2 * std::floor(s.lambda) + 1 - 2 * s.lambda).epsilon(1e-12));
    }
    const std::vector<double> ten{10.0};
    const auto t2 = remainder_series(parse_spec("T2"), Convention::Shifted, ten);
    CHECK(t2[0].n == 317);
    CHECK(t2[0].r == doctest::Approx(317 - 100 * kPi).epsilon(1e-12));
    CHECK(t2[0].r == doctest::Approx(2.84).epsilon(1e-3));
}

TEST_CASE("remainder series is monotone in N") {
    const auto grid = geometric_grid(2, 120, 40);
    for (const char* spec : {"T2", "S2 x S2", "S2 x T1"}) {
        const auto series = remainder_series(parse_spec(spec), Convention::Geometric, grid);
        for (std::size_t i = 1; i < series.size(); ++i) CHECK(series[i].n >= series[i - 1].n);
    }
}

TEST_CASE("fit_remainder on synthetic data") {
    std::vector<RemainderSample> s;
    for (double lam : geometric_grid(4, 4096, 64)) s.push_back({lam, 0, 0.0, std::pow(lam, 1.5)});
    const RemainderFit f = fit_remainder(s, 3, EpsSchedule::power_law(R(1, 2)));
    CHECK(std::fabs(f.fit.slope - 1.5) < 1e-9);
    CHECK(f.bound_exponent == doctest::Approx(1.5));
    CHECK(f.verdict);
    const RemainderFit g = fit_remainder(s, 3, EpsSchedule::power_law(1));
    CHECK_FALSE(g.verdict);
    const RemainderFit h = fit_remainder(s, 3, EpsSchedule::log_power(1));
    CHECK(h.informational);
    std::vector<RemainderSample> one_block(s.begin(), s.begin() + 10);
    CHECK_THROWS_AS(fit_remainder(one_block, 3, EpsSchedule::unit()), std::invalid_argument);
    CHECK(remainder_bound_exponent(2, EpsSchedule::power_law(R(1, 3))) == doctest::Approx(2.0 / 3));
    CHECK(remainder_bound_exponent(2, EpsSchedule::unit()) == 1);
}

TEST_CASE("counting fits have slope close to the dimension") {
    const auto grid = geometric_grid(16, 1024, 32);
    for (const std::string spec : {"T2", "S2", "S3", "S2 x T1", "S2 x S2", "T3"}) {
        const ManifoldSpec m = parse_spec(spec);
        for (auto conv : {Convention::Shifted, Convention::Geometric}) {
            const ExponentFit f = fit_counting(remainder_series(m, conv, grid));
            CAPTURE(spec);
            CHECK(std::fabs(f.slope - m.dim()) <= 0.02);
        }
    }
}

TEST_CASE("T2 remainder changes sign often") {
    const auto series = remainder_series(parse_spec("T2"), Convention::Shifted, geometric_grid(10, 1e4, 512));
    int changes = 0;
    for (std::size_t i = 1; i < series.size(); ++i)
        if ((series[i].r > 0) != (series[i - 1].r > 0)) ++changes;
    MESSAGE("T2 remainder sign changes on [10, 1e4]: " << changes);
    CHECK(changes >= 3);
}

TEST_CASE("riesz_diagonal examples") {
    const double vol = 4 * kPi * kPi;
    CHECK(riesz_diagonal(parse_spec("T2"), Convention::Shifted, 0, 10) == doctest::Approx(317 / vol).epsilon(1e-14));
    CHECK(riesz_diagonal(parse_spec("S2 x T1"), Convention::Shifted, R(1, 1000000), R(1, 2)) ==
          doctest::Approx(0.0).epsilon(1e-12));  // lowest shifted S2 line is 1/2; below it nothing
    CHECK(riesz_diagonal(parse_spec("T3"), Convention::Shifted, R(1, 1000000), R(1, 2)) ==
          doctest::Approx(1 / (8 * std::pow(kPi, 3))).epsilon(1e-5));
    const double lam = 1000;
    const double s = riesz_diagonal(parse_spec("T2"), Convention::Shifted, 1, 1000);
    const double main = (kPi / 2) * lam * lam / vol;
    CHECK(std::fabs((s - main) * vol) < 50);
}

TEST_CASE("riesz with delta = 0 recovers the count") {
    for (const char* spec : {"T2", "S2 x S2", "S3 x T1"}) {
        const ManifoldSpec m = parse_spec(spec);
        const double vol = static_cast<double>(manifold_volume(m).value());
        for (int k : {3, 17, 40}) {
            const double n = static_cast<double>(to_long_double(count(m, Convention::Shifted, k)));
            CHECK(riesz_diagonal(m, Convention::Shifted, 0, k) * vol == doctest::Approx(n).epsilon(1e-12));
        }
    }
}

TEST_CASE("riesz_main_term examples") {
    const double lam = 37;
    const double closed = std::pow(2 * kPi, -2) * (kPi / 2) * lam * lam;
    CHECK(riesz_main_term(2, 1, lam).value == doctest::Approx(closed).epsilon(1e-12));
    CHECK(riesz_main_term(2, 1, lam).guaranteed);
    CHECK_FALSE(riesz_main_term(2, 0.5, lam).guaranteed);
    CHECK(beta_function(2, 1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(riesz_main_term(4, 2, 5).value == doctest::Approx(riesz_main_oracle(4, 2, 5)).epsilon(1e-10));
}

TEST_CASE("riesz_main_term matches quadrature") {
    for (double delta : {1.0, 1.5, 2.0, 2.5})
        for (int d = 1; d <= 8; ++d) {
            CAPTURE(d);
            CAPTURE(delta);
            CHECK(riesz_main_term(d, delta, 3.25).value ==
                  doctest::Approx(riesz_main_oracle(d, delta, 3.25)).epsilon(1e-10));
        }
}

TEST_CASE("beta identity") {
    for (auto [a, b] : {std::pair{2, 2}, std::pair{1, 1}, std::pair{5, 7}}) CHECK(beta_identity_residual(a, b).residual < 1e-12);
    for (int a = 1; a <= 12; ++a)
        for (int b = 1; b <= 12; ++b) {
            const BetaIdentity r = beta_identity_residual(a, b);
            CHECK(r.residual < 1e-12);
            CHECK(r.residual_plus_two > 1e-6);
        }
    CHECK_THROWS(beta_identity_residual(0, 3));
}

TEST_CASE("improved product check") {
    const auto grid = geometric_grid(4, 256, 64);
    SUBCASE("S1 x T2 with sigma = 1/3") {
        const ProductWeylReport r = improved_product_weyl_check(parse_spec("S1"), parse_spec("T2"), Convention::Shifted,
                                                                EpsSchedule::power_law(R(1, 3)), grid);
        MESSAGE("T2 slope " << r.y_fit.fit.slope << ", product slope " << r.product_fit.fit.slope);
        CHECK(r.y_consistent);
        CHECK(r.product_fit.fit.slope <= 2 - 1.0 / 3 + 0.15);
        CHECK(r.verdict);
    }
    SUBCASE("S2 x T1 with sigma = 1") {
        const ProductWeylReport r = improved_product_weyl_check(parse_spec("S2"), parse_spec("T1"), Convention::Shifted,
                                                                EpsSchedule::power_law(1), grid);
        MESSAGE("T1 slope " << r.y_fit.fit.slope << ", product slope " << r.product_fit.fit.slope
                            << ", product verdict " << r.product_fit.verdict);
        // R_T1 is bounded: slope 0 = d_Y - 1, so sigma = 0 rather than 1
        CHECK(r.y_fit.fit.slope <= 0.15);
        CHECK_FALSE(r.y_consistent);
        CHECK_FALSE(r.verdict);
        CHECK(r.product_fit.fit.slope > 1 + 0.15);
        const ProductWeylReport u = improved_product_weyl_check(parse_spec("S2"), parse_spec("T1"), Convention::Shifted,
                                                                EpsSchedule::unit(), grid);
        CHECK(u.y_consistent);
        CHECK(u.verdict);
    }
    SUBCASE("one block is rejected") {
        const std::vector<double> tiny{4.0, 4.5, 5.0};
        CHECK_THROWS_AS(improved_product_weyl_check(parse_spec("S2"), parse_spec("T1"), Convention::Shifted,
                                                    EpsSchedule::power_law(1), tiny),
                        std::invalid_argument);
    }
}
