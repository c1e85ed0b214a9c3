#include "doctest.h"

#include "speclab/harmonics.hpp"
#include "speclab/quadrature.hpp"
#include "speclab/spectra.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace speclab;

namespace {

constexpr double kPi = std::numbers::pi;

double sphere_volume(int d) { return 2 * std::pow(kPi, (d + 1) / 2.0) / std::tgamma((d + 1) / 2.0); }

double beta(double a, double b) { return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b)); }

// int_{-1}^{1} x^m (1 - x^2)^a dx
double symmetric_moment(int m, double a) { return m % 2 ? 0.0 : beta(m / 2 + 0.5, a + 1); }

// sqrt(pi) Gamma(delta + 1) (2/t)^{delta + 1/2} J_{delta + 1/2}(t)
double multiplier_bessel(double delta, double t) {
    if (t == 0) return std::sqrt(kPi) * std::tgamma(delta + 1) / std::tgamma(delta + 1.5);
    return std::sqrt(kPi) * std::tgamma(delta + 1) * std::pow(2 / t, delta + 0.5) * std::cyl_bessel_j(delta + 0.5, t);
}

}  // namespace

TEST_CASE("gauss_jacobi rules: mass, ordering, exactness") {
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> coef(-1, 1);
    for (int d = 2; d <= 7; ++d) {
        const double a = (d - 2) / 2.0;
        for (int n : {5, 40, 100, 101, 300}) {
            const QuadratureRule r = gauss_jacobi(n, a, a);
            REQUIRE(r.size() == static_cast<std::size_t>(n));
            double mass = 0;
            for (std::size_t i = 0; i < r.size(); ++i) {
                mass += r.weights[i];
                CHECK(r.weights[i] > 0);
                CHECK(std::fabs(r.nodes[i]) < 1);
                if (i) CHECK(r.nodes[i] < r.nodes[i - 1]);
            }
            CHECK(mass == doctest::Approx(static_cast<double>(jacobi_mass(a, a))).epsilon(1e-12));
            // random polynomial of the advertised degree in x = cos(theta)
            const int deg = std::min(r.degree(), 40);
            std::vector<double> c(deg + 1);
            for (auto& v : c) v = coef(rng);
            double exact = 0, quad = 0;
            for (int m = 0; m <= deg; ++m) exact += c[m] * symmetric_moment(m, a);
            for (std::size_t i = 0; i < r.size(); ++i) {
                double p = 0;
                for (int m = deg; m >= 0; --m) p = p * r.nodes[i] + c[m];
                quad += r.weights[i] * p;
            }
            CAPTURE(d);
            CAPTURE(n);
            CHECK(std::fabs(quad - exact) <= 1e-12 * std::max(1.0, std::fabs(exact)));
        }
    }
}

TEST_CASE("asymmetric rules integrate against tanh-sinh") {
    boost::math::quadrature::tanh_sinh<double> ts;
    for (auto [a, b] : {std::pair{0.5, 0.0}, std::pair{-0.5, 0.0}, std::pair{1.5, 0.0}, std::pair{0.25, 2.0}}) {
        for (int n : {30, 250}) {
            const QuadratureRule r = gauss_jacobi(n, a, b);
            auto f = [](double x) { return std::cos(3 * x) + x * x * x; };
            double quad = 0;
            for (std::size_t i = 0; i < r.size(); ++i) quad += r.weights[i] * f(r.nodes[i]);
            // u = 1 - x keeps the endpoint singularity at u = 0 exact
            const double ref =
                ts.integrate([&](double u) { return f(1 - u) * std::pow(u, a) * std::pow(2 - u, b); }, 0.0, 2.0);
            CHECK(quad == doctest::Approx(ref).epsilon(1e-11));
        }
    }
    CHECK_THROWS(gauss_jacobi(10, -1, 0));
    CHECK(points_for_degree(7) == 4);
    CHECK(cached_gauss_jacobi(64, 0, 0)->nodes == gauss_jacobi(64, 0, 0).nodes);
}

TEST_CASE("zonal_values examples") {
    const std::vector<double> theta{0.0, 0.3, 1.0, 2.0, kPi};
    for (double v : zonal_values(2, 0, theta)) CHECK(v == doctest::Approx(1 / std::sqrt(4 * kPi)).epsilon(1e-14));
    for (int k : {1, 5, 40, 1000})
        CHECK(zonal_values(2, k, std::vector<double>{0.0})[0] ==
              doctest::Approx(std::sqrt((2 * k + 1) / (4 * kPi))).epsilon(1e-12));
    for (int k : {0, 1, 4, 17}) {
        const auto a = zonal_values(2, k, theta);
        std::vector<double> mirrored;
        for (double t : theta) mirrored.push_back(kPi - t);
        const auto b = zonal_values(2, k, mirrored);
        for (std::size_t i = 0; i < a.size(); ++i)
            CHECK(b[i] == doctest::Approx((k % 2 ? -1 : 1) * a[i]).epsilon(1e-11).scale(1e-3));
    }
    CHECK_THROWS(zonal_values(1, 2, theta));
}

TEST_CASE("kernel identity: zonal peak equals sqrt(dim H_k / Vol)") {
    for (int d = 2; d <= 8; ++d)
        for (int k : {0, 1, 2, 7, 30, 200}) {
            const double dim = static_cast<double>(to_long_double(sphere_harmonic_dim(d, k)));
            CHECK(zonal_values(d, k, std::vector<double>{0.0})[0] ==
                  doctest::Approx(std::sqrt(dim / sphere_volume(d))).epsilon(1e-10));
        }
}

TEST_CASE("L2 normalization of both families") {
    for (int d = 2; d <= 6; ++d)
        for (int k : {0, 1, 3, 25, 400}) {
            CHECK(lq_norm(HarmonicFamily::zonal(d, k), QExponent()) == doctest::Approx(1).epsilon(1e-10));
            CHECK(lq_norm(HarmonicFamily::highest_weight(d, k), QExponent()) == doctest::Approx(1).epsilon(1e-10));
        }
}

TEST_CASE("lq_norm closed forms on S2") {
    for (int k : {1, 10, 100, 1000})
        CHECK(lq_norm(HarmonicFamily::zonal(2, k), QExponent::infinity()) ==
              doctest::Approx(std::sqrt((2 * k + 1) / (4 * kPi))).epsilon(1e-8));
    // |f| = c sin^k(theta), c^2 = 1 / (2 pi B(k + 1, 1/2))
    for (int k : {1, 6, 50, 300})
        for (int q : {4, 6, 10}) {
            const double c2 = 1 / (2 * kPi * beta(k + 1, 0.5));
            const double integral = std::pow(c2, q / 2.0) * 2 * kPi * beta((q * k + 2) / 2.0, 0.5);
            const double closed = std::pow(integral, 1.0 / q);
            CHECK(lq_norm(HarmonicFamily::highest_weight(2, k), QExponent::from_q(q)) ==
                  doctest::Approx(closed).epsilon(1e-8));
        }
    for (int d = 2; d <= 5; ++d)
        CHECK(lq_norm(HarmonicFamily::highest_weight(d, 20), QExponent::infinity()) ==
              doctest::Approx(highest_weight_constant(d, 20)).epsilon(1e-8));
}

TEST_CASE("normalized lq norms are non-decreasing in q") {
    const std::vector<QExponent> qs{QExponent::from_q(2), QExponent::from_q(3), QExponent::from_q(4),
                                    QExponent::from_q(Rational(13, 2)), QExponent::from_q(10),
                                    QExponent::from_q(40), QExponent::infinity()};
    for (int d = 2; d <= 4; ++d)
        for (auto kind : {HarmonicKind::Zonal, HarmonicKind::HighestWeight})
            for (int k : {0, 2, 15, 80}) {
                const HarmonicFamily f{kind, d, k};
                double prev = 0;
                for (const auto& q : qs) {
                    const double v = lq_norm(f, q) / std::pow(sphere_volume(d), static_cast<double>(q.inv_q().convert_to<double>()) - 0.5);
                    CHECK(v >= prev * (1 - 1e-10));
                    prev = v;
                }
            }
}

TEST_CASE("lq_norm rejects unsuitable rules") {
    const HarmonicFamily f = HarmonicFamily::zonal(3, 20);
    const QExponent q = QExponent::from_q(6);
    CHECK(required_degree(f, q) == 120 + 3 + 10);
    CHECK_THROWS_AS(lq_norm(f, q, norm_rule(f, 60)), std::invalid_argument);
    CHECK_THROWS_AS(lq_norm(f, q, norm_rule(HarmonicFamily::highest_weight(3, 20), 200)), std::invalid_argument);
    CHECK(lq_norm(f, q, norm_rule(f, 400)) == doctest::Approx(lq_norm(f, q)).epsilon(1e-12));
}

TEST_CASE("degree ladder") {
    const auto ks = degree_ladder(20, 2000, 24);
    CHECK(ks.front() == 20);
    CHECK(ks.back() == 2000);
    for (std::size_t i = 1; i < ks.size(); ++i) CHECK(ks[i] > ks[i - 1]);
}

TEST_CASE("growth fits follow the branch values") {
    const auto q10 = QExponent::from_q(10);
    const GrowthReport z = fit_growth(HarmonicKind::Zonal, 2, QExponent::infinity(), 10, 400, 12);
    CHECK(z.expected == doctest::Approx(0.5));
    CHECK(std::fabs(z.fit.slope - 0.5) <= 0.05);
    const GrowthReport zq = fit_growth(HarmonicKind::Zonal, 2, q10, 10, 400, 12);
    CHECK(zq.expected == doctest::Approx(0.3));
    CHECK(std::fabs(zq.fit.slope - 0.3) <= 0.05);
    const GrowthReport h = fit_growth(HarmonicKind::HighestWeight, 2, q10, 10, 400, 12);
    CHECK(h.expected == doctest::Approx(0.2));
    CHECK(std::fabs(h.fit.slope - 0.2) <= 0.05);
    CHECK_THROWS_AS(fit_growth(HarmonicKind::Zonal, 2, q10, 10, 100, 12), std::invalid_argument);
}

TEST_CASE("growth slopes are invariant under rescaling") {
    const GrowthReport z = fit_growth(HarmonicKind::Zonal, 3, QExponent::from_q(8), 10, 400, 10);
    std::vector<double> x, y, y5;
    for (const auto& s : z.samples) {
        x.push_back(s.lambda);
        y.push_back(s.norm);
        y5.push_back(5 * s.norm);
    }
    CHECK(loglog_fit(x, y5).slope == doctest::Approx(loglog_fit(x, y).slope).epsilon(1e-12));
    CHECK(loglog_fit(x, y).slope == doctest::Approx(z.fit.slope).epsilon(1e-12));
}

TEST_CASE("tensor growth") {
    const QExponent q12 = QExponent::from_q(12);
    const std::vector<TensorFactor> zz{{HarmonicKind::Zonal, 2, 1}, {HarmonicKind::Zonal, 3, 1}};
    const GrowthReport t = tensor_growth(zz, q12, 10, 400, 12);
    const double target = to_double(alpha(q12, 2) + alpha(q12, 3));
    CHECK(t.expected == doctest::Approx(target));
    CHECK(std::fabs(t.fit.slope - target) <= 0.07);
    // a frozen factor only rescales the norm
    const std::vector<TensorFactor> frozen{{HarmonicKind::Zonal, 2, 1}, {HarmonicKind::Zonal, 4, 0}};
    const GrowthReport f = tensor_growth(frozen, QExponent::infinity(), 10, 400, 12);
    const GrowthReport single = fit_growth(HarmonicKind::Zonal, 2, QExponent::infinity(), 10, 400, 12);
    CHECK(f.expected == doctest::Approx(single.expected));
    CHECK(std::fabs(f.fit.slope - single.fit.slope) < 0.01);
    const std::vector<TensorFactor> none{{HarmonicKind::Zonal, 2, 0}};
    CHECK_THROWS(tensor_growth(none, q12, 10, 400, 12));
}

TEST_CASE("multiplier transform values") {
    CHECK(multiplier_value(1, 0).value == doctest::Approx(4.0 / 3).epsilon(1e-14));
    for (double delta : {0.5, 1.0, 1.5, 2.0, 3.25})
        for (double t : {0.0, 0.5, 3.0, 17.0, 250.0, 1000.0}) {
            const MultiplierSample s = multiplier_value(delta, t);
            CAPTURE(delta);
            CAPTURE(t);
            CHECK(std::fabs(s.value - multiplier_bessel(delta, t)) < 1e-12);
            CHECK(s.error < 1e-12);
            CHECK(multiplier_value(delta, -t).value == s.value);
        }
    for (double t : {4096.0, 9999.0}) CHECK(std::fabs(multiplier_value(1, t).value - multiplier_bessel(1, t)) < 1e-12);
    CHECK_THROWS(multiplier_value(1, 2e4));
    CHECK_THROWS(multiplier_value(0, 1));
    const auto grid = multiplier_grid(10, 1e4, 64);
    CHECK(grid.front() == 10);
    CHECK(grid.back() <= 1e4);
    CHECK(grid.size() == 638);
}
