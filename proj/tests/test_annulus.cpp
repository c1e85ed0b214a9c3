#include "doctest.h"

#include "speclab/annulus.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <set>
#include <sstream>
#include <tuple>

using namespace speclab;

namespace {

Rational R(long long a, long long b = 1) { return Rational(a, b); }

const ManifoldSpec kT1 = ManifoldSpec::torus(1);

// Region of a point by direct rational comparisons on nu itself.
std::pair<AnnulusRegion, int> classify_oracle(const Rational& lambda, std::uint64_t nu_q4) {
    const Rational nu2(BigInt(nu_q4), BigInt(4));
    const Rational lam2 = lambda * lambda;
    if (nu2 >= lam2 / 4) return {AnnulusRegion::High, 0};
    if (nu2 <= 1) return {AnnulusRegion::Low, 0};
    int ell_max = 2;
    while (Rational(BigInt(1) << (ell_max + 1)) <= lambda) ++ell_max;
    for (int l = 2; l <= ell_max; ++l) {
        const Rational lo = lam2 / Rational(BigInt(1) << (2 * l));
        const Rational hi = lam2 / Rational(BigInt(1) << (2 * l - 2));
        if (nu2 > lo && nu2 <= hi) return {AnnulusRegion::Shell, l};
    }
    return {AnnulusRegion::Shell, ell_max};
}

using Key = std::tuple<std::uint64_t, std::uint64_t>;

std::set<Key> keys(const std::vector<JointPoint>& pts) {
    std::set<Key> out;
    for (const auto& p : pts) out.insert({p.mu_q4, p.nu_q4});
    return out;
}

}  // namespace

TEST_CASE("region examples on T1 x T1") {
    const AnnulusDecomposition d = decompose(kT1, kT1, Convention::Shifted, 5, R(1, 5));
    const auto high = keys(d.omega_high), low = keys(d.omega_low);
    CHECK(high.count({36, 64}) == 1);  // (mu, nu) = (3, 4)
    CHECK(low.count({100, 0}) == 1);   // (5, 0)
    const AnnulusGeometry g(100, R(1, 100));
    CHECK(g.classify(36) == std::pair{AnnulusRegion::Shell, 6});  // nu = 3
    CHECK(g.classify(4 * 2 * 2) == std::pair{AnnulusRegion::Shell, 6});
    CHECK(g.classify(4) == std::pair{AnnulusRegion::Low, 0});
    CHECK(g.classify(10000) == std::pair{AnnulusRegion::High, 0});
    CHECK(g.classify(9999) == std::pair{AnnulusRegion::Shell, 2});
    CHECK(g.ell_max == 6);
}

TEST_CASE("geometry preconditions") {
    CHECK_THROWS(AnnulusGeometry(R(1, 2), R(1, 2)));
    CHECK_THROWS(AnnulusGeometry(10, R(3, 2)));
    CHECK_THROWS(AnnulusGeometry(10, R(1, 20)));
    CHECK_NOTHROW(AnnulusGeometry(3, 1));
    CHECK(AnnulusGeometry(3, 1).ell_max == 2);
}

TEST_CASE("classification matches the rational oracle") {
    for (int k : {1024, 1500, 5 * 1024, 33333, 100 * 1024 + 7, 2000 * 1024}) {
        const Rational lambda(BigInt(k), BigInt(1024));
        const AnnulusGeometry g(lambda, 1);
        const std::uint64_t top = q4_bound(lambda) + 8;
        const std::uint64_t step = std::max<std::uint64_t>(1, top / 20000);
        for (std::uint64_t nu = 0; nu <= top; nu += step) REQUIRE(g.classify(nu) == classify_oracle(lambda, nu));
    }
}

TEST_CASE("membership is exact at extended precision") {
    using Big = boost::multiprecision::cpp_bin_float_100;
    for (int k : {100 * 1024, 257 * 1024 + 3, 1999 * 1024 + 511}) {
        const Rational lambda(BigInt(k), BigInt(1024));
        const Rational eps = EpsSchedule::power_law(R(1, 2)).rational_at(lambda);
        const AnnulusDecomposition d = decompose(kT1, kT1, Convention::Shifted, lambda, eps);
        const Big lam = Big(k) / 1024, e = Big(numerator(eps)) / Big(denominator(eps));
        for (const auto& p : d.members) {
            const Big mu = sqrt(Big(p.mu_q4)) / 2, nu = sqrt(Big(p.nu_q4)) / 2;
            CHECK(abs(lam - sqrt(mu * mu + nu * nu)) <= e);
            const bool high = nu >= lam / 2, low = nu <= 1;
            const auto [region, ell] = AnnulusGeometry(lambda, eps).classify(p.nu_q4);
            CHECK((region == AnnulusRegion::High) == high);
            CHECK((region == AnnulusRegion::Low) == (!high && low));
            if (region == AnnulusRegion::Shell && ell < d.ell_max) {
                CHECK(nu > lam / pow(Big(2), ell));
                CHECK(nu <= lam / pow(Big(2), ell - 1));
            }
        }
    }
}

TEST_CASE("decomposition is an exact partition of a brute-force annulus") {
    for (int k : {5 * 1024, 37 * 1024 + 100, 150 * 1024}) {
        const Rational lambda(BigInt(k), BigInt(1024));
        for (const auto& s : {EpsSchedule::power_law(1), EpsSchedule::power_law(R(1, 2)), EpsSchedule::log_power(1)}) {
            const Rational eps = s.rational_at(lambda);
            const AnnulusDecomposition d = decompose(kT1, kT1, Convention::Shifted, lambda, eps);
            // brute force over mu, nu >= 0 on T1 (multiplicity 1 at 0, 2 otherwise)
            std::set<Key> brute;
            const Rational lo = (lambda - eps) * (lambda - eps), hi = (lambda + eps) * (lambda + eps);
            const auto top = floor(lambda + eps).convert_to<std::uint64_t>();
            for (std::uint64_t m = 0; m <= top; ++m)
                for (std::uint64_t n = 0; n <= top; ++n) {
                    const Rational r2(BigInt(m * m + n * n));
                    if (r2 >= lo && r2 <= hi) brute.insert({4 * m * m, 4 * n * n});
                }
            CHECK(keys(d.members) == brute);
            std::size_t total = d.omega_high.size() + d.omega_low.size();
            std::set<Key> seen = keys(d.omega_high);
            for (const auto& p : d.omega_low) CHECK(seen.insert({p.mu_q4, p.nu_q4}).second);
            for (const auto& [ell, pts] : d.omega_ell) {
                CHECK(ell >= 2);
                CHECK(ell <= d.ell_max);
                total += pts.size();
                for (const auto& p : pts) CHECK(seen.insert({p.mu_q4, p.nu_q4}).second);
            }
            CHECK(total == d.members.size());
            CHECK(seen == brute);
            for (const auto& p : d.members) {
                const BigInt mult = (p.mu_q4 ? 2 : 1) * (p.nu_q4 ? 2 : 1);
                CHECK(p.mult == mult);
            }
            CHECK(verify_lemma1(d).partition_ok);
        }
    }
}

TEST_CASE("verify_lemma1 examples") {
    AnnulusDecomposition empty;
    empty.lambda = 10;
    empty.eps = R(1, 10);
    const Lemma1Report e = verify_lemma1(empty);
    CHECK(e.c_high == 0);
    CHECK(e.c_ell_max == 0);
    CHECK(e.interval_ratio_max == 0);
    CHECK(e.c_small_max == 0);
    CHECK(e.partition_ok);

    AnnulusDecomposition one;
    one.lambda = 5;
    one.eps = R(1, 5);
    one.members = {{36, 64, 4}};
    one.omega_high = one.members;
    const Lemma1Report p = verify_lemma1(one);
    CHECK(p.c_high == 0);
    CHECK(p.partition_ok);

    AnnulusDecomposition broken = one;
    broken.omega_low = one.members;
    CHECK_FALSE(verify_lemma1(broken).partition_ok);
    AnnulusDecomposition misplaced = one;
    misplaced.omega_high.clear();
    misplaced.omega_low = one.members;
    CHECK_FALSE(verify_lemma1(misplaced).partition_ok);
}

TEST_CASE("shrinking eps shrinks every region") {
    const auto s2 = ManifoldSpec::sphere(2), s3 = ManifoldSpec::sphere(3);
    for (int k : {40 * 1024, 97 * 1024 + 300}) {
        const Rational lambda(BigInt(k), BigInt(1024));
        const AnnulusDecomposition wide = decompose(s2, s3, Convention::Shifted, lambda, R(1, 2));
        const AnnulusDecomposition narrow = decompose(s2, s3, Convention::Shifted, lambda, R(1, 8));
        auto subset = [](const std::vector<JointPoint>& a, const std::vector<JointPoint>& b) {
            const auto ka = keys(a), kb = keys(b);
            return std::includes(kb.begin(), kb.end(), ka.begin(), ka.end());
        };
        CHECK(subset(narrow.members, wide.members));
        CHECK(subset(narrow.omega_high, wide.omega_high));
        CHECK(subset(narrow.omega_low, wide.omega_low));
        for (const auto& [ell, pts] : narrow.omega_ell) {
            REQUIRE(wide.omega_ell.count(ell));
            CHECK(subset(pts, wide.omega_ell.at(ell)));
        }
    }
}

TEST_CASE("region_stats totals equal window counts") {
    const auto s2 = ManifoldSpec::sphere(2), s3 = ManifoldSpec::sphere(3), t2 = ManifoldSpec::torus(2);
    for (auto [x, y] : {std::pair{kT1, kT1}, std::pair{s2, s3}, std::pair{s2, t2}}) {
        for (const auto& [lambda, eps] : {std::pair{R(60), R(1, 60)}, std::pair{R(123, 4), R(1, 3)}, std::pair{R(3, 2), R(2, 3)}}) {
            const AnnulusDecomposition d = decompose(x, y, Convention::Shifted, lambda, eps);
            const RegionStats st = region_stats(d);
            CHECK(st.total_points == d.members.size());
            CHECK(st.total_mult == window_count(ManifoldSpec::product({x, y}), Convention::Shifted, Window(lambda, eps)));
            BigInt sum = 0;
            for (const auto& r : st.rows) sum += r.mult;
            CHECK(sum == st.total_mult);
        }
    }
    const AnnulusDecomposition d = decompose(s2, s3, Convention::Shifted, 60, R(1, 60));
    std::ostringstream hist;
    for (const auto& r : region_stats(d).rows) hist << to_string(r.region) << r.ell << ':' << r.points << ' ';
    MESSAGE("S2 x S3, lambda = 60, eps = 1/60: " << hist.str());
    CHECK(region_stats(d).total_points > 0);
}

TEST_CASE("csv export") {
    const AnnulusDecomposition d = decompose(kT1, kT1, Convention::Shifted, 5, R(1, 5));
    std::ostringstream out;
    write_csv(d, out);
    const std::string s = out.str();
    CHECK(s.rfind("mu_q4,nu_q4,mult,region,ell\n", 0) == 0);
    CHECK(s.find("36,64,4,high,0\n") != std::string::npos);
    CHECK(s.find("100,0,2,low,0\n") != std::string::npos);
    CHECK(static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')) == d.members.size() + 1);
}

TEST_CASE("splitmix64 reference outputs") {
    CHECK(splitmix64(0, 0) == 0xE220A8397B1DCDAFULL);
    CHECK(splitmix64(1234567, 0) == 6457827717110365317ULL);
    CHECK(splitmix64(1234567, 1) == 3203168211198807973ULL);
    for (std::uint64_t c = 0; c < 200; ++c) {
        const Rational l = sample_lambda(7, c, 100, 2000);
        CHECK(l >= 100);
        CHECK(l <= 2000);
        CHECK(denominator(Rational(l * 1024)) == 1);
        CHECK(l == sample_lambda(7, c, 100, 2000));
    }
    CHECK(sample_lambda(7, 0, 100, 2000) != sample_lambda(8, 0, 100, 2000));
}

TEST_CASE("lemma1 sweep is thread-count independent") {
    const std::vector<EpsSchedule> schedules{EpsSchedule::power_law(1), EpsSchedule::power_law(R(1, 2)),
                                             EpsSchedule::log_power(1)};
    auto run = [&](unsigned threads) {
        set_num_threads(threads);
        const Lemma1Sweep s = lemma1_sweep(kT1, kT1, Convention::Shifted, schedules, 3, 6);
        std::ostringstream out;
        for (const auto& t : s.trials)
            out << to_string(t.lambda) << ' ' << t.schedule.str() << ' ' << t.points << ' ' << t.report.c_high << ' '
                << t.report.c_ell_max << ' ' << t.report.interval_ratio_max << ' ' << t.report.c_small_max << '\n';
        CHECK(s.verdict);
        CHECK(s.trials.size() == 18);
        return out.str();
    };
    const std::string one = run(1);
    CHECK(run(4) == one);
    CHECK(run(8) == one);
    set_num_threads(1);
}
