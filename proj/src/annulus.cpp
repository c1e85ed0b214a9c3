#include "speclab/annulus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace speclab {

namespace {

std::uint64_t to_u64(const BigInt& v) {
    if (v < 0 || v > std::numeric_limits<std::uint64_t>::max()) throw ResourceError("annulus threshold out of range");
    return v.convert_to<std::uint64_t>();
}

long double to_ld(const Rational& r) { return r.convert_to<long double>(); }

// |sqrt(max(lam2 - a_q4/4, 0)) - sqrt(b_q4/4)|, computed as |A - B| / (sqrt A + sqrt B).
long double root_gap(const Rational& lam2, std::uint64_t a_q4, std::uint64_t b_q4) {
    Rational a = lam2 - Rational(a_q4) / 4;
    if (a < 0) a = 0;
    const Rational b = Rational(b_q4) / 4;
    const long double denom = std::sqrt(to_ld(a)) + std::sqrt(to_ld(b));
    if (denom == 0) return 0;
    const Rational diff = a - b;
    return std::fabs(to_ld(diff)) / denom;
}

bool point_less(const JointPoint& a, const JointPoint& b) {
    return a.mu_q4 != b.mu_q4 ? a.mu_q4 < b.mu_q4 : a.nu_q4 < b.nu_q4;
}

}  // namespace

std::string to_string(AnnulusRegion r) {
    switch (r) {
        case AnnulusRegion::High: return "high";
        case AnnulusRegion::Low: return "low";
        case AnnulusRegion::Shell: return "shell";
    }
    return "?";
}

AnnulusGeometry::AnnulusGeometry(const Rational& lam, const Rational& e) : lambda(lam), eps(e) {
    if (lambda < 1) throw std::invalid_argument("annulus: lambda must be >= 1");
    if (eps <= 0 || eps > 1) throw std::invalid_argument("annulus: eps must lie in (0, 1]");
    if (eps * lambda < 1) throw std::invalid_argument("annulus: eps must be >= 1/lambda");
    const Window w(lambda, eps);
    sum_min = w.q4_min();
    sum_max = w.q4_max();
    const Rational lam2 = lambda * lambda;
    high_min = to_u64(ceil(lam2));
    const BigInt fl = floor(lambda);
    int ell = 0;
    while ((BigInt(1) << (ell + 1)) <= fl) ++ell;
    ell_max = std::max(ell, 2);
    for (int l = 2; l <= ell_max; ++l) shell_floor.push_back(to_u64(floor(lam2 / Rational(BigInt(1) << (2 * l - 2)))));
}

bool AnnulusGeometry::contains(std::uint64_t mu_q4, std::uint64_t nu_q4) const {
    const std::uint64_t s = mu_q4 + nu_q4;
    return sum_min <= s && s <= sum_max;
}

std::pair<AnnulusRegion, int> AnnulusGeometry::classify(std::uint64_t nu_q4) const {
    if (nu_q4 >= high_min) return {AnnulusRegion::High, 0};
    if (nu_q4 <= 4) return {AnnulusRegion::Low, 0};
    for (int l = 2; l <= ell_max; ++l)
        if (nu_q4 > shell_floor[static_cast<std::size_t>(l - 2)]) return {AnnulusRegion::Shell, l};
    return {AnnulusRegion::Shell, ell_max};
}

AnnulusDecomposition decompose(const ManifoldSpec& x, const ManifoldSpec& y, Convention conv, const Rational& lambda,
                               const Rational& eps, const EnumerationLimits& limits) {
    const AnnulusGeometry g(lambda, eps);
    const LineTable tx = enumerate_lines(x, conv, lambda + eps, limits);
    const LineTable ty = enumerate_lines(y, conv, lambda + eps, limits);
    const auto& qy = ty.q4_values();

    std::vector<std::vector<JointPoint>> per_mu(tx.size());
    parallel_for(tx.size(), 32, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const std::uint64_t mu = tx.q4(i);
            if (mu > g.sum_max) continue;
            const std::uint64_t nu_lo = g.sum_min > mu ? g.sum_min - mu : 0;
            const std::uint64_t nu_hi = g.sum_max - mu;
            auto it = std::lower_bound(qy.begin(), qy.end(), nu_lo);
            const BigInt mx = tx.mult(i);
            for (; it != qy.end() && *it <= nu_hi; ++it) {
                const auto j = static_cast<std::size_t>(it - qy.begin());
                per_mu[i].push_back({mu, *it, mx * ty.mult(j)});
            }
        }
    });

    AnnulusDecomposition d;
    d.lambda = lambda;
    d.eps = eps;
    d.ell_max = g.ell_max;
    for (auto& pts : per_mu) {
        for (auto& p : pts) {
            const auto [region, ell] = g.classify(p.nu_q4);
            if (region == AnnulusRegion::High) d.omega_high.push_back(p);
            else if (region == AnnulusRegion::Low) d.omega_low.push_back(p);
            else d.omega_ell[ell].push_back(p);
            d.members.push_back(std::move(p));
        }
    }
    return d;
}

double Lemma1Report::worst() const { return std::max({c_high, c_ell_max, interval_ratio_max, c_small_max}); }

Lemma1Report verify_lemma1(const AnnulusDecomposition& d) {
    Lemma1Report rep;
    if (d.members.empty() && d.omega_high.empty() && d.omega_low.empty() && d.omega_ell.empty()) return rep;
    const Rational lam2 = d.lambda * d.lambda;
    const long double lam = to_ld(d.lambda);
    const long double eps = to_ld(d.eps);

    for (const auto& p : d.omega_high)
        rep.c_high = std::max(rep.c_high, static_cast<double>(root_gap(lam2, p.mu_q4, p.nu_q4) / eps));
    for (const auto& p : d.omega_low)
        rep.c_small_max = std::max(rep.c_small_max, static_cast<double>(root_gap(lam2, p.nu_q4, p.mu_q4)));
    for (const auto& [ell, pts] : d.omega_ell) {
        const long double scale = std::ldexp(eps, ell);
        const long double width = std::ldexp(lam, -2 * ell);
        // 2^-ell >= lambda^{-1/2}  <=>  4^ell <= lambda;  2^-ell <= lambda^{-1/2}  <=>  4^ell >= lambda
        const Rational four_ell(BigInt(1) << (2 * ell));
        const bool long_interval = four_ell <= d.lambda;
        const bool small = four_ell >= d.lambda;
        long double mu_min = INFINITY, mu_max = -INFINITY;
        for (const auto& p : pts) {
            rep.c_ell_max = std::max(rep.c_ell_max, static_cast<double>(root_gap(lam2, p.mu_q4, p.nu_q4) / scale));
            const long double mu = std::sqrt(static_cast<long double>(p.mu_q4)) / 2;
            mu_min = std::min(mu_min, mu);
            mu_max = std::max(mu_max, mu);
            if (small)
                rep.c_small_max = std::max(rep.c_small_max, static_cast<double>(root_gap(lam2, p.nu_q4, p.mu_q4)));
        }
        if (long_interval && !pts.empty())
            rep.interval_ratio_max = std::max(rep.interval_ratio_max, static_cast<double>((mu_max - mu_min) / width));
    }

    // Exact cover: the region lists, merged, reproduce the member list.
    std::vector<JointPoint> merged;
    merged.insert(merged.end(), d.omega_high.begin(), d.omega_high.end());
    merged.insert(merged.end(), d.omega_low.begin(), d.omega_low.end());
    for (const auto& [ell, pts] : d.omega_ell) merged.insert(merged.end(), pts.begin(), pts.end());
    std::sort(merged.begin(), merged.end(), point_less);
    bool ok = merged == d.members && std::is_sorted(d.members.begin(), d.members.end(), point_less) &&
              std::adjacent_find(d.members.begin(), d.members.end(),
                                 [](const JointPoint& a, const JointPoint& b) { return !point_less(a, b); }) ==
                  d.members.end();

    // Every point satisfies its region's defining inequalities, rechecked in rationals.
    const Rational lo2 = (d.lambda - d.eps) * (d.lambda - d.eps);
    const Rational hi2 = (d.lambda + d.eps) * (d.lambda + d.eps);
    for (const auto& p : d.members) {
        const Rational r2 = Rational(p.mu_q4 + p.nu_q4) / 4;
        ok = ok && lo2 <= r2 && r2 <= hi2;
    }
    for (const auto& p : d.omega_high) ok = ok && Rational(p.nu_q4) >= lam2;
    for (const auto& p : d.omega_low) ok = ok && Rational(p.nu_q4) < lam2 && p.nu_q4 <= 4;
    for (const auto& [ell, pts] : d.omega_ell) {
        ok = ok && ell >= 2 && ell <= d.ell_max;
        const Rational lower = lam2 / Rational(BigInt(1) << (2 * ell - 2));
        const Rational upper = lam2 / Rational(BigInt(1) << (2 * ell - 4));
        for (const auto& p : pts) {
            const Rational nu(p.nu_q4);
            ok = ok && nu < lam2 && p.nu_q4 > 4 && nu <= upper && (nu > lower || ell == d.ell_max);
        }
    }
    rep.partition_ok = ok;
    return rep;
}

RegionStats region_stats(const AnnulusDecomposition& d) {
    RegionStats s;
    auto add = [&](AnnulusRegion r, int ell, const std::vector<JointPoint>& pts) {
        RegionStat row{r, ell, pts.size(), 0};
        for (const auto& p : pts) row.mult += p.mult;
        s.total_points += row.points;
        s.total_mult += row.mult;
        s.rows.push_back(std::move(row));
    };
    add(AnnulusRegion::High, 0, d.omega_high);
    add(AnnulusRegion::Low, 0, d.omega_low);
    for (const auto& [ell, pts] : d.omega_ell) add(AnnulusRegion::Shell, ell, pts);
    return s;
}

void write_csv(const AnnulusDecomposition& d, std::ostream& out) {
    out << "mu_q4,nu_q4,mult,region,ell\n";
    const AnnulusGeometry g(d.lambda, d.eps);
    for (const auto& p : d.members) {
        const auto [region, ell] = g.classify(p.nu_q4);
        out << p.mu_q4 << ',' << p.nu_q4 << ',' << p.mult << ',' << to_string(region) << ',' << ell << '\n';
    }
}

std::uint64_t splitmix64(std::uint64_t seed, std::uint64_t counter) {
    std::uint64_t z = seed + (counter + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

Rational sample_lambda(std::uint64_t seed, std::uint64_t counter, std::uint64_t lo, std::uint64_t hi) {
    if (lo < 1 || hi < lo) throw std::invalid_argument("sample_lambda: need 1 <= lo <= hi");
    const std::uint64_t span = 1024 * (hi - lo) + 1;
    const std::uint64_t k = 1024 * lo + splitmix64(seed, counter) % span;
    return Rational(BigInt(k), BigInt(1024));
}

Lemma1Sweep lemma1_sweep(const ManifoldSpec& x, const ManifoldSpec& y, Convention conv,
                         const std::vector<EpsSchedule>& schedules, std::uint64_t seed, std::size_t samples,
                         std::uint64_t lo, std::uint64_t hi, double c0, const EnumerationLimits& limits) {
    if (schedules.empty()) throw std::invalid_argument("lemma1_sweep: no schedules");
    Lemma1Sweep sweep;
    sweep.c0 = c0;
    sweep.trials.resize(samples * schedules.size());
    for (std::size_t i = 0; i < samples; ++i) {
        const Rational lambda = sample_lambda(seed, i, lo, hi);
        for (std::size_t s = 0; s < schedules.size(); ++s) {
            Lemma1Trial& t = sweep.trials[i * schedules.size() + s];
            t.index = i;
            t.lambda = lambda;
            t.schedule = schedules[s];
            t.eps = schedules[s].rational_at(lambda);
        }
    }
    parallel_for(sweep.trials.size(), 1, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            Lemma1Trial& t = sweep.trials[i];
            const AnnulusDecomposition d = decompose(x, y, conv, t.lambda, t.eps, limits);
            t.points = d.members.size();
            t.report = verify_lemma1(d);
        }
    });
    bool ok = true;
    for (const auto& t : sweep.trials) {
        sweep.worst.c_high = std::max(sweep.worst.c_high, t.report.c_high);
        sweep.worst.c_ell_max = std::max(sweep.worst.c_ell_max, t.report.c_ell_max);
        sweep.worst.interval_ratio_max = std::max(sweep.worst.interval_ratio_max, t.report.interval_ratio_max);
        sweep.worst.c_small_max = std::max(sweep.worst.c_small_max, t.report.c_small_max);
        sweep.worst.partition_ok = sweep.worst.partition_ok && t.report.partition_ok;
        ok = ok && t.report.within(c0);
    }
    sweep.verdict = ok;
    return sweep;
}

}  // namespace speclab
