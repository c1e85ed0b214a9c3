#include "speclab/harmonics.hpp"

#include "speclab/common.hpp"
#include "speclab/weyl.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace speclab {

namespace {

constexpr double kPi = std::numbers::pi;

void require_dim(int d) {
    if (d < 2) throw std::invalid_argument("harmonics need d >= 2");
}

// Orthonormal p_k for the symmetric weight (1 - x^2)^a on [-1, 1].
class SymmetricPoly {
public:
    SymmetricPoly(int k, double a) : k_(k), b_(static_cast<std::size_t>(k) + 1) {
        for (int j = 1; j <= k; ++j) b_[static_cast<std::size_t>(j)] = static_cast<double>(jacobi_b(j, a, a));
        p0_ = static_cast<double>(1 / std::sqrt(jacobi_mass(a, a)));
    }

    double operator()(double x) const {
        double pm = 0, p = p0_;
        for (int j = 0; j < k_; ++j) {
            const auto ju = static_cast<std::size_t>(j);
            const double next = (x * p - (j ? b_[ju] * pm : 0.0)) / b_[ju + 1];
            pm = p;
            p = next;
        }
        return p;
    }

private:
    int k_;
    std::vector<double> b_;
    double p0_ = 0;
};

double sphere_area(int n) { return unit_ball_volume(n).sphere_area; }  // |S^{n-1}|

double zonal_alpha(int d) { return (d - 2) / 2.0; }
double hw_alpha(int d) { return (d - 3) / 2.0; }

// Maximum of |g| on [lo, hi]: dense grid, then golden-section refinement around the best cell.
template <class G>
double refined_max(const G& g, double lo, double hi, std::size_t cells) {
    std::size_t best = 0;
    double best_val = -1;
    for (std::size_t i = 0; i <= cells; ++i) {
        const double x = i == cells ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(cells);
        const double v = std::fabs(g(x));
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }
    const double h = (hi - lo) / static_cast<double>(cells);
    double a = std::max(lo, lo + h * (static_cast<double>(best) - 1));
    double b = std::min(hi, lo + h * (static_cast<double>(best) + 1));
    const double r = (std::sqrt(5.0) - 1) / 2;
    for (int it = 0; it < 80 && b - a > 1e-15 * (1 + std::fabs(a)); ++it) {
        const double c = b - r * (b - a);
        const double e = a + r * (b - a);
        if (std::fabs(g(c)) >= std::fabs(g(e))) b = e;
        else a = c;
    }
    return std::max(best_val, std::fabs(g((a + b) / 2)));
}

double expected_slope(HarmonicKind kind, int d, const QExponent& q) {
    return to_double(kind == HarmonicKind::Zonal ? alpha_upper_branch(q, d) : alpha_lower_branch(q, d));
}

double q_value(const QExponent& q) { return q.q_double(); }

}  // namespace

std::string to_string(HarmonicKind k) { return k == HarmonicKind::Zonal ? "zonal" : "highest-weight"; }

HarmonicKind parse_harmonic_kind(const std::string& text) {
    if (text == "zonal") return HarmonicKind::Zonal;
    if (text == "highest-weight" || text == "hw") return HarmonicKind::HighestWeight;
    throw std::invalid_argument("unknown harmonic family '" + text + "' (expected zonal|highest-weight)");
}

HarmonicFamily HarmonicFamily::zonal(int d, int k) {
    require_dim(d);
    if (k < 0) throw std::invalid_argument("degree must be >= 0");
    return {HarmonicKind::Zonal, d, k};
}

HarmonicFamily HarmonicFamily::highest_weight(int d, int k) {
    require_dim(d);
    if (k < 0) throw std::invalid_argument("degree must be >= 0");
    return {HarmonicKind::HighestWeight, d, k};
}

double HarmonicFamily::lambda() const { return k + (d - 1) / 2.0; }

std::string HarmonicFamily::str() const {
    return to_string(kind) + "(S" + std::to_string(d) + ", k=" + std::to_string(k) + ")";
}

std::vector<double> zonal_values(int d, int k, std::span<const double> theta) {
    require_dim(d);
    if (k < 0) throw std::invalid_argument("degree must be >= 0");
    const SymmetricPoly p(k, zonal_alpha(d));
    const double scale = 1 / std::sqrt(sphere_area(d));
    std::vector<double> out(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) out[i] = p(std::cos(theta[i])) * scale;
    return out;
}

double highest_weight_constant(int d, int k) {
    require_dim(d);
    if (k < 0) throw std::invalid_argument("degree must be >= 0");
    const double lb = std::lgamma(k + 1.0) + std::lgamma((d - 1) / 2.0) - std::lgamma(k + 1.0 + (d - 1) / 2.0);
    return std::exp(-0.5 * (std::log(kPi * sphere_area(d - 1)) + lb));
}

int required_degree(const HarmonicFamily& f, const QExponent& q) {
    if (q.is_infinite()) return 0;
    return static_cast<int>(std::ceil(q_value(q) * f.k)) + f.d + 10;
}

QuadratureRule norm_rule(const HarmonicFamily& f, int degree) {
    const int n = points_for_degree(degree);
    if (f.kind == HarmonicKind::Zonal) return gauss_jacobi(n, zonal_alpha(f.d), zonal_alpha(f.d));
    return gauss_jacobi(n, hw_alpha(f.d), 0.0);
}

double lq_norm(const HarmonicFamily& f, const QExponent& q) {
    if (q.is_infinite()) return lq_norm(f, q, QuadratureRule{});
    const int n = points_for_degree(required_degree(f, q));
    const double a = f.kind == HarmonicKind::Zonal ? zonal_alpha(f.d) : hw_alpha(f.d);
    const double b = f.kind == HarmonicKind::Zonal ? a : 0.0;
    return lq_norm(f, q, *cached_gauss_jacobi(n, a, b));
}

double lq_norm(const HarmonicFamily& f, const QExponent& q, const QuadratureRule& rule) {
    require_dim(f.d);
    const bool zonal = f.kind == HarmonicKind::Zonal;
    if (q.is_infinite()) {
        if (zonal) {
            const SymmetricPoly p(f.k, zonal_alpha(f.d));
            const double scale = 1 / std::sqrt(sphere_area(f.d));
            const auto cells = static_cast<std::size_t>(16 * f.k + 64);
            return refined_max([&](double th) { return p(std::cos(th)) * scale; }, 0.0, kPi, cells);
        }
        const double c = highest_weight_constant(f.d, f.k);
        const auto cells = static_cast<std::size_t>(16 * f.k + 64);
        return refined_max([&](double r) { return c * std::pow(r, f.k); }, 0.0, 1.0, cells);
    }

    const double a = zonal ? zonal_alpha(f.d) : hw_alpha(f.d);
    const double b = zonal ? a : 0.0;
    if (rule.alpha != a || rule.beta != b || rule.size() == 0)
        throw std::invalid_argument("lq_norm: quadrature rule has the wrong weight for " + f.str());
    if (rule.degree() < required_degree(f, q))
        throw std::invalid_argument("lq_norm: quadrature degree " + std::to_string(rule.degree()) + " below required " +
                                    std::to_string(required_degree(f, q)));
    const long double qq = q_value(q);
    long double sum = 0;
    if (zonal) {
        const SymmetricPoly p(f.k, a);
        const long double scale = 1 / std::sqrt(static_cast<long double>(sphere_area(f.d)));
        for (std::size_t i = 0; i < rule.size(); ++i) {
            const long double v = std::fabs(static_cast<long double>(p(rule.nodes[i])) * scale);
            sum += rule.weights[i] * std::pow(v, qq);
        }
        sum *= sphere_area(f.d);
    } else {
        // s = r^2 = (1 + t)/2, |f|^q = c^q s^{qk/2}
        const long double c = highest_weight_constant(f.d, f.k);
        for (std::size_t i = 0; i < rule.size(); ++i) {
            const long double s = (1 + static_cast<long double>(rule.nodes[i])) / 2;
            sum += rule.weights[i] * std::pow(s, qq * f.k / 2);
        }
        sum *= std::pow(c, qq) * kPi * sphere_area(f.d - 1) * std::pow(2.0L, -static_cast<long double>(a) - 1);
    }
    return static_cast<double>(std::pow(sum, 1 / qq));
}

std::vector<int> degree_ladder(int k_lo, int k_hi, int points) {
    if (k_lo < 1 || k_hi < k_lo || points < 2) throw std::invalid_argument("degree_ladder: need 1 <= k_lo <= k_hi, points >= 2");
    std::vector<int> ks;
    const double ratio = std::log(static_cast<double>(k_hi) / k_lo);
    for (int i = 0; i < points; ++i) {
        const int k = static_cast<int>(std::lround(k_lo * std::exp(ratio * i / (points - 1))));
        if (ks.empty() || k > ks.back()) ks.push_back(k);
    }
    return ks;
}

namespace {

// Norms for a list of families sharing one rule per (kind, d).
std::vector<double> norms_with_shared_rules(const std::vector<HarmonicFamily>& fams, const QExponent& q) {
    std::vector<double> out(fams.size());
    if (q.is_infinite()) {
        parallel_for(fams.size(), 1, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) out[i] = lq_norm(fams[i], q);
        });
        return out;
    }
    std::vector<std::pair<std::pair<int, int>, int>> max_degree;  // ((kind, d), degree)
    for (const auto& f : fams) {
        const std::pair<int, int> key{static_cast<int>(f.kind), f.d};
        auto it = std::find_if(max_degree.begin(), max_degree.end(), [&](const auto& e) { return e.first == key; });
        if (it == max_degree.end()) max_degree.push_back({key, required_degree(f, q)});
        else it->second = std::max(it->second, required_degree(f, q));
    }
    std::vector<QuadratureRule> rules;
    for (const auto& [key, deg] : max_degree)
        rules.push_back(norm_rule(HarmonicFamily{static_cast<HarmonicKind>(key.first), key.second, 0}, deg));
    parallel_for(fams.size(), 1, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const std::pair<int, int> key{static_cast<int>(fams[i].kind), fams[i].d};
            std::size_t r = 0;
            while (max_degree[r].first != key) ++r;
            out[i] = lq_norm(fams[i], q, rules[r]);
        }
    });
    return out;
}

void require_range(int k_lo, int k_hi) {
    if (k_lo < 1 || static_cast<double>(k_hi) < std::pow(10.0, 1.5) * k_lo)
        throw std::invalid_argument("degree range must span at least 1.5 decades with k_lo >= 1");
}

ExponentFit fit_samples(const std::vector<GrowthSample>& samples) {
    std::vector<double> x, y;
    for (const auto& s : samples) {
        x.push_back(s.lambda);
        y.push_back(s.norm);
    }
    return loglog_fit(x, y);
}

}  // namespace

GrowthReport fit_growth(HarmonicKind kind, int d, const QExponent& q, int k_lo, int k_hi, int points) {
    require_dim(d);
    require_range(k_lo, k_hi);
    const auto ks = degree_ladder(k_lo, k_hi, points);
    std::vector<HarmonicFamily> fams;
    for (int k : ks) fams.push_back({kind, d, k});
    const auto norms = norms_with_shared_rules(fams, q);
    GrowthReport rep;
    for (std::size_t i = 0; i < ks.size(); ++i) rep.samples.push_back({ks[i], fams[i].lambda(), norms[i]});
    rep.fit = fit_samples(rep.samples);
    rep.expected = expected_slope(kind, d, q);
    return rep;
}

GrowthReport tensor_growth(std::span<const TensorFactor> factors, const QExponent& q, int k_lo, int k_hi, int points) {
    if (factors.empty()) throw std::invalid_argument("tensor_growth: no factors");
    require_range(k_lo, k_hi);
    bool any = false;
    for (const auto& f : factors) {
        require_dim(f.d);
        if (f.degree_ratio < 0) throw std::invalid_argument("tensor_growth: negative degree ratio");
        any = any || f.degree_ratio > 0;
    }
    if (!any) throw std::invalid_argument("tensor_growth: every factor frozen at degree 0");
    const auto ks = degree_ladder(k_lo, k_hi, points);
    std::vector<HarmonicFamily> fams;
    for (int k : ks)
        for (const auto& f : factors) fams.push_back({f.kind, f.d, f.degree_ratio * k});
    const auto norms = norms_with_shared_rules(fams, q);
    GrowthReport rep;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        double norm = 1, lam2 = 0;
        for (std::size_t j = 0; j < factors.size(); ++j) {
            const std::size_t idx = i * factors.size() + j;
            norm *= norms[idx];
            lam2 += fams[idx].lambda() * fams[idx].lambda();
        }
        rep.samples.push_back({ks[i], std::sqrt(lam2), norm});
    }
    rep.fit = fit_samples(rep.samples);
    for (const auto& f : factors)
        if (f.degree_ratio > 0) rep.expected += expected_slope(f.kind, f.d, q);
    return rep;
}

MultiplierSample multiplier_value(double delta, double t) {
    if (!(delta > 0)) throw std::domain_error("multiplier_value: delta must be positive");
    if (!std::isfinite(t) || std::fabs(t) > 1e4) throw std::domain_error("multiplier_value: |t| must be <= 1e4");
    const double at = std::fabs(t);
    int n = 64;
    while (n < 0.75 * at + 40) n *= 2;
    auto integrate = [&](int pts) {
        const auto rule = cached_gauss_jacobi(pts, delta, delta);
        long double s = 0;
        for (std::size_t i = 0; i < rule->size(); ++i)
            s += static_cast<long double>(rule->weights[i]) * std::cos(static_cast<long double>(at) * rule->nodes[i]);
        return s;
    };
    const long double coarse = integrate(n);
    const long double fine = integrate(2 * n);
    return {t, static_cast<double>(fine), static_cast<double>(std::fabs(fine - coarse)), 2 * n};
}

std::vector<double> multiplier_grid(double t_lo, double t_hi, int per_octave) {
    if (!(t_lo > 0) || !(t_hi > t_lo) || per_octave < 1) throw std::invalid_argument("multiplier_grid: bad range");
    std::vector<double> out;
    const double step = std::pow(2.0, 1.0 / per_octave);
    for (int i = 0;; ++i) {
        const double t = t_lo * std::pow(step, i);
        if (t > t_hi * (1 + 1e-12)) break;
        out.push_back(std::min(t, t_hi));
    }
    return out;
}

MultiplierReport multiplier_decay(double delta, std::span<const double> t_grid, double tolerance) {
    if (!(delta > 0)) throw std::domain_error("multiplier_decay: delta must be positive");
    MultiplierReport rep;
    rep.delta = delta;
    rep.tolerance = tolerance;
    rep.bound = -1 - delta;
    rep.samples.resize(t_grid.size());
    parallel_for(t_grid.size(), 8, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) rep.samples[i] = multiplier_value(delta, t_grid[i]);
    });
    std::vector<SeriesPoint> pts;
    for (const auto& s : rep.samples) {
        rep.max_error = std::max(rep.max_error, s.error);
        if (s.t > 0) pts.push_back({s.t, std::fabs(s.value)});
    }
    rep.fit = envelope_exponent(pts);
    rep.quadrature_ok = rep.max_error <= 1e-12;
    rep.verdict = rep.quadrature_ok && rep.fit.slope <= rep.bound + tolerance;
    return rep;
}

}  // namespace speclab
