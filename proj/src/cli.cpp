#include "speclab/cli.hpp"

#include "speclab/annulus.hpp"
#include "speclab/exponents.hpp"
#include "speclab/fit.hpp"
#include "speclab/harmonics.hpp"
#include "speclab/lattice.hpp"
#include "speclab/manifold.hpp"
#include "speclab/spectra.hpp"
#include "speclab/weyl.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

namespace speclab::cli {

namespace {

using Json = nlohmann::ordered_json;

const std::vector<std::string> kCommands = {
    "spectrum", "count",          "window", "gaps",  "lattice",    "weyl-fit", "riesz",
    "beta-check", "annulus", "annulus-verify", "norms", "norms-fit", "exponent", "multiplier-decay"};

const std::vector<std::string> kKeys = {"command", "spec",  "convention", "lambda_max", "lambda", "grid",
                                        "schedule", "q",    "delta",      "family",     "out",    "cache",
                                        "threads",  "seed", "samples",    "tolerance"};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

QExponent parse_q(const std::string& text) {
    if (text == "inf" || text == "infinity") return QExponent::infinity();
    return QExponent::from_q(parse_rational(text));
}

std::vector<EpsSchedule> parse_schedules(const std::string& text) {
    std::vector<EpsSchedule> out;
    for (const auto& part : split(text, ',')) out.push_back(EpsSchedule::parse(part));
    return out;
}

// Rows of a CSV document; numbers are formatted by the caller.
class Csv {
public:
    explicit Csv(std::string header) { text_ << header << '\n'; }
    template <class... T>
    void row(const T&... cells) {
        std::size_t i = 0;
        ((text_ << (i++ ? "," : "") << cell(cells)), ...);
        text_ << '\n';
    }
    std::string str() const { return text_.str(); }

private:
    static std::string cell(double v) { return format_double(v); }
    static std::string cell(const std::string& v) { return v; }
    static std::string cell(const char* v) { return v; }
    static std::string cell(const BigInt& v) { return v.str(); }
    static std::string cell(const Rational& v) { return to_string(v); }
    static std::string cell(std::uint64_t v) { return std::to_string(v); }
    static std::string cell(std::int64_t v) { return std::to_string(v); }
    static std::string cell(int v) { return std::to_string(v); }
    static std::string cell(bool v) { return v ? "true" : "false"; }

    std::ostringstream text_;
};

Json fit_json(const ExponentFit& f) {
    Json j;
    j["slope"] = f.slope;
    j["intercept"] = f.intercept;
    j["residual"] = f.residual;
    j["blocks"] = f.blocks_used;
    j["blocks_skipped"] = f.blocks_skipped;
    j["method"] = f.method;
    return j;
}

struct Outcome {
    std::string csv;
    Json report;
    bool verdict_failed = false;
};

class Runner {
public:
    explicit Runner(const ExperimentConfig& c) : c_(c) {}

    Outcome run() {
        out_.report["command"] = c_.command;
        if (!c_.spec.empty()) out_.report["spec"] = c_.spec;
        out_.report["convention"] = c_.convention;
        const std::string& cmd = c_.command;
        if (cmd == "spectrum") spectrum();
        else if (cmd == "count") count();
        else if (cmd == "window") window();
        else if (cmd == "gaps") gaps();
        else if (cmd == "lattice") lattice();
        else if (cmd == "weyl-fit") weyl_fit();
        else if (cmd == "riesz") riesz();
        else if (cmd == "beta-check") beta_check();
        else if (cmd == "annulus") annulus();
        else if (cmd == "annulus-verify") annulus_verify();
        else if (cmd == "norms") norms(false);
        else if (cmd == "norms-fit") norms(true);
        else if (cmd == "exponent") exponent();
        else if (cmd == "multiplier-decay") multiplier();
        else throw ConfigError("unknown command '" + cmd + "'");
        return std::move(out_);
    }

private:
    ManifoldSpec spec() const {
        if (c_.spec.empty()) throw ConfigError(c_.command + " needs --spec");
        return parse_spec(c_.spec);
    }
    Convention conv() const { return parse_convention(c_.convention); }
    Rational required(const std::optional<std::string>& v, const char* flag) const {
        if (!v) throw ConfigError(c_.command + " needs " + flag);
        return parse_rational(*v);
    }
    Grid grid(const std::string& fallback = {}) const {
        if (c_.grid) return parse_grid(*c_.grid);
        if (fallback.empty()) throw ConfigError(c_.command + " needs --grid");
        return parse_grid(fallback);
    }
    double tolerance(double fallback) const { return c_.tolerance.value_or(fallback); }

    LineTable lines(const ManifoldSpec& s, const Rational& lambda_max) const {
        if (c_.cache) return LineCache(*c_.cache).enumerate(s, conv(), lambda_max);
        return enumerate_lines(s, conv(), lambda_max);
    }
    // Table covering q4 <= q4_max, rounded up to a rational lambda for cache keys.
    LineTable lines_q4(const ManifoldSpec& s, std::uint64_t q4_max) const {
        const Rational lambda(BigInt(isqrt(q4_max) + 1), BigInt(2));
        return lines(s, lambda).truncated(q4_max);
    }

    void spectrum() {
        const auto t = lines(spec(), required(c_.lambda_max, "--lambda-max"));
        std::ostringstream csv;
        t.write_csv(csv);
        out_.csv = csv.str();
        out_.report["lambda_max"] = *c_.lambda_max;
        out_.report["lines"] = t.size();
        out_.report["total"] = t.total().str();
    }

    void count() {
        const ManifoldSpec s = spec();
        std::vector<double> lambdas;
        std::vector<std::uint64_t> bounds;
        if (c_.grid) {
            const Grid g = parse_grid(*c_.grid);
            for (double v : g.values) {
                lambdas.push_back(v);
                bounds.push_back(q4_bound(to_rational(v)));
            }
            for (std::uint64_t m : g.roots) {
                lambdas.push_back(std::sqrt(static_cast<double>(m)));
                bounds.push_back(4 * m);
            }
        } else {
            const Rational l = required(c_.lambda ? c_.lambda : c_.lambda_max, "--lambda-max or --grid");
            lambdas.push_back(to_double(l));
            bounds.push_back(q4_bound(l));
        }
        std::vector<BigInt> n(bounds.size());
        if (s.kind() == ManifoldSpec::Kind::Torus) {
            parallel_for(bounds.size(), 16, [&](std::size_t lo, std::size_t hi) {
                for (std::size_t i = lo; i < hi; ++i) n[i] = ball_count_squared(s.dim(), bounds[i] / 4);
            });
        } else {
            const LineTable t = lines_q4(s, *std::max_element(bounds.begin(), bounds.end()));
            for (std::size_t i = 0; i < bounds.size(); ++i) n[i] = t.count_upto(bounds[i]);
        }
        Csv csv("lambda,N");
        for (std::size_t i = 0; i < n.size(); ++i) csv.row(lambdas[i], n[i]);
        out_.csv = csv.str();
        out_.report["points"] = n.size();
    }

    void window() {
        const ManifoldSpec s = spec();
        const Grid g = grid();
        const auto schedules = parse_schedules(c_.schedule);
        if (schedules.size() != 1) throw ConfigError("window takes a single schedule");
        const EpsSchedule& sch = schedules.front();
        std::vector<Window> windows;
        std::vector<double> lambdas, eps;
        for (double v : g.values) {
            const Rational l = to_rational(v);
            const Rational e = sch.rational_at(l);
            windows.emplace_back(l, e);
            lambdas.push_back(v);
            eps.push_back(to_double(e));
        }
        if (g.is_roots()) {
            if (!(sch.kind == EpsSchedule::Kind::PowerLaw && sch.delta == 1))
                throw ConfigError("roots grids use the schedule pow:1");
            for (std::uint64_t m : g.roots) {
                windows.push_back(Window::inverse_width_at_root(m));
                lambdas.push_back(std::sqrt(static_cast<double>(m)));
                eps.push_back(1 / std::sqrt(static_cast<double>(m)));
            }
        }
        std::vector<BigInt> counts(windows.size());
        if (s.kind() == ManifoldSpec::Kind::Torus) {
            parallel_for(windows.size(), 16, [&](std::size_t lo, std::size_t hi) {
                for (std::size_t i = lo; i < hi; ++i) counts[i] = window_count(s, conv(), windows[i]);
            });
        } else {
            std::uint64_t top = 0;
            for (const auto& w : windows) top = std::max(top, w.q4_max());
            const LineTable t = lines_q4(s, top);
            for (std::size_t i = 0; i < windows.size(); ++i)
                counts[i] = windows[i].empty() ? BigInt(0) : t.count_between(windows[i].q4_min(), windows[i].q4_max());
        }
        Csv csv("lambda,eps,count");
        std::vector<SeriesPoint> series;
        for (std::size_t i = 0; i < counts.size(); ++i) {
            csv.row(lambdas[i], eps[i], counts[i]);
            series.push_back({lambdas[i], static_cast<double>(to_long_double(counts[i]))});
        }
        out_.csv = csv.str();
        out_.report["schedule"] = sch.str();
        out_.report["points"] = counts.size();
        try {
            out_.report["fit"] = fit_json(envelope_exponent(series));
        } catch (const std::invalid_argument& e) {
            out_.report["fit"] = e.what();
        }
    }

    void gaps() {
        const Rational lo = required(c_.lambda, "--lambda");
        const Rational hi = required(c_.lambda_max, "--lambda-max");
        const GapScan g = distinct_gap_scan(spec(), conv(), lo, hi);
        Csv csv("lambda_lo,lambda_hi,q4_lo,q4_hi,min_normalized_gap");
        csv.row(g.lambda_lo, g.lambda_hi, g.q4_lo, g.q4_hi, g.min_normalized_gap);
        out_.csv = csv.str();
        out_.report["min_normalized_gap"] = g.min_normalized_gap;
        out_.report["q4_lo"] = g.q4_lo;
        out_.report["q4_hi"] = g.q4_hi;
    }

    void lattice() {
        const ManifoldSpec s = spec();
        if (s.kind() != ManifoldSpec::Kind::Torus) throw ConfigError("lattice needs a torus spec such as T2");
        const BigInt mm = floor(required(c_.lambda_max, "--lambda-max") * required(c_.lambda_max, "--lambda-max"));
        const auto m_max = mm.convert_to<std::uint64_t>();
        const ShellTable t = rn_table(s.dim(), m_max);
        std::ostringstream csv;
        t.write_csv(csv);
        out_.csv = csv.str();
        std::vector<SeriesPoint> series;
        for (std::uint64_t m = 1; m <= m_max; ++m)
            series.push_back({std::sqrt(static_cast<double>(m)), static_cast<double>(to_long_double(t[m]))});
        out_.report["n"] = s.dim();
        out_.report["m_max"] = m_max;
        try {
            out_.report["fit"] = fit_json(envelope_exponent(series));
        } catch (const std::invalid_argument& e) {
            out_.report["fit"] = e.what();
        }
    }

    void weyl_fit() {
        const ManifoldSpec s = spec();
        const Grid g = grid();
        if (g.is_roots()) throw ConfigError("weyl-fit needs a numeric grid");
        const auto schedules = parse_schedules(c_.schedule);
        if (schedules.size() != 1) throw ConfigError("weyl-fit takes a single schedule");
        const auto series = remainder_series(s, conv(), g.values);
        Csv csv("lambda,N,main,R");
        for (const auto& r : series) csv.row(r.lambda, r.n, r.main, r.r);
        out_.csv = csv.str();
        const RemainderFit f = fit_remainder(series, s.dim(), schedules.front(), tolerance(0.15));
        out_.report["schedule"] = schedules.front().str();
        out_.report["fit"] = fit_json(f.fit);
        out_.report["slope"] = f.fit.slope;
        out_.report["bound_exponent"] = f.bound_exponent;
        out_.report["tolerance"] = f.tolerance;
        out_.report["verdict"] = f.verdict;
        out_.report["informational"] = f.informational;
        out_.report["counting_slope"] = fit_counting(series).slope;
        out_.verdict_failed = !f.verdict && !f.informational;
    }

    void riesz() {
        const ManifoldSpec s = spec();
        const Grid g = grid();
        if (g.is_roots()) throw ConfigError("riesz needs a numeric grid");
        const double delta = to_double(required(c_.delta, "--delta"));
        const double vol = static_cast<double>(manifold_volume(s).value());
        const LineTable t = lines(s, to_rational(*std::max_element(g.values.begin(), g.values.end())));
        std::vector<long double> sums(g.values.size());
        parallel_for(g.values.size(), 16, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) sums[i] = riesz_sum(t, delta, g.values[i]);
        });
        Csv csv("lambda,sum,main,error");
        std::vector<SeriesPoint> series;
        bool guaranteed = true;
        for (std::size_t i = 0; i < sums.size(); ++i) {
            const RieszMainTerm m = riesz_main_term(s.dim(), delta, g.values[i]);
            guaranteed = m.guaranteed;
            const long double main = static_cast<long double>(m.value) * vol;
            const double err = static_cast<double>(sums[i] - main);
            csv.row(g.values[i], static_cast<double>(sums[i]), static_cast<double>(main), err);
            series.push_back({g.values[i], std::fabs(err)});
        }
        out_.csv = csv.str();
        const ExponentFit f = envelope_exponent(series);
        const double bound = s.dim() - 2 + tolerance(0.3);
        out_.report["delta"] = *c_.delta;
        out_.report["fit"] = fit_json(f);
        out_.report["bound"] = bound;
        out_.report["verdict"] = f.slope <= bound;
        out_.report["informational"] = !guaranteed;
        out_.verdict_failed = guaranteed && f.slope > bound;
    }

    void beta_check() {
        const int dmax = c_.lambda_max ? static_cast<int>(to_double(parse_rational(*c_.lambda_max))) : 12;
        Csv csv("d_x,d_y,residual,residual_plus_two");
        double worst = 0;
        for (int dx = 1; dx <= dmax; ++dx)
            for (int dy = 1; dy <= dmax; ++dy) {
                const BetaIdentity b = beta_identity_residual(dx, dy);
                csv.row(dx, dy, b.residual, b.residual_plus_two);
                worst = std::max(worst, b.residual);
            }
        out_.csv = csv.str();
        const double tol = tolerance(1e-12);
        out_.report["max_residual"] = worst;
        out_.report["tolerance"] = tol;
        out_.report["verdict"] = worst < tol;
        out_.verdict_failed = !(worst < tol);
    }

    std::pair<ManifoldSpec, ManifoldSpec> split_product() const {
        const ManifoldSpec s = spec();
        if (s.kind() != ManifoldSpec::Kind::Product) throw ConfigError(c_.command + " needs a product spec X x Y");
        const auto& f = s.factors();
        std::vector<ManifoldSpec> rest(f.begin() + 1, f.end());
        return {f.front(), ManifoldSpec::product(std::move(rest))};
    }

    static Json lemma_json(const Lemma1Report& r) {
        Json j;
        j["c_high"] = r.c_high;
        j["c_ell_max"] = r.c_ell_max;
        j["interval_ratio_max"] = r.interval_ratio_max;
        j["c_small_max"] = r.c_small_max;
        j["partition_ok"] = r.partition_ok;
        return j;
    }

    void annulus() {
        const auto [x, y] = split_product();
        const Rational lambda = required(c_.lambda, "--lambda");
        const auto schedules = parse_schedules(c_.schedule);
        if (schedules.size() != 1) throw ConfigError("annulus takes a single schedule");
        const Rational eps = schedules.front().rational_at(lambda);
        const AnnulusDecomposition d = decompose(x, y, conv(), lambda, eps);
        std::ostringstream csv;
        write_csv(d, csv);
        out_.csv = csv.str();
        const RegionStats st = region_stats(d);
        const BigInt wc = window_count(ManifoldSpec::product({x, y}), conv(), Window(lambda, eps));
        out_.report["lambda"] = to_string(lambda);
        out_.report["eps"] = to_string(eps);
        out_.report["x"] = x.str();
        out_.report["y"] = y.str();
        out_.report["lemma1"] = lemma_json(verify_lemma1(d));
        Json rows = Json::array();
        for (const auto& r : st.rows) {
            Json row;
            row["region"] = to_string(r.region);
            row["ell"] = r.ell;
            row["points"] = r.points;
            row["mult"] = r.mult.str();
            rows.push_back(row);
        }
        out_.report["regions"] = rows;
        out_.report["total_mult"] = st.total_mult.str();
        out_.report["window_count"] = wc.str();
        out_.report["totals_match"] = wc == st.total_mult;
    }

    void annulus_verify() {
        const auto [x, y] = split_product();
        const auto schedules = parse_schedules(c_.schedule);
        const std::uint64_t lo = c_.lambda ? floor(parse_rational(*c_.lambda)).convert_to<std::uint64_t>() : 100;
        const std::uint64_t hi =
            c_.lambda_max ? floor(parse_rational(*c_.lambda_max)).convert_to<std::uint64_t>() : 2000;
        const double c0 = tolerance(8.0);
        const Lemma1Sweep sw = lemma1_sweep(x, y, conv(), schedules, c_.seed, c_.samples, lo, hi, c0);
        Csv csv("index,lambda,schedule,eps,points,c_high,c_ell_max,interval_ratio_max,c_small_max,partition_ok");
        for (const auto& t : sw.trials)
            csv.row(t.index, t.lambda, t.schedule.str(), t.eps, static_cast<std::uint64_t>(t.points), t.report.c_high,
                    t.report.c_ell_max, t.report.interval_ratio_max, t.report.c_small_max, t.report.partition_ok);
        out_.csv = csv.str();
        out_.report["x"] = x.str();
        out_.report["y"] = y.str();
        out_.report["seed"] = c_.seed;
        out_.report["samples"] = c_.samples;
        out_.report["trials"] = sw.trials.size();
        out_.report["c0"] = c0;
        out_.report["worst"] = lemma_json(sw.worst);
        out_.report["verdict"] = sw.verdict;
        out_.verdict_failed = !sw.verdict;
    }

    std::vector<int> sphere_dims() const {
        std::vector<int> dims;
        for (const auto& leaf : spec().leaves()) {
            if (leaf.kind() != ManifoldSpec::Kind::Sphere) throw ConfigError(c_.command + " needs spheres only");
            dims.push_back(leaf.dim());
        }
        return dims;
    }

    void norms(bool fit) {
        const auto dims = sphere_dims();
        const HarmonicKind kind = parse_harmonic_kind(c_.family);
        const QExponent q = parse_q(c_.q.value_or("inf"));
        const Grid g = grid("20:2000:24");
        if (g.is_roots() || g.values.empty()) throw ConfigError("norms need a numeric degree grid");
        std::vector<TensorFactor> factors;
        for (int d : dims) factors.push_back({kind, d, 1});
        GrowthReport rep;
        if (fit) {
            const int k_lo = static_cast<int>(std::lround(g.values.front()));
            const int k_hi = static_cast<int>(std::lround(g.values.back()));
            const int pts = static_cast<int>(g.values.size());
            rep = dims.size() == 1 ? fit_growth(kind, dims.front(), q, k_lo, k_hi, pts)
                                   : tensor_growth(factors, q, k_lo, k_hi, pts);
        } else {
            std::vector<int> ks;
            for (double v : g.values) {
                const int k = static_cast<int>(std::lround(v));
                if (k < 0) throw ConfigError("degrees must be >= 0");
                if (ks.empty() || k != ks.back()) ks.push_back(k);
            }
            rep.samples.resize(ks.size());
            parallel_for(ks.size(), 1, [&](std::size_t lo, std::size_t hi) {
                for (std::size_t i = lo; i < hi; ++i) {
                    double norm = 1, lam2 = 0;
                    for (int d : dims) {
                        const HarmonicFamily f{kind, d, ks[i]};
                        norm *= lq_norm(f, q);
                        lam2 += f.lambda() * f.lambda();
                    }
                    rep.samples[i] = {ks[i], std::sqrt(lam2), norm};
                }
            });
        }
        Csv csv("k,lambda,norm");
        for (const auto& s : rep.samples) csv.row(s.k, s.lambda, s.norm);
        out_.csv = csv.str();
        out_.report["family"] = to_string(kind);
        out_.report["q"] = q.str();
        if (fit) {
            const double tol = tolerance(dims.size() == 1 ? 0.05 : 0.07);
            const bool ok = std::fabs(rep.fit.slope - rep.expected) <= tol;
            out_.report["fit"] = fit_json(rep.fit);
            out_.report["expected"] = rep.expected;
            out_.report["tolerance"] = tol;
            out_.report["verdict"] = ok;
            out_.verdict_failed = !ok;
        }
    }

    void exponent() {
        const QExponent q = parse_q(c_.q.value_or("inf"));
        const ManifoldSpec s = spec();
        const int d = s.dim();
        Csv csv("quantity,value");
        csv.row("q", q.str());
        csv.row("d", d);
        csv.row("alpha", to_string(alpha(q, d)));
        csv.row("alpha_upper", to_string(alpha_upper_branch(q, d)));
        csv.row("alpha_lower", to_string(alpha_lower_branch(q, d)));
        csv.row("q_crit", q_crit(d).str());
        out_.report["q"] = q.str();
        out_.report["d"] = d;
        out_.report["alpha"] = to_string(alpha(q, d));
        out_.report["q_crit"] = q_crit(d).str();
        bool spheres = true;
        std::vector<int> dims;
        for (const auto& leaf : s.leaves()) {
            spheres = spheres && leaf.kind() == ManifoldSpec::Kind::Sphere;
            dims.push_back(leaf.dim());
        }
        if (spheres && dims.size() > 1) {
            const Rational sp = sphere_product_exponent(q, dims);
            csv.row("sphere_product_exponent", to_string(sp));
            out_.report["sphere_product_exponent"] = to_string(sp);
        }
        if (s.kind() == ManifoldSpec::Kind::Product) {
            const auto schedules = parse_schedules(c_.schedule);
            const GrowthLaw law = product_cluster_law(GrowthLaw{}, schedules.front(), q, s.factors().front().dim());
            csv.row("product_cluster_law", law.str());
            out_.report["product_cluster_law"] = law.str();
        }
        out_.csv = csv.str();
    }

    void multiplier() {
        const double delta = to_double(required(c_.delta, "--delta"));
        const Grid g = grid("dyadic:10:10000:64");
        if (g.is_roots()) throw ConfigError("multiplier-decay needs a numeric t grid");
        const MultiplierReport rep = multiplier_decay(delta, g.values, tolerance(0.1));
        Csv csv("t,value,error,points");
        for (const auto& s : rep.samples) csv.row(s.t, s.value, s.error, s.points);
        out_.csv = csv.str();
        out_.report["delta"] = *c_.delta;
        out_.report["fit"] = fit_json(rep.fit);
        out_.report["bound"] = rep.bound;
        out_.report["tolerance"] = rep.tolerance;
        out_.report["max_error"] = rep.max_error;
        out_.report["quadrature_ok"] = rep.quadrature_ok;
        out_.report["verdict"] = rep.verdict;
        out_.verdict_failed = !rep.verdict;
    }

    const ExperimentConfig& c_;
    Outcome out_;
};

void write_file(const std::string& path, const std::string& text) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ResourceError("cannot write " + path);
        out << text;
        if (!out) throw ResourceError("cannot write " + path);
    }
    std::filesystem::rename(tmp, path);
}

std::string get_string(const Json& j, const std::string& key) {
    if (!j.is_string()) throw ConfigError("config field '" + key + "' must be a string");
    return j.get<std::string>();
}

// Rational-valued fields accept strings or integers.
std::string get_literal(const Json& j, const std::string& key) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number_integer()) return std::to_string(j.get<long long>());
    throw ConfigError("config field '" + key + "' must be a string or integer");
}

std::uint64_t get_unsigned(const Json& j, const std::string& key) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
        throw ConfigError("config field '" + key + "' must be a non-negative integer");
    return j.get<std::uint64_t>();
}

}  // namespace

const std::vector<std::string>& commands() { return kCommands; }

ExperimentConfig config_from_json(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    ExperimentConfig c;
    for (const auto& [key, v] : j.items()) {
        if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end())
            throw ConfigError("unknown config field '" + key + "'");
        if (key == "command") c.command = get_string(v, key);
        else if (key == "spec") c.spec = get_string(v, key);
        else if (key == "convention") c.convention = get_string(v, key);
        else if (key == "lambda_max") c.lambda_max = get_literal(v, key);
        else if (key == "lambda") c.lambda = get_literal(v, key);
        else if (key == "grid") c.grid = get_string(v, key);
        else if (key == "schedule") c.schedule = get_string(v, key);
        else if (key == "q") c.q = get_literal(v, key);
        else if (key == "delta") c.delta = get_literal(v, key);
        else if (key == "family") c.family = get_string(v, key);
        else if (key == "out") c.out = get_string(v, key);
        else if (key == "cache") c.cache = get_string(v, key);
        else if (key == "threads") c.threads = static_cast<unsigned>(get_unsigned(v, key));
        else if (key == "seed") c.seed = get_unsigned(v, key);
        else if (key == "samples") c.samples = get_unsigned(v, key);
        else if (key == "tolerance") {
            if (!v.is_number()) throw ConfigError("config field 'tolerance' must be a number");
            c.tolerance = v.get<double>();
        }
    }
    return c;
}

std::string config_to_json(const ExperimentConfig& c) {
    Json j;
    j["command"] = c.command;
    j["spec"] = c.spec;
    j["convention"] = c.convention;
    if (c.lambda_max) j["lambda_max"] = *c.lambda_max;
    if (c.lambda) j["lambda"] = *c.lambda;
    if (c.grid) j["grid"] = *c.grid;
    j["schedule"] = c.schedule;
    if (c.q) j["q"] = *c.q;
    if (c.delta) j["delta"] = *c.delta;
    j["family"] = c.family;
    if (c.out) j["out"] = *c.out;
    if (c.cache) j["cache"] = *c.cache;
    j["threads"] = c.threads;
    j["seed"] = c.seed;
    j["samples"] = c.samples;
    if (c.tolerance) j["tolerance"] = *c.tolerance;
    return j.dump(2) + "\n";
}

void validate(ExperimentConfig& c) {
    if (std::find(kCommands.begin(), kCommands.end(), c.command) == kCommands.end())
        throw ConfigError("unknown command '" + c.command + "'");
    if (!c.spec.empty()) c.spec = parse_spec(c.spec).str();
    (void)parse_convention(c.convention);
    (void)parse_schedules(c.schedule);
    (void)parse_harmonic_kind(c.family);
    for (const auto* v : {&c.lambda_max, &c.lambda, &c.delta})
        if (*v) (void)parse_rational(**v);
    if (c.q) (void)parse_q(*c.q);
    if (c.grid) (void)parse_grid(*c.grid);
    if (c.threads < 1 || c.threads > 256) throw ConfigError("threads must lie in [1, 256]");
}

Grid parse_grid(const std::string& text) {
    const auto parts = split(text, ':');
    auto number = [&](const std::string& s) {
        const double v = to_double(parse_rational(s));
        if (!std::isfinite(v)) throw ConfigError("bad grid value '" + s + "'");
        return v;
    };
    auto integer = [&](const std::string& s) -> std::uint64_t {
        const Rational r = parse_rational(s);
        if (r < 0 || floor(r) != r) throw ConfigError("grid bound '" + s + "' must be a non-negative integer");
        return floor(r).convert_to<std::uint64_t>();
    };
    Grid g;
    if (!parts.empty() && parts[0] == "roots") {
        if (parts.size() != 3) throw ConfigError("grid 'roots:m_lo:m_hi' expected");
        const std::uint64_t a = integer(parts[1]), b = integer(parts[2]);
        if (a < 1 || b < a) throw ConfigError("roots grid needs 1 <= m_lo <= m_hi");
        if (b - a > 50'000'000) throw ResourceError("roots grid too large");
        for (std::uint64_t m = a; m <= b; ++m) g.roots.push_back(m);
        return g;
    }
    if (!parts.empty() && parts[0] == "dyadic") {
        if (parts.size() != 3 && parts.size() != 4) throw ConfigError("grid 'dyadic:lo:hi[:per_octave]' expected");
        const double lo = number(parts[1]), hi = number(parts[2]);
        const std::uint64_t per = parts.size() == 4 ? integer(parts[3]) : 256;
        if (!(lo > 0) || !(hi >= lo) || per < 1) throw ConfigError("dyadic grid needs 0 < lo <= hi, per_octave >= 1");
        const double octaves = std::log2(hi / lo);
        const auto n = static_cast<std::uint64_t>(std::floor(octaves * static_cast<double>(per) + 1e-9));
        if (n > 50'000'000) throw ResourceError("grid too large");
        for (std::uint64_t i = 0; i <= n; ++i)
            g.values.push_back(std::min(hi, lo * std::exp2(static_cast<double>(i) / static_cast<double>(per))));
        return g;
    }
    if (parts.size() != 3) throw ConfigError("grid 'lo:hi:n' expected, got '" + text + "'");
    const double lo = number(parts[0]), hi = number(parts[1]);
    const std::uint64_t n = integer(parts[2]);
    if (n < 1 || hi < lo) throw ConfigError("grid needs lo <= hi and n >= 1");
    if (n > 50'000'000) throw ResourceError("grid too large");
    if (n == 1) {
        g.values.push_back(lo);
        return g;
    }
    for (std::uint64_t i = 0; i < n; ++i)
        g.values.push_back(i + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
    return g;
}

int run(const ExperimentConfig& c, std::ostream& csv, std::ostream& report) {
    set_num_threads(c.threads);
    Outcome o = Runner(c).run();
    o.report["exit"] = o.verdict_failed ? kExitVerdict : kExitOk;
    const std::string json = o.report.dump(2) + "\n";
    if (c.out) {
        write_file(*c.out, o.csv);
        write_file(*c.out + ".json", json);
    } else {
        csv << o.csv;
        report << json;
    }
    return o.verdict_failed ? kExitVerdict : kExitOk;
}

int main(int argc, char** argv) {
    CLI::App app{"speclab: exact spectra, Weyl remainders, lattice counts and harmonic growth on model manifolds"};
    app.require_subcommand(0, 1);
    std::string config_path;
    bool dump_config = false;
    app.add_option("--config", config_path, "JSON experiment configuration");
    app.add_flag("--dump-config", dump_config, "print the effective configuration as JSON and exit");

    struct Overrides {
        std::string spec, convention, lambda_max, lambda, grid, schedule, q, delta, family, out, cache;
        unsigned threads = 1;
        std::uint64_t seed = 0, samples = 50;
        double tolerance = 0;
    } ov;
    std::vector<std::pair<CLI::Option*, std::function<void(ExperimentConfig&)>>> opts;
    std::vector<CLI::App*> subs;
    for (const auto& name : kCommands) {
        CLI::App* sub = app.add_subcommand(name);
        subs.push_back(sub);
        auto add = [&](const char* flag, auto& target, const char* help, std::function<void(ExperimentConfig&)> apply) {
            opts.push_back({sub->add_option(flag, target, help), std::move(apply)});
        };
        add("--spec", ov.spec, "manifold, e.g. \"S2 x S3 x T2\"", [&](auto& c) { c.spec = ov.spec; });
        add("--convention", ov.convention, "shifted|geometric", [&](auto& c) { c.convention = ov.convention; });
        add("--lambda-max", ov.lambda_max, "upper spectral parameter (rational)",
            [&](auto& c) { c.lambda_max = ov.lambda_max; });
        add("--lambda", ov.lambda, "spectral parameter (rational)", [&](auto& c) { c.lambda = ov.lambda; });
        add("--grid", ov.grid, "lo:hi:n | dyadic:lo:hi[:per_octave] | roots:m_lo:m_hi",
            [&](auto& c) { c.grid = ov.grid; });
        add("--schedule", ov.schedule, "pow:d | log:d | unit", [&](auto& c) { c.schedule = ov.schedule; });
        add("--q", ov.q, "Lebesgue exponent, e.g. 10 or inf", [&](auto& c) { c.q = ov.q; });
        add("--delta", ov.delta, "Riesz / multiplier order", [&](auto& c) { c.delta = ov.delta; });
        add("--family", ov.family, "zonal|highest-weight", [&](auto& c) { c.family = ov.family; });
        add("--out", ov.out, "CSV path; the JSON report goes to <path>.json", [&](auto& c) { c.out = ov.out; });
        add("--cache", ov.cache, "line table cache directory", [&](auto& c) { c.cache = ov.cache; });
        add("--threads", ov.threads, "worker threads", [&](auto& c) { c.threads = ov.threads; });
        add("--seed", ov.seed, "seed for sampled spectral parameters", [&](auto& c) { c.seed = ov.seed; });
        add("--samples", ov.samples, "number of sampled spectral parameters", [&](auto& c) { c.samples = ov.samples; });
        add("--tolerance", ov.tolerance, "verdict tolerance", [&](auto& c) { c.tolerance = ov.tolerance; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        ExperimentConfig c;
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw ConfigError("cannot read config " + config_path);
            std::stringstream buf;
            buf << in.rdbuf();
            c = config_from_json(buf.str());
        }
        for (CLI::App* sub : subs)
            if (sub->parsed()) c.command = sub->get_name();
        for (auto& [opt, apply] : opts)
            if (opt->count() > 0) apply(c);
        if (c.command.empty()) throw ConfigError("no command given (see --help)");
        validate(c);
        if (dump_config) {
            std::cout << config_to_json(c);
            return kExitOk;
        }
        return run(c, std::cout, std::cerr);
    } catch (const ResourceError& e) {
        std::cerr << "resource error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}

}  // namespace speclab::cli
