#include "speclab/common.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace speclab {

namespace {
std::atomic<unsigned> g_threads{1};
}

void set_num_threads(unsigned n) { g_threads = std::max(1u, n); }
unsigned num_threads() { return g_threads; }

void parallel_for(std::size_t n, std::size_t grain,
                  const std::function<void(std::size_t, std::size_t)>& body) {
    if (n == 0) return;
    grain = std::max<std::size_t>(grain, 1);
    const std::size_t chunks = (n + grain - 1) / grain;
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(num_threads(), chunks));
    if (workers <= 1) {
        for (std::size_t c = 0; c < chunks; ++c) body(c * grain, std::min(n, (c + 1) * grain));
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= chunks) return;
            try {
                body(c * grain, std::min(n, (c + 1) * grain));
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next = chunks;
            }
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (unsigned i = 1; i < workers; ++i) pool.emplace_back(worker);
    worker();
    pool.clear();
    if (error) std::rethrow_exception(error);
}

std::uint64_t isqrt(std::uint64_t x) {
    auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(x)));
    while (r > 0 && (r > UINT32_MAX || r * r > x)) --r;
    while (r + 1 <= UINT32_MAX && (r + 1) * (r + 1) <= x) ++r;
    return r;
}

BigInt floor_div(const BigInt& a, const BigInt& b) {
    if (b == 0) throw std::domain_error("floor_div: division by zero");
    BigInt q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

BigInt ceil_div(const BigInt& a, const BigInt& b) { return -floor_div(-a, b); }

BigInt floor(const Rational& r) {
    return floor_div(boost::multiprecision::numerator(r), boost::multiprecision::denominator(r));
}

BigInt ceil(const Rational& r) {
    return ceil_div(boost::multiprecision::numerator(r), boost::multiprecision::denominator(r));
}

Rational to_rational(double x) {
    if (!std::isfinite(x)) throw std::domain_error("to_rational: non-finite value");
    int exp = 0;
    const double mant = std::frexp(x, &exp);
    // mant * 2^53 is an exact integer.
    const auto scaled = static_cast<std::int64_t>(std::ldexp(mant, 53));
    exp -= 53;
    Rational r{BigInt(scaled)};
    if (exp >= 0) {
        r *= Rational(BigInt(1) << exp);
    } else {
        r /= Rational(BigInt(1) << -exp);
    }
    return r;
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

long double to_long_double(const BigInt& v) { return v.convert_to<long double>(); }

std::string to_string(const Rational& r) {
    const BigInt num = boost::multiprecision::numerator(r);
    const BigInt den = boost::multiprecision::denominator(r);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), res.ptr);
}

Rational parse_rational(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty rational literal");
    const auto slash = text.find('/');
    auto parse_int = [&](const std::string& s) {
        if (s.empty()) throw std::invalid_argument("bad rational literal: " + text);
        std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
        if (i == s.size()) throw std::invalid_argument("bad rational literal: " + text);
        for (std::size_t j = i; j < s.size(); ++j)
            if (s[j] < '0' || s[j] > '9') throw std::invalid_argument("bad rational literal: " + text);
        return BigInt(s[0] == '+' ? s.substr(1) : s);
    };
    if (slash != std::string::npos) {
        const BigInt den = parse_int(text.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator: " + text);
        return Rational(parse_int(text.substr(0, slash)), den);
    }
    // Decimal: [sign] digits [. digits] [e|E [sign] digits]
    std::string mant = text;
    long exp10 = 0;
    const auto e = text.find_first_of("eE");
    if (e != std::string::npos) {
        mant = text.substr(0, e);
        const std::string es = text.substr(e + 1);
        exp10 = static_cast<long>(parse_int(es));
    }
    const auto dot = mant.find('.');
    if (dot != std::string::npos) {
        const std::string frac = mant.substr(dot + 1);
        exp10 -= static_cast<long>(frac.size());
        mant = mant.substr(0, dot) + frac;
        if (mant == "-" || mant == "+" || mant.empty()) throw std::invalid_argument("bad rational literal: " + text);
    }
    Rational r{parse_int(mant)};
    const Rational ten{10};
    for (long i = 0; i < std::labs(exp10); ++i) r = exp10 > 0 ? Rational(r * ten) : Rational(r / ten);
    return r;
}

}  // namespace speclab
