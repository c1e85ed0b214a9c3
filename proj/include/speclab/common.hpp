// common.hpp
//
// Shared numeric types, error classes and the deterministic parallel loop used
// by every speclab module.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace speclab {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Thrown when a computation would exceed a configured size cap.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Number of worker threads used by parallel_for. Results never depend on it.
void set_num_threads(unsigned n);
unsigned num_threads();

// Runs body(begin, end) over disjoint chunks covering [0, n). Chunk boundaries
// depend only on n and `grain`, never on the thread count, so any body that
// writes to per-index slots produces identical output for every thread count.
void parallel_for(std::size_t n, std::size_t grain,
                  const std::function<void(std::size_t, std::size_t)>& body);

// Exact integer helpers.
std::uint64_t isqrt(std::uint64_t x);
BigInt floor_div(const BigInt& a, const BigInt& b);
BigInt ceil_div(const BigInt& a, const BigInt& b);
BigInt floor(const Rational& r);
BigInt ceil(const Rational& r);

// Exact rational from a finite double (every double is a dyadic rational).
Rational to_rational(double x);
double to_double(const Rational& r);
long double to_long_double(const BigInt& v);

std::string to_string(const Rational& r);
// Shortest decimal that round-trips to the same double.
std::string format_double(double x);
// Parses "a", "a/b", or a decimal literal such as "2.5" or "1e-3" exactly.
Rational parse_rational(const std::string& text);

}  // namespace speclab
