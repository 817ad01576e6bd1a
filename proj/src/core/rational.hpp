// Exact arbitrary-precision integers and rationals used throughout the
// library, plus the integer k-th root primitive that power-level
// computations are built on.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace doflab {

using BigInt = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

// Renders q as "p" when the denominator is 1, else "p/q".
std::string rat_string(const Rat& q);

// Accepts "p/q", plain integers, and decimals with at most six fractional
// digits (anything finer is rejected rather than silently rounded).
Rat parse_rational(const std::string& text);

double to_double(const Rat& q);

// floor(n^(1/k)) for n >= 0, k >= 1, by Newton iteration on integers.
// The result r is verified to satisfy r^k <= n < (r+1)^k before returning.
BigInt iroot_floor(const BigInt& n, unsigned k);

}  // namespace doflab
