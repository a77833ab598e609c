#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <concepts>
#include <cstdint>
#include <string>

namespace supercube {

/// Exact rational scalar used wherever identities are checked exactly.
using Rational = boost::multiprecision::cpp_rational;

/// Minimal commutative-ring surface the algebra layers rely on: construction
/// from small integers, ring arithmetic, equality, and exact division by a
/// (nonzero) machine integer for the factorials in the exponential series.
template <class R>
concept CoefficientRing = requires(R a, R b) {
    R(0);
    R(1);
    { a + b } -> std::convertible_to<R>;
    { a - b } -> std::convertible_to<R>;
    { a * b } -> std::convertible_to<R>;
    { -a } -> std::convertible_to<R>;
    { a == b } -> std::convertible_to<bool>;
    { a / 2 } -> std::convertible_to<R>;
};

template <CoefficientRing R>
bool is_ring_zero(const R& a) {
    return a == R(0);
}

inline double to_double(const Rational& a) { return a.convert_to<double>(); }
inline double to_double(double a) { return a; }

inline std::string ring_to_string(const Rational& a) { return a.str(); }
inline std::string ring_to_string(double a) { return std::to_string(a); }

/// |a - b| <= tol, for cross-checking machine-real results against oracles.
inline bool approx_equal(double a, double b, double tol = 1e-10) {
    return std::fabs(a - b) <= tol;
}

inline bool approx_equal_rel(double a, double b, double rel, double abs_floor = 1e-14) {
    const double scale = std::max(std::fabs(a), std::fabs(b));
    return std::fabs(a - b) <= std::max(rel * scale, abs_floor);
}

}  // namespace supercube
