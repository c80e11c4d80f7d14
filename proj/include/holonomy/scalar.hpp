#pragma once

// Scalar backends. Every algebraic routine in the library is templated on the
// scalar type and instantiated for two of them: exact rationals (identity
// checks, zero tolerance) and double (numeric paths).

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/gmp.hpp>

#include <cmath>
#include <string>
#include <string_view>
#include <type_traits>

#include "holonomy/errors.hpp"

namespace holonomy {

using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using BigInt = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                             boost::multiprecision::et_off>;

template <class Scalar>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static constexpr const char* name = "f64";
};

template <>
struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
  static constexpr const char* name = "exact";
};

template <class Scalar>
inline constexpr bool is_exact_v = ScalarTraits<Scalar>::exact;

inline double to_double(double x) { return x; }
inline double to_double(const Rational& x) { return x.convert_to<double>(); }

template <class Scalar>
Scalar from_double(double x) {
  return Scalar(x);
}

inline bool is_zero(double x, double tol = 0.0) { return std::abs(x) <= tol; }
inline bool is_zero(const Rational& x, double = 0.0) { return x == 0; }

inline int sign_of(double x) { return (x > 0) - (x < 0); }
inline int sign_of(const Rational& x) { return x.sign(); }

inline double abs_of(double x) { return std::abs(x); }
inline Rational abs_of(const Rational& x) { return boost::multiprecision::abs(x); }

/// Exact integer k-th root, or false when the argument is not a perfect power.
bool exact_integer_root(const BigInt& value, int k, BigInt& root);

/// Real k-th root (k odd allows negative arguments). For rationals the result
/// must itself be rational, otherwise InexactOperation is thrown.
Rational real_root(const Rational& x, int k);
double real_root(double x, int k);

inline Rational sqrt_of(const Rational& x) { return real_root(x, 2); }
inline double sqrt_of(double x) { return real_root(x, 2); }

/// Parses "3", "-3/2", "0.25", "1e-3", "-inf" (double only).
template <class Scalar>
Scalar parse_scalar(std::string_view text);

template <>
Rational parse_scalar<Rational>(std::string_view text);
template <>
double parse_scalar<double>(std::string_view text);

/// Shortest round-trip text for doubles, "p/q" for rationals.
std::string format_scalar(double x);
std::string format_scalar(const Rational& x);

}  // namespace holonomy
