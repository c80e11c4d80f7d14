#include "holonomy/scalar.hpp"

#include <gmp.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <limits>

namespace holonomy {

bool exact_integer_root(const BigInt& value, int k, BigInt& root) {
  if (k <= 0) throw ValidationError("root order must be positive");
  if (value < 0 && k % 2 == 0) return false;
  BigInt out;
  const int exact = mpz_root(out.backend().data(), value.backend().data(), static_cast<unsigned long>(k));
  if (!exact) return false;
  root = out;
  return true;
}

Rational real_root(const Rational& x, int k) {
  if (x < 0 && k % 2 == 0) throw ComputationError("even root of a negative number");
  BigInt num_root, den_root;
  const BigInt num = boost::multiprecision::numerator(x);
  const BigInt den = boost::multiprecision::denominator(x);
  if (!exact_integer_root(num, k, num_root) || !exact_integer_root(den, k, den_root)) {
    throw InexactOperation("root of order " + std::to_string(k) + " of " + x.str() +
                           " is not rational");
  }
  return Rational(num_root) / Rational(den_root);
}

double real_root(double x, int k) {
  if (x < 0 && k % 2 == 0) throw ComputationError("even root of a negative number");
  if (k == 2) return std::sqrt(x);
  if (k == 3) return std::cbrt(x);
  const double magnitude = std::pow(std::abs(x), 1.0 / k);
  return x < 0 ? -magnitude : magnitude;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

// Decimal literal [+-]digits[.digits][e[+-]digits] as an exact rational.
Rational parse_decimal(std::string_view s, std::string_view original) {
  bool negative = false;
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  long exponent = 0;
  if (const auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_text = s.substr(e + 1);
    bool exp_negative = false;
    if (!exp_text.empty() && (exp_text.front() == '+' || exp_text.front() == '-')) {
      exp_negative = exp_text.front() == '-';
      exp_text.remove_prefix(1);
    }
    if (!all_digits(exp_text)) throw ValidationError("malformed scalar '" + std::string(original) + "'");
    exponent = std::stol(std::string(exp_text));
    if (exp_negative) exponent = -exponent;
    s = s.substr(0, e);
  }
  std::string digits;
  if (const auto dot = s.find('.'); dot != std::string_view::npos) {
    const auto whole = s.substr(0, dot);
    const auto frac = s.substr(dot + 1);
    if ((!whole.empty() && !all_digits(whole)) || (!frac.empty() && !all_digits(frac)) ||
        (whole.empty() && frac.empty())) {
      throw ValidationError("malformed scalar '" + std::string(original) + "'");
    }
    digits = std::string(whole) + std::string(frac);
    exponent -= static_cast<long>(frac.size());
  } else {
    if (!all_digits(s)) throw ValidationError("malformed scalar '" + std::string(original) + "'");
    digits = std::string(s);
  }
  // A leading zero would make BigInt read the digits as octal.
  digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size()));
  Rational value{digits.empty() ? BigInt(0) : BigInt(digits)};
  BigInt scale = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(std::labs(exponent)));
  value = exponent >= 0 ? value * Rational(scale) : value / Rational(scale);
  return negative ? -value : value;
}

}  // namespace

template <>
Rational parse_scalar<Rational>(std::string_view text) {
  const auto s = trim(text);
  if (s.empty()) throw ValidationError("empty scalar");
  if (const auto slash = s.find('/'); slash != std::string_view::npos) {
    const Rational num = parse_decimal(s.substr(0, slash), s);
    const Rational den = parse_decimal(s.substr(slash + 1), s);
    if (den == 0) throw ValidationError("zero denominator in '" + std::string(s) + "'");
    return num / den;
  }
  return parse_decimal(s, s);
}

template <>
double parse_scalar<double>(std::string_view text) {
  const auto s = trim(text);
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s.find('/') != std::string_view::npos) return to_double(parse_scalar<Rational>(s));
  double value = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (!s.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) throw ValidationError("malformed scalar '" + std::string(s) + "'");
  return value;
}

std::string format_scalar(double x) {
  if (x == 0.0) return "0";
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), x);
  return std::string(buffer, ptr);
}

std::string format_scalar(const Rational& x) { return x.str(); }

}  // namespace holonomy
