#include "steinbias/rational.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace steinbias {

namespace {

Rational exact_binary(double x) {
  int exponent = 0;
  const double mantissa = std::frexp(x, &exponent);
  // mantissa * 2^53 is an exact integer
  const auto scaled = static_cast<std::int64_t>(std::ldexp(mantissa, 53));
  Rational r{BigInt(scaled)};
  const int shift = exponent - 53;
  BigInt two_pow = BigInt(1) << std::abs(shift);
  if (shift >= 0) return r * Rational(two_pow);
  return r / Rational(two_pow);
}

// Continued-fraction convergents of x; returns the first whose double value
// equals x and whose denominator is bounded.
bool round_trip_fraction(double x, std::int64_t max_den, Rational& out) {
  if (!std::isfinite(x)) return false;
  const Rational target = exact_binary(x);
  BigInt h_prev = 1, h = 0, k_prev = 0, k = 1;
  Rational rest = target;
  for (int iter = 0; iter < 64; ++iter) {
    BigInt a = boost::multiprecision::numerator(rest) / boost::multiprecision::denominator(rest);
    if (boost::multiprecision::numerator(rest) < 0 &&
        a * boost::multiprecision::denominator(rest) != boost::multiprecision::numerator(rest)) {
      a -= 1;
    }
    const BigInt h_next = a * h_prev + h;
    const BigInt k_next = a * k_prev + k;
    h = h_prev;
    k = k_prev;
    h_prev = h_next;
    k_prev = k_next;
    if (k_prev > max_den) return false;
    Rational candidate(h_prev, k_prev);
    if (to_double(candidate) == x) {
      out = candidate;
      return true;
    }
    const Rational frac = rest - Rational(a);
    if (frac == 0) return false;
    rest = 1 / frac;
  }
  return false;
}

}  // namespace

Rational to_rational(double x) {
  if (x == 0.0) return Rational(0);
  Rational r;
  if (round_trip_fraction(x, std::int64_t{1} << 40, r)) return r;
  return exact_binary(x);
}

bool has_small_rational(double x, std::int64_t max_denominator) {
  if (x == 0.0) return true;
  Rational r;
  return round_trip_fraction(x, max_denominator, r);
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

std::string to_string(const Rational& r) {
  const BigInt num = boost::multiprecision::numerator(r);
  const BigInt den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

}  // namespace steinbias
