#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

namespace steinbias {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// Recovers the simplest fraction whose nearest double is `x` (so 0.3 maps to
// 3/10); falls back to the exact binary value when no convergent with a
// denominator below 2^40 round-trips.
Rational to_rational(double x);

// True when `x` has a round-tripping fraction with a small denominator.
bool has_small_rational(double x, std::int64_t max_denominator = 1'000'000);

double to_double(const Rational& r);
std::string to_string(const Rational& r);

// Scalar helpers shared by the double and exact code paths.
template <class T>
T from_double(double x) {
  if constexpr (std::is_same_v<T, Rational>) {
    return to_rational(x);
  } else {
    return static_cast<T>(x);
  }
}

template <class T>
double as_double(const T& x) {
  if constexpr (std::is_same_v<T, Rational>) {
    return to_double(x);
  } else {
    return static_cast<double>(x);
  }
}

template <class T>
T ipow(T base, int e) {
  T out(1);
  for (int i = 0; i < e; ++i) out *= base;
  return out;
}

template <class T>
T rising_factorial(const T& x, int k) {
  T out(1);
  for (int i = 0; i < k; ++i) out *= (x + T(i));
  return out;
}

template <class T>
T falling_factorial(const T& x, int k) {
  T out(1);
  for (int i = 0; i < k; ++i) out *= (x - T(i));
  return out;
}

template <class T>
T factorial(int k) {
  T out(1);
  for (int i = 2; i <= k; ++i) out *= T(i);
  return out;
}

// Generalized binomial coefficient x choose k for real x.
template <class T>
T binomial(const T& x, int k) {
  if (k < 0) return T(0);
  return falling_factorial(x, k) / factorial<T>(k);
}

}  // namespace steinbias
