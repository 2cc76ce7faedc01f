#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "steinbias/rational.hpp"

namespace steinbias {

// Dense univariate polynomial, coefficients ascending in power.
template <class T>
class Polynomial {
 public:
  Polynomial() : coeffs_{T(0)} {}
  explicit Polynomial(std::vector<T> coeffs) : coeffs_(std::move(coeffs)) { trim(); }
  Polynomial(std::initializer_list<T> coeffs) : coeffs_(coeffs) { trim(); }

  static Polynomial constant(const T& c) { return Polynomial(std::vector<T>{c}); }
  static Polynomial x() { return Polynomial(std::vector<T>{T(0), T(1)}); }

  // (x - r)
  static Polynomial linear_root(const T& r) { return Polynomial(std::vector<T>{-r, T(1)}); }

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<T>& coeffs() const { return coeffs_; }
  const T& operator[](std::size_t i) const { return coeffs_[i]; }
  const T& leading() const { return coeffs_.back(); }
  bool is_monic() const { return coeffs_.back() == T(1); }

  template <class U>
  U operator()(const U& x) const {
    U acc = static_cast<U>(as_scalar<U>(coeffs_.back()));
    for (std::size_t i = coeffs_.size() - 1; i-- > 0;) acc = acc * x + static_cast<U>(as_scalar<U>(coeffs_[i]));
    return acc;
  }

  Polynomial derivative() const {
    if (coeffs_.size() == 1) return Polynomial();
    std::vector<T> d(coeffs_.size() - 1);
    for (std::size_t i = 1; i < coeffs_.size(); ++i) d[i - 1] = coeffs_[i] * T(static_cast<int>(i));
    return Polynomial(std::move(d));
  }

  Polynomial& operator+=(const Polynomial& o) {
    if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size(), T(0));
    for (std::size_t i = 0; i < o.coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    trim();
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size(), T(0));
    for (std::size_t i = 0; i < o.coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
    trim();
    return *this;
  }
  Polynomial& operator*=(const T& s) {
    for (auto& c : coeffs_) c *= s;
    trim();
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, const T& s) { return a *= s; }
  friend Polynomial operator*(const T& s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    std::vector<T> out(a.coeffs_.size() + b.coeffs_.size() - 1, T(0));
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
      for (std::size_t j = 0; j < b.coeffs_.size(); ++j) out[i + j] += a.coeffs_[i] * b.coeffs_[j];
    }
    return Polynomial(std::move(out));
  }
  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.coeffs_ == b.coeffs_; }

  template <class U>
  Polynomial<U> cast() const {
    std::vector<U> out;
    out.reserve(coeffs_.size());
    for (const auto& c : coeffs_) out.push_back(static_cast<U>(as_scalar<U>(c)));
    return Polynomial<U>(std::move(out));
  }

 private:
  template <class U>
  static auto as_scalar(const T& c) {
    if constexpr (std::is_same_v<T, Rational> && !std::is_same_v<U, Rational>) {
      return to_double(c);
    } else {
      return c;
    }
  }

  void trim() {
    if (coeffs_.empty()) coeffs_.push_back(T(0));
    while (coeffs_.size() > 1 && coeffs_.back() == T(0)) coeffs_.pop_back();
  }

  std::vector<T> coeffs_;
};

using Poly = Polynomial<double>;
using RationalPoly = Polynomial<Rational>;

// Product of (x - r_i); the empty product is 1.
template <class T>
Polynomial<T> from_roots(const std::vector<T>& roots) {
  Polynomial<T> out = Polynomial<T>::constant(T(1));
  for (const auto& r : roots) out = out * Polynomial<T>::linear_root(r);
  return out;
}

// Real points where `p` changes sign (roots of odd multiplicity), ascending.
// Found by recursing on the derivative to bracket monotone pieces.
std::vector<double> sign_change_roots(const Poly& p);

}  // namespace steinbias
