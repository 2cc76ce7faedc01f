#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "steinbias/distributions.hpp"
#include "steinbias/errors.hpp"
#include "steinbias/polynomial.hpp"

namespace steinbias {

enum class PolyFamily { Hermite, Laguerre, Charlier, Krawtchouk, Gegenbauer };

std::string_view poly_family_name(PolyFamily f);
PolyFamily parse_poly_family(std::string_view name);

// Hermite/Laguerre/Charlier: lambda > 0. Krawtchouk: lambda a positive
// integer and p in (0,1). Gegenbauer: lambda > -1/2. `p` is ignored except
// for Krawtchouk.
struct PolySystemId {
  PolyFamily family;
  double lambda;
  double p = 0.5;
};

PolySystemId make_system(PolyFamily family, double lambda, double p = 0.5);

bool uses_differences(PolyFamily f);       // Charlier, Krawtchouk
bool closed_under_addition(PolyFamily f);  // all but Gegenbauer

// Z_lambda of the family: N(0,lambda), Gamma(lambda), Poisson(lambda),
// Binomial(lambda,p), GegenbauerBeta(lambda).
DistributionSpec reference_distribution(const PolySystemId& sys);

// Three-term recurrence P_{n+1} = (x - a_n) P_n - b_n P_{n-1} of the monic
// system.
template <class T>
struct RecurrenceCoefficients {
  T a;
  T b;
};

template <class T>
RecurrenceCoefficients<T> recurrence_coefficients(PolyFamily f, const T& lambda, const T& p, int n) {
  const T tn(n);
  switch (f) {
    case PolyFamily::Hermite: return {T(0), tn * lambda};
    case PolyFamily::Laguerre: return {T(2 * n) + lambda, tn * (tn + lambda - T(1))};
    case PolyFamily::Charlier: return {tn + lambda, tn * lambda};
    case PolyFamily::Krawtchouk: {
      const T q = T(1) - p;
      return {p * (lambda - tn) + tn * q, tn * p * q * (lambda - tn + T(1))};
    }
    case PolyFamily::Gegenbauer: {
      if (n == 0) return {T(0), T(0)};
      if (n == 1) return {T(0), T(1) / (T(2) * (lambda + T(1)))};
      return {T(0), tn * (T(2) * lambda + tn - T(1)) / (T(4) * (lambda + tn - T(1)) * (lambda + tn))};
    }
  }
  return {T(0), T(0)};
}

template <class T>
Polynomial<T> monic_by_recurrence(PolyFamily f, const T& lambda, const T& p, int m) {
  Polynomial<T> prev = Polynomial<T>::constant(T(1));
  if (m == 0) return prev;
  const auto c0 = recurrence_coefficients(f, lambda, p, 0);
  Polynomial<T> cur = Polynomial<T>::linear_root(c0.a);
  for (int n = 1; n < m; ++n) {
    const auto c = recurrence_coefficients(f, lambda, p, n);
    Polynomial<T> next = Polynomial<T>::linear_root(c.a) * cur - c.b * prev;
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

// Closed-form coefficients read off the generating functions (Hermite,
// Laguerre, Krawtchouk), the falling-factorial sum (Charlier), and the
// explicit hypergeometric sum (Gegenbauer).
template <class T>
Polynomial<T> monic_by_expansion(PolyFamily f, const T& lambda, const T& p, int m) {
  std::vector<T> c(m + 1, T(0));
  switch (f) {
    case PolyFamily::Hermite: {
      for (int k = 0; 2 * k <= m; ++k) {
        c[m - 2 * k] = factorial<T>(m) / (factorial<T>(k) * factorial<T>(m - 2 * k)) * ipow(T(-lambda / T(2)), k);
      }
      return Polynomial<T>(std::move(c));
    }
    case PolyFamily::Laguerre: {
      for (int j = 0; j <= m; ++j) {
        const T sign = ((m - j) % 2 == 0) ? T(1) : T(-1);
        c[j] = binomial(T(m), j) * sign * rising_factorial(T(lambda + T(j)), m - j);
      }
      return Polynomial<T>(std::move(c));
    }
    case PolyFamily::Charlier: {
      Polynomial<T> out;
      Polynomial<T> falling = Polynomial<T>::constant(T(1));
      for (int k = 0; k <= m; ++k) {
        if (k > 0) falling = falling * Polynomial<T>::linear_root(T(k - 1));
        out += falling * (binomial(T(m), k) * ipow(T(-lambda), m - k));
      }
      return out;
    }
    case PolyFamily::Krawtchouk: {
      const T q = T(1) - p;
      Polynomial<T> out;
      for (int k = 0; k <= m; ++k) {
        Polynomial<T> term = Polynomial<T>::constant(binomial(T(m), k) * ipow(q, k) * ipow(T(-p), m - k));
        for (int i = 0; i < k; ++i) term = term * Polynomial<T>::linear_root(T(i));
        // (lambda - x)_{m-k} = prod (-(x - (lambda - i)))
        for (int i = 0; i < m - k; ++i) term = term * Polynomial<T>::linear_root(lambda - T(i)) * T(-1);
        out += term;
      }
      return out;
    }
    case PolyFamily::Gegenbauer: {
      for (int k = 0; 2 * k <= m; ++k) {
        T denom = factorial<T>(k) * factorial<T>(m - 2 * k) * ipow(T(4), k);
        for (int j = m - k; j <= m - 1; ++j) denom *= (lambda + T(j));
        const T sign = (k % 2 == 0) ? T(1) : T(-1);
        c[m - 2 * k] = sign * factorial<T>(m) / denom;
      }
      return Polynomial<T>(std::move(c));
    }
  }
  return Polynomial<T>::constant(T(1));
}

template <class T>
T alpha_closed(PolyFamily f, const T& lambda, const T& p, int m) {
  switch (f) {
    case PolyFamily::Hermite:
    case PolyFamily::Charlier: return ipow(lambda, m);
    case PolyFamily::Laguerre: return rising_factorial(lambda, m);
    case PolyFamily::Krawtchouk: return falling_factorial(lambda, m) * ipow(T(p * (T(1) - p)), m);
    case PolyFamily::Gegenbauer: {
      if (m == 0) return T(1);
      // Gamma(lambda)Gamma(2lambda+m)/Gamma(2lambda) / Gamma(lambda+m) written as a
      // product so that lambda = 0 needs no limit.
      T ratio(2);
      for (int j = 1; j < m; ++j) ratio *= (T(2) * lambda + T(j)) / (lambda + T(j));
      return ratio / (ipow(T(4), m) * rising_factorial(T(lambda + T(1)), m));
    }
  }
  return T(0);
}

// Monic P^m of the system. Exact rational arithmetic is used internally when
// lambda and p are small-denominator rationals and m <= 8.
Poly poly_coeffs(const PolySystemId& sys, int m);
RationalPoly poly_coeffs_exact(const PolySystemId& sys, int m);
Poly poly_coeffs_recurrence(const PolySystemId& sys, int m);
Poly poly_coeffs_expansion(const PolySystemId& sys, int m);

double poly_eval(const PolySystemId& sys, int m, double x);

struct AlphaValue {
  double value;
  PolySystemId system;
  int m;
};

AlphaValue alpha_closed_form(const PolySystemId& sys, int m);
Rational alpha_exact(const PolySystemId& sys, int m);

// (1/m!) E[P^m(Z)]^2 by quadrature / exact summation over Z_lambda.
double alpha_numeric(const PolySystemId& sys, int m);

// Gram-Schmidt on the moment (Hankel) inner product; exact when the law's
// parameters are small-denominator rationals.
Poly orthopoly_from_moments(const DistributionSpec& dist, int m);

struct OrthogonalityReport {
  // residual[k][j] = (1/k!) E[Z^j P^k(Z)] - alpha^(k) delta_{jk}, for j <= k.
  std::vector<std::vector<double>> residual;
  // max(1, alpha^(k)); residuals are judged relative to this.
  std::vector<double> scale;

  double max_relative() const;
};

OrthogonalityReport orthogonality_residuals(const PolySystemId& sys, int m_max);

// Generating-function checks.
enum class CheckStatus { Pass, Fail, NotApplicable };
std::string_view to_string(CheckStatus s);

struct GenFnRow {
  char check;  // 'a' series vs closed form, 'b' multiplicativity, 'c' alpha series
  double x;
  double t;
  double lhs;
  double rhs;
  double residual;
  CheckStatus status;
};

struct GenFnReport {
  PolySystemId system;
  int order;
  std::vector<GenFnRow> rows;
  bool pass() const;
};

inline constexpr int kGenFnDefaultOrder = 12;
inline constexpr double kGenFnMaxT = 0.2;

// Exponential generating function sum_m P^m(x) t^m / m! in closed form.
// Throws NotApplicable for Gegenbauer.
double generating_function(const PolySystemId& sys, double x, double t);

GenFnReport gen_fn_checks(const PolySystemId& sys, const std::vector<double>& xs, const std::vector<double>& ts,
                          int n_summands, int order = kGenFnDefaultOrder);

struct AlphaTableRow {
  PolySystemId system;
  int m;
  double alpha_closed;
  double alpha_numeric;
  double abs_err;
};

std::vector<AlphaTableRow> alpha_table(const std::vector<PolySystemId>& systems, int m_max);
// Columns: family,lambda,p,m,alpha_closed,alpha_numeric,abs_err
void write_alpha_table_csv(std::ostream& out, const std::vector<AlphaTableRow>& rows);

}  // namespace steinbias
