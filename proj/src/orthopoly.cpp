#include "steinbias/orthopoly.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

namespace steinbias {

namespace {

constexpr int kExactMaxDegree = 8;

bool exact_friendly(const PolySystemId& sys, int m) {
  return m <= kExactMaxDegree && has_small_rational(sys.lambda) && has_small_rational(sys.p);
}

void check_degree(const PolySystemId& sys, int m) {
  if (m < 0) fail(ErrorCode::DegreeTooLarge, "negative degree " + std::to_string(m));
  if (sys.family == PolyFamily::Krawtchouk && m > sys.lambda) {
    fail(ErrorCode::DegreeTooLarge,
         "Krawtchouk degree " + std::to_string(m) + " exceeds lambda = " + std::to_string(sys.lambda));
  }
}

template <class T>
T inner(const Polynomial<T>& a, const Polynomial<T>& b, const std::vector<T>& moments) {
  T acc(0);
  for (int i = 0; i <= a.degree(); ++i) {
    for (int j = 0; j <= b.degree(); ++j) acc += a[i] * b[j] * moments[i + j];
  }
  return acc;
}

template <class T>
Polynomial<T> gram_schmidt_monic(const std::vector<T>& moments, int m, const T& zero_tol) {
  std::vector<Polynomial<T>> basis;
  std::vector<T> norms;
  for (int k = 0; k <= m; ++k) {
    std::vector<T> mono(k + 1, T(0));
    mono[k] = T(1);
    const Polynomial<T> xk(std::move(mono));
    Polynomial<T> pk = xk;
    for (std::size_t j = 0; j < basis.size(); ++j) pk -= basis[j] * (inner(xk, basis[j], moments) / norms[j]);
    const T norm = inner(pk, pk, moments);
    if (!(norm > zero_tol)) {
      fail(ErrorCode::SingularMomentMatrix,
           "moment matrix is singular at degree " + std::to_string(k) + " (law supported on too few points)");
    }
    basis.push_back(std::move(pk));
    norms.push_back(norm);
  }
  return basis.back();
}

bool params_exact_friendly(const DistributionSpec& d) {
  return std::all_of(d.params().begin(), d.params().end(), [](double x) { return has_small_rational(x); });
}

double next_term_magnitude(const PolySystemId& sys, int order, double x, double t) {
  const int next = order + 1;
  if (sys.family == PolyFamily::Krawtchouk && next > sys.lambda) return 0.0;
  return std::abs(poly_eval(sys, next, x)) * std::pow(std::abs(t), next) / std::tgamma(next + 1.0);
}

double truncated_series(const PolySystemId& sys, int order, double x, double t) {
  double acc = 0.0;
  double tm = 1.0;
  for (int m = 0; m <= order; ++m) {
    acc += poly_eval(sys, m, x) * tm;
    tm *= t / (m + 1);
  }
  return acc;
}

double alpha_series(const PolySystemId& sys, int order, double t) {
  double acc = 0.0;
  for (int m = 0; m <= order; ++m) {
    acc += alpha_closed_form(sys, m).value * std::pow(t, 2 * m) / std::tgamma(m + 1.0);
  }
  return acc;
}

// Closed forms of E[phi_t(Z_lambda)]^2.
double squared_generating_mean(const PolySystemId& sys, double t) {
  const double lam = sys.lambda;
  switch (sys.family) {
    case PolyFamily::Hermite:
    case PolyFamily::Charlier: return std::exp(lam * t * t);
    case PolyFamily::Laguerre: return std::pow(1.0 - t * t, -lam);
    case PolyFamily::Krawtchouk: return std::pow(1.0 + sys.p * (1.0 - sys.p) * t * t, lam);
    case PolyFamily::Gegenbauer: break;
  }
  fail(ErrorCode::NotApplicable, "no closed generating function for Gegenbauer");
}

std::vector<double> split_lambda(const PolySystemId& sys, int n) {
  std::vector<double> parts(n);
  if (sys.family == PolyFamily::Krawtchouk) {
    const long total = static_cast<long>(sys.lambda);
    if (total < n) fail(ErrorCode::PreconditionViolated, "Krawtchouk lambda smaller than summand count");
    for (int i = 0; i < n; ++i) parts[i] = static_cast<double>(total / n + (i < total % n ? 1 : 0));
  } else {
    for (auto& v : parts) v = sys.lambda / n;
  }
  return parts;
}

bool within(double residual, double scale, double tol) { return std::abs(residual) <= tol * std::max(1.0, scale); }

}  // namespace

std::string_view poly_family_name(PolyFamily f) {
  switch (f) {
    case PolyFamily::Hermite: return "Hermite";
    case PolyFamily::Laguerre: return "Laguerre";
    case PolyFamily::Charlier: return "Charlier";
    case PolyFamily::Krawtchouk: return "Krawtchouk";
    case PolyFamily::Gegenbauer: return "Gegenbauer";
  }
  return "Unknown";
}

PolyFamily parse_poly_family(std::string_view name) {
  for (PolyFamily f : {PolyFamily::Hermite, PolyFamily::Laguerre, PolyFamily::Charlier, PolyFamily::Krawtchouk,
                       PolyFamily::Gegenbauer}) {
    if (poly_family_name(f) == name) return f;
  }
  fail(ErrorCode::ParameterOutOfRange, "unknown polynomial family '" + std::string(name) + "'");
}

PolySystemId make_system(PolyFamily family, double lambda, double p) {
  if (!std::isfinite(lambda)) fail(ErrorCode::ParameterOutOfRange, "lambda must be finite");
  switch (family) {
    case PolyFamily::Hermite:
    case PolyFamily::Laguerre:
    case PolyFamily::Charlier:
      if (!(lambda > 0)) fail(ErrorCode::ParameterOutOfRange, "lambda must be > 0");
      break;
    case PolyFamily::Krawtchouk:
      if (!(lambda >= 1) || std::floor(lambda) != lambda) {
        fail(ErrorCode::ParameterOutOfRange, "Krawtchouk lambda must be a positive integer");
      }
      if (!(p > 0 && p < 1)) fail(ErrorCode::ParameterOutOfRange, "p must lie in (0,1)");
      break;
    case PolyFamily::Gegenbauer:
      if (!(lambda > -0.5)) fail(ErrorCode::ParameterOutOfRange, "Gegenbauer lambda must be > -1/2");
      break;
  }
  return {family, lambda, family == PolyFamily::Krawtchouk ? p : 0.5};
}

bool uses_differences(PolyFamily f) { return f == PolyFamily::Charlier || f == PolyFamily::Krawtchouk; }
bool closed_under_addition(PolyFamily f) { return f != PolyFamily::Gegenbauer; }

DistributionSpec reference_distribution(const PolySystemId& sys) {
  switch (sys.family) {
    case PolyFamily::Hermite: return make_distribution(Family::NormalMeanZero, {sys.lambda});
    case PolyFamily::Laguerre: return make_distribution(Family::Gamma, {sys.lambda});
    case PolyFamily::Charlier: return make_distribution(Family::Poisson, {sys.lambda});
    case PolyFamily::Krawtchouk: return make_distribution(Family::Binomial, {sys.lambda, sys.p});
    case PolyFamily::Gegenbauer: return make_distribution(Family::GegenbauerBeta, {sys.lambda});
  }
  fail(ErrorCode::ParameterOutOfRange, "unknown family");
}

RationalPoly poly_coeffs_exact(const PolySystemId& sys, int m) {
  check_degree(sys, m);
  const Rational lam = to_rational(sys.lambda);
  const Rational p = to_rational(sys.p);
  if (sys.family == PolyFamily::Hermite) return monic_by_recurrence(sys.family, lam, p, m);
  return monic_by_expansion(sys.family, lam, p, m);
}

Poly poly_coeffs(const PolySystemId& sys, int m) {
  check_degree(sys, m);
  if (exact_friendly(sys, m)) return poly_coeffs_exact(sys, m).cast<double>();
  if (sys.family == PolyFamily::Hermite) return monic_by_recurrence(sys.family, sys.lambda, sys.p, m);
  return monic_by_expansion(sys.family, sys.lambda, sys.p, m);
}

Poly poly_coeffs_recurrence(const PolySystemId& sys, int m) {
  check_degree(sys, m);
  return monic_by_recurrence(sys.family, sys.lambda, sys.p, m);
}

Poly poly_coeffs_expansion(const PolySystemId& sys, int m) {
  check_degree(sys, m);
  return monic_by_expansion(sys.family, sys.lambda, sys.p, m);
}

double poly_eval(const PolySystemId& sys, int m, double x) { return poly_coeffs(sys, m)(x); }

Rational alpha_exact(const PolySystemId& sys, int m) {
  check_degree(sys, m);
  return alpha_closed(sys.family, to_rational(sys.lambda), to_rational(sys.p), m);
}

AlphaValue alpha_closed_form(const PolySystemId& sys, int m) {
  check_degree(sys, m);
  const double value = exact_friendly(sys, m) ? to_double(alpha_exact(sys, m))
                                              : alpha_closed(sys.family, sys.lambda, sys.p, m);
  return {value, sys, m};
}

double alpha_numeric(const PolySystemId& sys, int m) {
  const Poly pm = poly_coeffs(sys, m);
  const double second = expect(reference_distribution(sys), [&](double x) {
    const double v = pm(x);
    return v * v;
  });
  return second / std::tgamma(m + 1.0);
}

Poly orthopoly_from_moments(const DistributionSpec& dist, int m) {
  if (m < 0) fail(ErrorCode::DegreeTooLarge, "negative degree");
  if (params_exact_friendly(dist)) {
    std::vector<Rational> moments;
    for (int k = 0; k <= 2 * m; ++k) moments.push_back(analytic_moment_exact(dist, k));
    return gram_schmidt_monic<Rational>(moments, m, Rational(0)).cast<double>();
  }
  std::vector<long double> moments;
  for (int k = 0; k <= 2 * m; ++k) moments.push_back(static_cast<long double>(analytic_moment(dist, k)));
  const long double tol = 1e-14L * std::max(1.0L, std::abs(moments[2 * m]));
  return gram_schmidt_monic<long double>(moments, m, tol).cast<double>();
}

double OrthogonalityReport::max_relative() const {
  double worst = 0.0;
  for (std::size_t k = 0; k < residual.size(); ++k) {
    for (double r : residual[k]) worst = std::max(worst, std::abs(r) / scale[k]);
  }
  return worst;
}

OrthogonalityReport orthogonality_residuals(const PolySystemId& sys, int m_max) {
  if (m_max > 8) fail(ErrorCode::PreconditionViolated, "orthogonality residuals limited to m_max <= 8");
  check_degree(sys, m_max);
  const DistributionSpec z = reference_distribution(sys);
  OrthogonalityReport report;
  for (int k = 0; k <= m_max; ++k) {
    const Poly pk = poly_coeffs(sys, k);
    const double alpha = alpha_closed_form(sys, k).value;
    const double kfact = std::tgamma(k + 1.0);
    std::vector<double> row;
    for (int j = 0; j <= k; ++j) {
      const double value = expect(z, [&](double x) { return std::pow(x, j) * pk(x); }) / kfact;
      row.push_back(value - (j == k ? alpha : 0.0));
    }
    report.residual.push_back(std::move(row));
    report.scale.push_back(std::max(1.0, alpha));
  }
  return report;
}

std::string_view to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::NotApplicable: return "not_applicable";
  }
  return "unknown";
}

bool GenFnReport::pass() const {
  return std::none_of(rows.begin(), rows.end(), [](const GenFnRow& r) { return r.status == CheckStatus::Fail; });
}

double generating_function(const PolySystemId& sys, double x, double t) {
  const double lam = sys.lambda;
  switch (sys.family) {
    case PolyFamily::Hermite: return std::exp(x * t - 0.5 * lam * t * t);
    case PolyFamily::Laguerre: return std::pow(1.0 + t, -lam) * std::exp(x * t / (1.0 + t));
    case PolyFamily::Charlier: return std::exp(-lam * t) * std::pow(1.0 + t, x);
    case PolyFamily::Krawtchouk: {
      const double q = 1.0 - sys.p;
      return std::pow(1.0 + q * t, x) * std::pow(1.0 - sys.p * t, lam - x);
    }
    case PolyFamily::Gegenbauer: break;
  }
  fail(ErrorCode::NotApplicable, "Gegenbauer generating function is not used here");
}

GenFnReport gen_fn_checks(const PolySystemId& sys, const std::vector<double>& xs, const std::vector<double>& ts,
                          int n_summands, int order) {
  if (order > kGenFnDefaultOrder || order < 1) {
    fail(ErrorCode::TruncationInsufficient, "truncation order must lie in [1, 12]");
  }
  if (n_summands < 1) fail(ErrorCode::PreconditionViolated, "need at least one summand");
  const int m_top = sys.family == PolyFamily::Krawtchouk ? std::min(order, static_cast<int>(sys.lambda)) : order;
  constexpr double tol = 1e-8;
  // The Krawtchouk series stops at degree lambda and equals the closed form
  // only on the lattice {0..lambda}.
  const auto on_lattice = [&](double x, double lam) {
    return sys.family != PolyFamily::Krawtchouk || (x >= 0 && x <= lam && std::floor(x) == x);
  };
  for (double t : ts) {
    if (std::abs(t) > kGenFnMaxT) {
      fail(ErrorCode::TruncationInsufficient, "|t| = " + std::to_string(std::abs(t)) + " exceeds 0.2");
    }
    for (double x : xs) {
      if (on_lattice(x, sys.lambda) && next_term_magnitude(sys, m_top, x, t) > 1e-10) {
        fail(ErrorCode::TruncationInsufficient,
             "series tail at x=" + std::to_string(x) + ", t=" + std::to_string(t) + " exceeds 1e-10");
      }
    }
  }

  GenFnReport report{sys, m_top, {}};
  const bool closed = sys.family != PolyFamily::Gegenbauer;

  for (double t : ts) {
    for (double x : xs) {
      if (!closed || !on_lattice(x, sys.lambda)) {
        report.rows.push_back({'a', x, t, 0, 0, 0, CheckStatus::NotApplicable});
        continue;
      }
      const double lhs = truncated_series(sys, m_top, x, t);
      const double rhs = generating_function(sys, x, t);
      const double res = lhs - rhs;
      report.rows.push_back({'a', x, t, lhs, rhs, res, within(res, rhs, tol) ? CheckStatus::Pass : CheckStatus::Fail});
    }
  }

  for (double t : ts) {
    for (std::size_t r = 0; r < xs.size(); ++r) {
      if (!closed_under_addition(sys.family)) {
        report.rows.push_back({'b', xs[r], t, 0, 0, 0, CheckStatus::NotApplicable});
        continue;
      }
      const auto lambdas = split_lambda(sys, n_summands);
      double w = 0.0;
      double product = 1.0;
      bool applicable = true;
      for (int i = 0; i < n_summands; ++i) {
        double xi = xs[(r + static_cast<std::size_t>(i)) % xs.size()];
        if (sys.family == PolyFamily::Krawtchouk) xi = std::min(xi, lambdas[i]);
        if (!on_lattice(xi, lambdas[i])) {
          applicable = false;
          break;
        }
        w += xi;
        const PolySystemId part = make_system(sys.family, lambdas[i], sys.p);
        const int part_top = sys.family == PolyFamily::Krawtchouk ? static_cast<int>(lambdas[i]) : m_top;
        product *= truncated_series(part, std::min(part_top, m_top), xi, t);
      }
      if (!applicable) {
        report.rows.push_back({'b', xs[r], t, 0, 0, 0, CheckStatus::NotApplicable});
        continue;
      }
      const double lhs = truncated_series(sys, m_top, w, t);
      const double res = lhs - product;
      report.rows.push_back(
          {'b', w, t, lhs, product, res, within(res, product, tol) ? CheckStatus::Pass : CheckStatus::Fail});
    }
  }

  const DistributionSpec z = reference_distribution(sys);
  for (double t : ts) {
    double lhs = 0.0;
    if (closed) {
      lhs = expect(z, [&](double x) {
        const double g = generating_function(sys, x, t);
        return g * g;
      });
    } else {
      lhs = expect(z, [&](double x) {
        const double g = truncated_series(sys, m_top, x, t);
        return g * g;
      });
    }
    const double rhs = alpha_series(sys, m_top, t);
    const double res = lhs - rhs;
    report.rows.push_back({'c', 0.0, t, lhs, rhs, res, within(res, rhs, tol) ? CheckStatus::Pass : CheckStatus::Fail});
    if (closed) {
      const double exact = squared_generating_mean(sys, t);
      const double res2 = exact - rhs;
      report.rows.push_back(
          {'c', 1.0, t, exact, rhs, res2, within(res2, rhs, tol) ? CheckStatus::Pass : CheckStatus::Fail});
    }
  }
  return report;
}

std::vector<AlphaTableRow> alpha_table(const std::vector<PolySystemId>& systems, int m_max) {
  std::vector<AlphaTableRow> rows;
  for (const auto& sys : systems) {
    for (int m = 0; m <= m_max; ++m) {
      if (sys.family == PolyFamily::Krawtchouk && m > sys.lambda) break;
      const double closed = alpha_closed_form(sys, m).value;
      const double numeric = alpha_numeric(sys, m);
      rows.push_back({sys, m, closed, numeric, std::abs(closed - numeric)});
    }
  }
  return rows;
}

void write_alpha_table_csv(std::ostream& out, const std::vector<AlphaTableRow>& rows) {
  out << "family,lambda,p,m,alpha_closed,alpha_numeric,abs_err\n";
  out << std::setprecision(17);
  for (const auto& r : rows) {
    out << poly_family_name(r.system.family) << ',' << r.system.lambda << ',' << r.system.p << ',' << r.m << ','
        << r.alpha_closed << ',' << r.alpha_numeric << ',' << r.abs_err << '\n';
  }
}

}  // namespace steinbias
