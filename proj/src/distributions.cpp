#include "steinbias/distributions.hpp"

#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <charconv>
#include <cmath>
#include <istream>
#include <numbers>
#include <optional>
#include <numeric>
#include <ostream>
#include <sstream>

#include "steinbias/errors.hpp"

namespace steinbias {

namespace {

constexpr double kPi = std::numbers::pi;

std::string format_double(double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorCode::ParameterOutOfRange, what);
}

bool is_integer(double x) { return std::isfinite(x) && std::floor(x) == x; }

// Stirling numbers of the second kind S(k, j), j = 0..k.
template <class T>
std::vector<T> stirling2_row(int k) {
  std::vector<std::vector<T>> s(k + 1, std::vector<T>(k + 1, T(0)));
  s[0][0] = T(1);
  for (int n = 1; n <= k; ++n) {
    for (int j = 1; j <= n; ++j) s[n][j] = T(j) * s[n - 1][j] + s[n - 1][j - 1];
  }
  return s[k];
}

template <class T>
T gegenbauer_even_moment(const T& lambda, int half) {
  T out(1);
  for (int i = 0; i < half; ++i) out *= (T(2 * i + 1) / T(2)) / (lambda + T(1) + T(i));
  return out;
}

template <class T>
T moment_impl(const DistributionSpec& d, int k) {
  if (k < 0) fail(ErrorCode::MomentInfinite, "negative moment order");
  const auto par = [&](std::size_t i) { return from_double<T>(d.param(i)); };
  const bool odd = (k % 2) != 0;
  switch (d.family()) {
    case Family::NormalMeanZero: {
      if (odd) return T(0);
      T out = ipow(par(0), k / 2);
      for (int j = k - 1; j > 1; j -= 2) out *= T(j);
      return out;
    }
    case Family::Gamma:
      return rising_factorial(par(0), k);
    case Family::Poisson: {
      const auto s = stirling2_row<T>(k);
      T out(0);
      for (int j = 0; j <= k; ++j) out += s[j] * ipow(par(0), j);
      return out;
    }
    case Family::Binomial: {
      const auto s = stirling2_row<T>(k);
      T out(0);
      for (int j = 0; j <= k; ++j) out += s[j] * falling_factorial(par(0), j) * ipow(par(1), j);
      return out;
    }
    case Family::GegenbauerBeta:
      return odd ? T(0) : gegenbauer_even_moment(par(0), k / 2);
    case Family::Arcsine:
      return odd ? T(0) : gegenbauer_even_moment(T(0), k / 2);
    case Family::Semicircle:
      return odd ? T(0) : gegenbauer_even_moment(T(1), k / 2);
    case Family::Laplace:
      return odd ? T(0) : factorial<T>(k) * ipow(par(0), k);
    case Family::UniformInterval: {
      const T a = par(0);
      const T b = par(1);
      return (ipow(b, k + 1) - ipow(a, k + 1)) / (T(k + 1) * (b - a));
    }
    case Family::EmpiricalAtoms: {
      T total(0);
      T acc(0);
      for (const auto& atom : d.atoms()) {
        const T w = from_double<T>(atom.w);
        total += w;
        acc += w * ipow(from_double<T>(atom.x), k);
      }
      return acc / total;
    }
  }
  return T(0);
}

double gegenbauer_constant(double lambda) {
  return std::exp(std::lgamma(lambda + 1.0) - std::lgamma(lambda + 0.5)) / std::sqrt(kPi);
}

double gegenbauer_density(double lambda, double x) {
  if (x < -1.0 || x > 1.0) return 0.0;
  const double u = (1.0 - x) * (1.0 + x);
  return gegenbauer_constant(lambda) * std::pow(u, lambda - 0.5);
}

double draw_symmetric_beta(double a, RandomStream& s) {
  std::gamma_distribution<double> g(a, 1.0);
  const double g1 = g(s.engine());
  const double g2 = g(s.engine());
  return 2.0 * g1 / (g1 + g2) - 1.0;
}

double draw_gegenbauer(double lambda, RandomStream& s) {
  if (lambda == 0.5) return 2.0 * s.uniform() - 1.0;
  if (lambda == 0.0) return std::sin(kPi * (s.uniform() - 0.5));
  return draw_symmetric_beta(lambda + 0.5, s);
}

// Quadrature knots that split the support into pieces over which the density
// varies moderately.
std::vector<double> default_knots(const DistributionSpec& d, double lo, double hi) {
  std::vector<double> k{lo, hi};
  switch (d.family()) {
    case Family::NormalMeanZero: {
      const double sd = std::sqrt(d.param(0));
      for (double j : {0.0, 0.5, 1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 20.0, 30.0}) {
        k.push_back(j * sd);
        k.push_back(-j * sd);
      }
      break;
    }
    case Family::Gamma: {
      const double m = d.param(0);
      const double sd = std::sqrt(m);
      for (double j : {-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 20.0, 30.0, 45.0}) {
        k.push_back(m + j * sd);
      }
      for (double x : {0.25, 1.0, 4.0, 10.0, 25.0, 50.0}) k.push_back(x);
      break;
    }
    case Family::Laplace: {
      const double a = d.param(0);
      k.push_back(0.0);
      for (double j = 0.5; j < 200.0; j *= 2.0) {
        k.push_back(j * a);
        k.push_back(-j * a);
      }
      break;
    }
    default: {
      for (double f : {0.25, 0.5, 0.75}) k.push_back(lo + f * (hi - lo));
      break;
    }
  }
  return k;
}

double integrate_angle(const std::function<double(double)>& g, std::vector<double> knots) {
  for (double k : {kPi / 8, kPi / 4, 3 * kPi / 8}) knots.push_back(k);
  const double lo = knots[0];
  const double hi = knots[1];
  std::sort(knots.begin(), knots.end());
  knots.erase(std::remove_if(knots.begin(), knots.end(), [&](double x) { return !(x >= lo && x <= hi); }),
              knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  boost::math::quadrature::tanh_sinh<double> integrator(15);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    if (knots[i + 1] > knots[i]) total += integrator.integrate(g, knots[i], knots[i + 1], 1e-13);
  }
  return total;
}

// x = -cos(phi) on [-1,0] and x = cos(phi) on [0,1], phi in [0, pi/2]; both
// singular endpoints sit at phi = 0 where they are resolved exactly.
double integrate_symmetric_beta(double lambda, const std::function<double(double)>& f, double lo, double hi,
                                std::span<const double> breaks) {
  lo = std::max(lo, -1.0);
  hi = std::min(hi, 1.0);
  if (!(hi > lo)) return 0.0;
  const double c = gegenbauer_constant(lambda);
  const auto weight = [lambda, c](double phi) {
    const double s = std::sin(phi);
    return lambda == 0.0 ? c : c * std::pow(s, 2.0 * lambda);
  };
  double total = 0.0;
  if (lo < 0.0) {
    const double a = lo;
    const double b = std::min(hi, 0.0);
    std::vector<double> knots{std::acos(-a), std::acos(-b)};
    for (double x : breaks) {
      if (x > a && x < b) knots.push_back(std::acos(-x));
    }
    total += integrate_angle([&](double phi) { return f(-std::cos(phi)) * weight(phi); }, knots);
  }
  if (hi > 0.0) {
    const double a = std::max(lo, 0.0);
    const double b = hi;
    std::vector<double> knots{std::acos(b), std::acos(a)};
    for (double x : breaks) {
      if (x > a && x < b) knots.push_back(std::acos(x));
    }
    total += integrate_angle([&](double phi) { return f(std::cos(phi)) * weight(phi); }, knots);
  }
  return total;
}

double integrate_pieces(const DistributionSpec& d, const std::function<double(double)>& f, double lo,
                        double hi, std::span<const double> breaks) {
  if (!(hi > lo)) return 0.0;
  if (const auto lam = symmetric_beta_lambda(d)) return integrate_symmetric_beta(*lam, f, lo, hi, breaks);
  std::vector<double> knots = default_knots(d, lo, hi);
  knots.insert(knots.end(), breaks.begin(), breaks.end());
  std::sort(knots.begin(), knots.end());
  knots.erase(std::remove_if(knots.begin(), knots.end(), [&](double x) { return !(x >= lo && x <= hi); }),
              knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  boost::math::quadrature::tanh_sinh<double> integrator(15);
  const auto integrand = [&](double x) {
    const double dens = density(d, x);
    if (dens == 0.0) return 0.0;
    return f(x) * dens;
  };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    if (knots[i + 1] <= knots[i]) continue;
    total += integrator.integrate(integrand, knots[i], knots[i + 1], 1e-13);
  }
  return total;
}

}  // namespace

std::string_view family_name(Family f) {
  switch (f) {
    case Family::NormalMeanZero: return "NormalMeanZero";
    case Family::Gamma: return "Gamma";
    case Family::Poisson: return "Poisson";
    case Family::Binomial: return "Binomial";
    case Family::GegenbauerBeta: return "GegenbauerBeta";
    case Family::Laplace: return "Laplace";
    case Family::UniformInterval: return "UniformInterval";
    case Family::Arcsine: return "Arcsine";
    case Family::Semicircle: return "Semicircle";
    case Family::EmpiricalAtoms: return "EmpiricalAtoms";
  }
  return "Unknown";
}

Family parse_family(std::string_view name) {
  for (Family f : {Family::NormalMeanZero, Family::Gamma, Family::Poisson, Family::Binomial,
                   Family::GegenbauerBeta, Family::Laplace, Family::UniformInterval, Family::Arcsine,
                   Family::Semicircle, Family::EmpiricalAtoms}) {
    if (family_name(f) == name) return f;
  }
  fail(ErrorCode::ParameterOutOfRange, "unknown distribution family '" + std::string(name) + "'");
}

bool Support::contains(double x) const {
  if (!(x >= lo && x <= hi)) return false;
  if (kind == SupportKind::FiniteLattice || kind == SupportKind::NaturalNumbers) return is_integer(x);
  return true;
}

DistributionSpec make_distribution(Family family, std::vector<double> params) {
  const auto need = [&](std::size_t n) {
    require(params.size() == n, std::string(family_name(family)) + " expects " + std::to_string(n) +
                                    " parameter(s), got " + std::to_string(params.size()));
    for (double p : params) require(std::isfinite(p), "parameters must be finite");
  };
  std::vector<Atom> atoms;
  switch (family) {
    case Family::NormalMeanZero:
      need(1);
      require(params[0] > 0, "variance lambda must be > 0");
      break;
    case Family::Gamma:
      need(1);
      require(params[0] > 0, "shape lambda must be > 0");
      break;
    case Family::Poisson:
      need(1);
      require(params[0] > 0, "rate lambda must be > 0");
      break;
    case Family::Binomial:
      need(2);
      require(is_integer(params[0]) && params[0] >= 1, "trials lambda must be a positive integer");
      require(params[1] > 0 && params[1] < 1, "success probability p must lie in (0,1)");
      break;
    case Family::GegenbauerBeta:
      need(1);
      require(params[0] > -0.5, "lambda must be > -1/2");
      break;
    case Family::Laplace:
      need(1);
      require(params[0] > 0, "scale alpha must be > 0");
      break;
    case Family::UniformInterval:
      need(2);
      require(params[0] < params[1], "endpoints must satisfy a < b");
      break;
    case Family::Arcsine:
    case Family::Semicircle:
      need(0);
      break;
    case Family::EmpiricalAtoms: {
      require(!params.empty() && params.size() % 2 == 0, "atoms expect (x, w) pairs");
      double total = 0.0;
      for (std::size_t i = 0; i < params.size(); i += 2) {
        require(std::isfinite(params[i]) && std::isfinite(params[i + 1]), "atoms must be finite");
        require(params[i + 1] >= 0, "atom weight must be nonnegative");
        total += params[i + 1];
      }
      require(total > 0, "atom weights must not all be zero");
      for (std::size_t i = 0; i < params.size(); i += 2) {
        if (params[i + 1] > 0) atoms.push_back({params[i], params[i + 1]});
      }
      std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.x < b.x; });
      std::vector<Atom> merged;
      for (const auto& a : atoms) {
        if (!merged.empty() && merged.back().x == a.x) {
          merged.back().w += a.w;
        } else {
          merged.push_back(a);
        }
      }
      params.clear();
      for (auto& a : merged) {
        a.w /= total;
        params.push_back(a.x);
        params.push_back(a.w);
      }
      atoms = std::move(merged);
      break;
    }
  }
  return DistributionSpec(family, std::move(params), std::move(atoms));
}

DistributionSpec make_atoms(std::span<const double> points, std::span<const double> weights) {
  require(points.size() == weights.size(), "points and weights differ in length");
  std::vector<double> params;
  for (std::size_t i = 0; i < points.size(); ++i) {
    params.push_back(points[i]);
    params.push_back(weights[i]);
  }
  return make_distribution(Family::EmpiricalAtoms, std::move(params));
}

Support DistributionSpec::support() const {
  constexpr double inf = std::numeric_limits<double>::infinity();
  switch (family_) {
    case Family::NormalMeanZero:
    case Family::Laplace: return {SupportKind::RealLine, -inf, inf};
    case Family::Gamma: return {SupportKind::HalfLine, 0.0, inf};
    case Family::Poisson: return {SupportKind::NaturalNumbers, 0.0, inf};
    case Family::Binomial: return {SupportKind::FiniteLattice, 0.0, params_[0]};
    case Family::GegenbauerBeta:
    case Family::Arcsine:
    case Family::Semicircle: return {SupportKind::Interval, -1.0, 1.0};
    case Family::UniformInterval: return {SupportKind::Interval, params_[0], params_[1]};
    case Family::EmpiricalAtoms: return {SupportKind::Atoms, atoms_.front().x, atoms_.back().x};
  }
  return {SupportKind::RealLine, -inf, inf};
}

bool DistributionSpec::is_discrete() const noexcept {
  return family_ == Family::Poisson || family_ == Family::Binomial || family_ == Family::EmpiricalAtoms;
}

bool DistributionSpec::is_lattice() const noexcept {
  if (family_ == Family::Poisson || family_ == Family::Binomial) return true;
  if (family_ != Family::EmpiricalAtoms) return false;
  return std::all_of(atoms_.begin(), atoms_.end(), [](const Atom& a) { return is_integer(a.x); });
}

std::string DistributionSpec::description() const {
  std::string out = "family=" + std::string(family_name(family_)) + " params=";
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (i) out += ';';
    out += format_double(params_[i]);
  }
  return out;
}

double draw(const DistributionSpec& d, RandomStream& s) {
  switch (d.family()) {
    case Family::NormalMeanZero: {
      std::normal_distribution<double> n(0.0, std::sqrt(d.param(0)));
      return n(s.engine());
    }
    case Family::Gamma: {
      std::gamma_distribution<double> g(d.param(0), 1.0);
      return g(s.engine());
    }
    case Family::Poisson: {
      std::poisson_distribution<long> p(d.param(0));
      return static_cast<double>(p(s.engine()));
    }
    case Family::Binomial: {
      std::binomial_distribution<long> b(static_cast<long>(d.param(0)), d.param(1));
      return static_cast<double>(b(s.engine()));
    }
    case Family::GegenbauerBeta: return draw_gegenbauer(d.param(0), s);
    case Family::Arcsine: return draw_gegenbauer(0.0, s);
    case Family::Semicircle: return draw_symmetric_beta(1.5, s);
    case Family::Laplace: {
      const double u = s.uniform() - 0.5;
      const double mag = -d.param(0) * std::log1p(-2.0 * std::abs(u));
      return u < 0 ? -mag : mag;
    }
    case Family::UniformInterval: return d.param(0) + (d.param(1) - d.param(0)) * s.uniform();
    case Family::EmpiricalAtoms: {
      const double u = s.uniform();
      double acc = 0.0;
      for (const auto& a : d.atoms()) {
        acc += a.w;
        if (u < acc) return a.x;
      }
      return d.atoms().back().x;
    }
  }
  return 0.0;
}

SampleBatch sample(const DistributionSpec& d, std::size_t n, RandomStream& s) {
  if (n == 0) fail(ErrorCode::PreconditionViolated, "sample size must be at least 1");
  SampleBatch batch;
  batch.values.reserve(n);
  for (std::size_t i = 0; i < n; ++i) batch.values.push_back(draw(d, s));
  batch.source = d.description();
  batch.seed = s.seed();
  batch.stream = s.stream();
  return batch;
}

double evaluate(const DistributionSpec& d, EvalKind kind, double x) {
  if (kind == EvalKind::Density && d.is_discrete()) {
    fail(ErrorCode::KindUnsupported, "density requested for discrete law " + d.description());
  }
  if (kind == EvalKind::Pmf && !d.is_discrete()) {
    fail(ErrorCode::KindUnsupported, "pmf requested for continuous law " + d.description());
  }
  switch (d.family()) {
    case Family::NormalMeanZero: {
      const double v = d.param(0);
      if (kind == EvalKind::Density) return std::exp(-x * x / (2.0 * v)) / std::sqrt(2.0 * kPi * v);
      return 0.5 * std::erfc(-x / std::sqrt(2.0 * v));
    }
    case Family::Gamma: {
      const double a = d.param(0);
      if (kind == EvalKind::Density) {
        if (x < 0) return 0.0;
        if (x == 0) return a < 1 ? std::numeric_limits<double>::infinity() : (a == 1 ? 1.0 : 0.0);
        return std::exp((a - 1.0) * std::log(x) - x - std::lgamma(a));
      }
      return x <= 0 ? 0.0 : boost::math::gamma_p(a, x);
    }
    case Family::Poisson: {
      const double lam = d.param(0);
      if (kind == EvalKind::Pmf) {
        if (x < 0 || !is_integer(x)) return 0.0;
        return std::exp(x * std::log(lam) - lam - std::lgamma(x + 1.0));
      }
      if (x < 0) return 0.0;
      return boost::math::gamma_q(std::floor(x) + 1.0, lam);
    }
    case Family::Binomial: {
      const double n = d.param(0);
      const double p = d.param(1);
      const auto mass = [&](double k) {
        return std::exp(std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1) + k * std::log(p) +
                        (n - k) * std::log1p(-p));
      };
      if (kind == EvalKind::Pmf) {
        if (x < 0 || x > n || !is_integer(x)) return 0.0;
        return mass(x);
      }
      if (x < 0) return 0.0;
      if (x >= n) return 1.0;
      double acc = 0.0;
      for (double k = 0; k <= std::floor(x); k += 1.0) acc += mass(k);
      return std::min(acc, 1.0);
    }
    case Family::GegenbauerBeta: {
      const double lam = d.param(0);
      if (kind == EvalKind::Density) return gegenbauer_density(lam, x);
      if (x <= -1) return 0.0;
      if (x >= 1) return 1.0;
      return boost::math::ibeta(lam + 0.5, lam + 0.5, 0.5 * (x + 1.0));
    }
    case Family::Arcsine: {
      if (kind == EvalKind::Density) {
        if (x < -1 || x > 1) return 0.0;
        return 1.0 / (kPi * std::sqrt((1.0 - x) * (1.0 + x)));
      }
      if (x <= -1) return 0.0;
      if (x >= 1) return 1.0;
      return 0.5 + std::asin(x) / kPi;
    }
    case Family::Semicircle: {
      if (kind == EvalKind::Density) {
        if (x < -1 || x > 1) return 0.0;
        return 2.0 / kPi * std::sqrt((1.0 - x) * (1.0 + x));
      }
      if (x <= -1) return 0.0;
      if (x >= 1) return 1.0;
      return 0.5 + (x * std::sqrt((1.0 - x) * (1.0 + x)) + std::asin(x)) / kPi;
    }
    case Family::Laplace: {
      const double a = d.param(0);
      if (kind == EvalKind::Density) return std::exp(-std::abs(x) / a) / (2.0 * a);
      return x < 0 ? 0.5 * std::exp(x / a) : 1.0 - 0.5 * std::exp(-x / a);
    }
    case Family::UniformInterval: {
      const double a = d.param(0);
      const double b = d.param(1);
      if (kind == EvalKind::Density) return (x >= a && x <= b) ? 1.0 / (b - a) : 0.0;
      return std::clamp((x - a) / (b - a), 0.0, 1.0);
    }
    case Family::EmpiricalAtoms: {
      double acc = 0.0;
      for (const auto& a : d.atoms()) {
        if (kind == EvalKind::Pmf ? a.x == x : a.x <= x) acc += a.w;
      }
      return acc;
    }
  }
  return 0.0;
}

double analytic_moment(const DistributionSpec& d, int k) { return moment_impl<double>(d, k); }
Rational analytic_moment_exact(const DistributionSpec& d, int k) { return moment_impl<Rational>(d, k); }

double mean(const DistributionSpec& d) { return analytic_moment(d, 1); }
double variance(const DistributionSpec& d) {
  const double m = analytic_moment(d, 1);
  return analytic_moment(d, 2) - m * m;
}

std::pair<double, double> truncation_range(const DistributionSpec& d, double tail) {
  const bool standard = tail >= 1e-12;
  switch (d.family()) {
    case Family::NormalMeanZero: {
      const double sd = std::sqrt(d.param(0));
      const double k = standard ? 12.0 : 40.0;
      return {-k * sd, k * sd};
    }
    case Family::Gamma: {
      const double a = d.param(0);
      const double sds = standard ? 12.0 : 40.0;
      const double by_sd = a + sds * std::sqrt(a);
      const double by_tail = boost::math::gamma_q_inv(a, std::max(tail, 1e-300));
      return {0.0, std::max(by_sd, by_tail)};
    }
    case Family::Laplace: {
      const double t = d.param(0) * std::log(1.0 / std::max(tail, 1e-300));
      return {-t, t};
    }
    case Family::Poisson: {
      const auto atoms = discrete_atoms(d, tail);
      return {0.0, atoms.back().x};
    }
    default: {
      const auto s = d.support();
      return {s.lo, s.hi};
    }
  }
}

std::vector<Atom> discrete_atoms(const DistributionSpec& d, double tail) {
  switch (d.family()) {
    case Family::Poisson: {
      const double lam = d.param(0);
      std::vector<Atom> out;
      for (long k = 0;; ++k) {
        const double w = pmf(d, static_cast<double>(k));
        out.push_back({static_cast<double>(k), w});
        // remaining mass P(X > k) evaluated directly to avoid cancellation
        if (static_cast<double>(k) > lam && boost::math::gamma_p(static_cast<double>(k + 1), lam) < tail) break;
      }
      return out;
    }
    case Family::Binomial: {
      std::vector<Atom> out;
      for (long k = 0; k <= static_cast<long>(d.param(0)); ++k) {
        out.push_back({static_cast<double>(k), pmf(d, static_cast<double>(k))});
      }
      return out;
    }
    case Family::EmpiricalAtoms: return d.atoms();
    default: fail(ErrorCode::KindUnsupported, "atoms requested for continuous law " + d.description());
  }
}

double expect(const DistributionSpec& d, const std::function<double(double)>& f, std::span<const double> breaks) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return expect_between(d, f, -inf, inf, breaks);
}

double expect_between(const DistributionSpec& d, const std::function<double(double)>& f, double lo, double hi,
                      std::span<const double> breaks) {
  if (d.is_discrete()) {
    double acc = 0.0;
    for (const auto& a : discrete_atoms(d, 1e-40)) {
      if (a.x > lo && a.x <= hi) acc += a.w * f(a.x);
    }
    return acc;
  }
  const auto [rlo, rhi] = truncation_range(d, 1e-40);
  return integrate_pieces(d, f, std::max(lo, rlo), std::min(hi, rhi), breaks);
}

double ks_statistic(const std::function<double(double)>& exact_cdf, std::span<const double> sample) {
  std::vector<double> xs(sample.begin(), sample.end());
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = exact_cdf(xs[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return std::clamp(d, 0.0, 1.0);
}

double ks_statistic(std::span<const double> a, std::span<const double> b) {
  std::vector<double> xa(a.begin(), a.end());
  std::vector<double> xb(b.begin(), b.end());
  std::sort(xa.begin(), xa.end());
  std::sort(xb.begin(), xb.end());
  const double na = static_cast<double>(xa.size());
  const double nb = static_cast<double>(xb.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < xa.size() && j < xb.size()) {
    const double v = std::min(xa[i], xb[j]);
    while (i < xa.size() && xa[i] == v) ++i;
    while (j < xb.size() && xb[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_critical_one_sample(std::size_t n) { return kKsCoefficient1pct / std::sqrt(static_cast<double>(n)); }

double ks_critical_two_sample(std::size_t n1, std::size_t n2) {
  const double a = static_cast<double>(n1);
  const double b = static_cast<double>(n2);
  return kKsCoefficient1pct * std::sqrt((a + b) / (a * b));
}

void write_sample_csv(std::ostream& out, const SampleBatch& batch) {
  std::string source = batch.source;
  out << "# " << source << " seed=" << batch.seed << " stream=" << batch.stream << '\n';
  for (double v : batch.values) out << format_double(v) << '\n';
}

SampleBatch read_sample_csv(std::istream& in) {
  SampleBatch batch;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) {
    fail(ErrorCode::IoFailure, "sample CSV is missing its '# family=...' header");
  }
  const auto seed_pos = line.rfind(" seed=");
  const auto stream_pos = line.rfind(" stream=");
  if (seed_pos == std::string::npos || stream_pos == std::string::npos || stream_pos < seed_pos) {
    fail(ErrorCode::IoFailure, "sample CSV header lacks seed/stream fields");
  }
  batch.source = line.substr(2, seed_pos - 2);
  batch.seed = std::stoull(line.substr(seed_pos + 6, stream_pos - seed_pos - 6));
  batch.stream = static_cast<std::uint32_t>(std::stoul(line.substr(stream_pos + 8)));
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double v = 0.0;
    const auto res = std::from_chars(line.data(), line.data() + line.size(), v);
    if (res.ec != std::errc()) fail(ErrorCode::IoFailure, "bad sample value '" + line + "'");
    batch.values.push_back(v);
  }
  return batch;
}

std::optional<double> symmetric_beta_lambda(const DistributionSpec& d) {
  switch (d.family()) {
    case Family::GegenbauerBeta: return d.param(0);
    case Family::Arcsine: return 0.0;
    case Family::Semicircle: return 1.0;
    default: return std::nullopt;
  }
}

double symmetric_beta_constant(double lambda) { return gegenbauer_constant(lambda); }

}  // namespace steinbias
