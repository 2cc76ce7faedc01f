#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "steinbias/random_stream.hpp"
#include "steinbias/rational.hpp"

namespace steinbias {

enum class Family {
  NormalMeanZero,   // params: {variance}
  Gamma,            // params: {shape}, unit scale
  Poisson,          // params: {rate}
  Binomial,         // params: {trials, p}
  GegenbauerBeta,   // params: {lambda}, density prop. to (1-x^2)^(lambda-1/2) on [-1,1]
  Laplace,          // params: {scale}
  UniformInterval,  // params: {a, b}
  Arcsine,          // params: {}
  Semicircle,       // params: {}
  EmpiricalAtoms,   // params: {x1, w1, x2, w2, ...}
};

std::string_view family_name(Family f);
Family parse_family(std::string_view name);

enum class SupportKind { RealLine, HalfLine, Interval, FiniteLattice, NaturalNumbers, Atoms };

struct Support {
  SupportKind kind;
  double lo;
  double hi;

  bool contains(double x) const;
};

struct Atom {
  double x;
  double w;
};

// Validated, immutable description of one distribution law.
class DistributionSpec {
 public:
  Family family() const noexcept { return family_; }
  const std::vector<double>& params() const noexcept { return params_; }
  double param(std::size_t i) const { return params_.at(i); }

  Support support() const;
  bool is_discrete() const noexcept;
  // Integer-valued (Poisson, Binomial, atoms on integers).
  bool is_lattice() const noexcept;
  // Normalized atoms, for EmpiricalAtoms only.
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }

  // "family=<name> params=<p1;p2;...>"
  std::string description() const;

  friend bool operator==(const DistributionSpec& a, const DistributionSpec& b) {
    return a.family_ == b.family_ && a.params_ == b.params_;
  }

 private:
  friend DistributionSpec make_distribution(Family, std::vector<double>);
  DistributionSpec(Family f, std::vector<double> params, std::vector<Atom> atoms)
      : family_(f), params_(std::move(params)), atoms_(std::move(atoms)) {}

  Family family_;
  std::vector<double> params_;
  std::vector<Atom> atoms_;
};

// Throws ParameterOutOfRange naming the offending parameter.
DistributionSpec make_distribution(Family family, std::vector<double> params);
DistributionSpec make_atoms(std::span<const double> points, std::span<const double> weights);

struct SampleBatch {
  std::vector<double> values;
  std::string source;
  std::uint64_t seed = 0;
  std::uint32_t stream = 0;
};

double draw(const DistributionSpec& dist, RandomStream& stream);
SampleBatch sample(const DistributionSpec& dist, std::size_t n, RandomStream& stream);

enum class EvalKind { Density, Pmf, Cdf };

double evaluate(const DistributionSpec& dist, EvalKind kind, double x);
inline double density(const DistributionSpec& d, double x) { return evaluate(d, EvalKind::Density, x); }
inline double pmf(const DistributionSpec& d, double x) { return evaluate(d, EvalKind::Pmf, x); }
inline double cdf(const DistributionSpec& d, double x) { return evaluate(d, EvalKind::Cdf, x); }

double analytic_moment(const DistributionSpec& dist, int k);
// Exact moment; parameters are read through to_rational.
Rational analytic_moment_exact(const DistributionSpec& dist, int k);

double mean(const DistributionSpec& dist);
double variance(const DistributionSpec& dist);

// Interval outside of which the law has mass below `tail` (bounded supports
// are returned as is). Normal and Gamma use +-12 standard deviations for the
// default tail of 1e-12.
std::pair<double, double> truncation_range(const DistributionSpec& dist, double tail = 1e-12);

// Atoms of a discrete law; Poisson is cut where the remaining mass is below
// `tail`.
std::vector<Atom> discrete_atoms(const DistributionSpec& dist, double tail = 1e-12);

// E f(X) by summation (discrete) or piecewise tanh-sinh quadrature
// (continuous). `breaks` lists points where f is not smooth.
double expect(const DistributionSpec& dist, const std::function<double(double)>& f,
              std::span<const double> breaks = {});

// Integral of f * density over (lo, hi) for continuous laws; sum over atoms
// in (lo, hi] for discrete ones.
double expect_between(const DistributionSpec& dist, const std::function<double(double)>& f, double lo,
                      double hi, std::span<const double> breaks = {});

// Laws on [-1,1] with density c (1-x^2)^(lambda-1/2) (Gegenbauer, arcsine,
// semicircle) report their lambda here; c = symmetric_beta_constant(lambda).
std::optional<double> symmetric_beta_lambda(const DistributionSpec& dist);
double symmetric_beta_constant(double lambda);

// Kolmogorov-Smirnov statistics.
double ks_statistic(const std::function<double(double)>& exact_cdf, std::span<const double> sample);
double ks_statistic(std::span<const double> a, std::span<const double> b);

// Asymptotic 1% critical values (c = 1.628).
inline constexpr double kKsCoefficient1pct = 1.628;
double ks_critical_one_sample(std::size_t n);
double ks_critical_two_sample(std::size_t n1, std::size_t n2);

// CSV: header "# family=<name> params=<...> seed=<u64> stream=<u32>" then
// one value per line.
void write_sample_csv(std::ostream& out, const SampleBatch& batch);
SampleBatch read_sample_csv(std::istream& in);

}  // namespace steinbias
