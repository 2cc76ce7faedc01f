#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "steinbias/biastransform.hpp"
#include "steinbias/distributions.hpp"
#include "steinbias/orthopoly.hpp"

namespace steinbias {

inline constexpr int kMaxDerivativeOrder = 8;
inline constexpr double kZThreshold = 4.0;

enum class Growth { Bounded, Polynomial };

class TestFunction {
 public:
  TestFunction(std::string id, std::function<double(double)> value, std::function<double(int, double)> derivative,
               Growth growth, int degree = 0);

  const std::string& id() const { return id_; }
  Growth growth() const { return growth_; }
  int degree() const { return degree_; }
  bool has_derivatives() const { return static_cast<bool>(derivative_); }

  double operator()(double x) const { return value_(x); }
  // Analytic q-th derivative, q <= 8.
  double derivative(int q, double x) const;
  // Delta^q F(x) = sum_i C(q,i) (-1)^(q-i) F(x+i).
  double forward_difference(int q, double x) const;

 private:
  std::string id_;
  std::function<double(double)> value_;
  std::function<double(int, double)> derivative_;
  Growth growth_;
  int degree_;
};

TestFunction monomial(int j);
TestFunction gaussian_bump();  // exp(-x^2)
TestFunction sine();
TestFunction cosine();
// exp(-1/(1-(x/2)^2)) on |x| < 2, zero outside.
TestFunction smooth_bump();
// 1{x = k}; lattice only.
TestFunction indicator(long k);

// x^0..x^5, exp(-x^2), sin, cos, bump; plus indicators 0..5 on lattices.
std::vector<TestFunction> default_bank(bool lattice);

// Largest |F^(q) - five-point central difference of F^(q-1)| / max(1, |F^(q)|) on the
// grid, for q = 1..max_order.
double derivative_self_test(const TestFunction& f, const std::vector<double>& grid, int max_order = 8);

struct MCEstimate {
  double mean;
  double stderr_;
  std::size_t n;
  std::uint64_t seed;
  std::uint32_t stream;
};

MCEstimate mc_expectation(const std::function<double(double)>& f, const SampleBatch& samples);

struct VerificationRow {
  std::string check_id;
  std::string family;
  double lambda;
  double p;
  int m;
  std::string function_id;
  double lhs;
  double rhs;
  double stderr_lhs;
  double stderr_rhs;
  double z;
  bool pass;
};

struct VerificationReport {
  std::vector<VerificationRow> rows;
  std::string config;

  bool pass() const;
  double pass_fraction() const;
};

// Columns: check_id,family,lambda,p,m,function_id,lhs,rhs,stderr_lhs,stderr_rhs,z,pass
void write_verification_csv(std::ostream& out, const VerificationReport& report);

// Exact comparisons have no sampling error; they are scored as
// z = diff / (tol / 4), so |z| <= 4 iff |diff| <= tol.
inline constexpr double kExactTolerance = 1e-9;
double exact_z(double lhs, double rhs);

// E P^m(X) F(X) = alpha E F^(m)(X^(m)) for each F in the bank. Continuous
// laws: lhs over X samples, rhs over general-construction samples. Lattice
// laws: exact sums over the law and the solver's pmf (differences for the
// Charlier/Krawtchouk systems).
VerificationReport verify_characterization(const DistributionSpec& dist, const PolySystemId& sys, int m,
                                           const std::vector<TestFunction>& bank, std::size_t n,
                                           RandomStream& stream);

enum class SteinOperator { Classical, H1, H2, Gamma, BinomialEhm };
std::string_view to_string(SteinOperator op);
SteinOperator parse_stein_operator(std::string_view name);

struct OperatorParams {
  int m = 1;
  double lambda = 1.0;
  double p = 0.5;
};

// classical: f' - x f;  h1: f' H^{m-1} - H^m f;  h2: f^(m) - H^m f (H for
// lambda = 1);  gamma: (x - lambda) f - x f';  binomial: p (lambda - x) f(x+1) - q x f(x).
double stein_operator(SteinOperator op, const TestFunction& f, double x, const OperatorParams& params = {});
MCEstimate stein_residual(SteinOperator op, const TestFunction& f, const SampleBatch& samples,
                          const OperatorParams& params = {});
double stein_residual_exact(SteinOperator op, const TestFunction& f, const DistributionSpec& lattice_dist,
                            const OperatorParams& params = {});

// N h = E h(Z), Z standard normal.
double normal_expectation(const std::function<double(double)>& h);

struct MomentCheck {
  int order;
  double sample;
  double analytic;
  double stderr_;
  double z;
  bool pass;
};

std::vector<MomentCheck> moment_checks(const std::vector<double>& xs, const DistributionSpec& target, int max_order);

struct EquivalenceReport {
  double lambda;
  double ks;
  double ks_critical;
  std::vector<MomentCheck> transform_moments;
  std::vector<MomentCheck> size_bias_moments;
  bool pass;
};

// Order-1 Laguerre transform of Gamma(lambda) against its size bias.
EquivalenceReport gamma_sizebias_equivalence(double lambda, std::size_t n, RandomStream& stream);

struct FixedPointReport {
  std::string metric;  // "ks" or "tv"
  double value;
  double threshold;
  bool pass;
};

// dist against its own transform: KS for continuous laws, exact TV on lattices
// when the system uses differences.
FixedPointReport fixed_point_test(const DistributionSpec& dist, const PolySystemId& sys, int m, std::size_t n,
                                  RandomStream& stream);
FixedPointReport fixed_point_test(const DistributionSpec& dist, const BiasRepresentation& rep, int m, std::size_t n,
                                  RandomStream& stream);

}  // namespace steinbias
