#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "steinbias/distributions.hpp"
#include "steinbias/orthopoly.hpp"
#include "steinbias/polynomial.hpp"

namespace steinbias {

// Piecewise constant P: levels[i] on the open interval between breaks[i-1]
// and breaks[i]; at_breaks[i] is the value at breaks[i].
struct SignFunction {
  std::vector<double> breaks;
  std::vector<int> levels;
  std::vector<int> at_breaks;
};

// An arbitrary measurable P. The caller declares the intervals where its sign
// changes; these are checked, never inferred.
struct CallableFunction {
  std::function<double(double)> f;
  std::vector<std::pair<double, double>> sign_change_intervals;
  std::string label = "callable";
};

using BiasRepresentation = std::variant<Poly, SignFunction, CallableFunction>;

SignFunction sign_function(std::vector<double> breaks, std::vector<int> levels, std::vector<int> at_breaks = {});
// P(x) = sign(x).
SignFunction sign_of_x();

class BiasingFunction {
 public:
  double operator()(double x) const;

  int order() const { return static_cast<int>(roots_.size()); }
  const std::vector<double>& roots() const { return roots_; }
  // Interval of admissible representatives for each root (degenerate unless
  // P vanishes across a gap).
  const std::vector<std::pair<double, double>>& root_intervals() const { return root_intervals_; }
  const Poly& q() const { return q_; }
  const BiasRepresentation& representation() const { return rep_; }
  // Points where P may be discontinuous or have a kink; handed to quadrature.
  std::vector<double> breakpoints() const;
  std::string description() const;

  // Same P with other representatives inside the root intervals.
  BiasingFunction with_roots(std::vector<double> roots) const;

 private:
  friend BiasingFunction locate_sign_structure(const BiasRepresentation& rep);
  BiasRepresentation rep_;
  std::vector<double> roots_;
  std::vector<std::pair<double, double>> root_intervals_;
  Poly q_;
};

// Finds the sign-change representatives of P; no distribution involved.
BiasingFunction locate_sign_structure(const BiasRepresentation& rep);

struct ValidatedBias {
  BiasingFunction function;
  double alpha;
  // (1/m!) E X^k P(X) for k = 0..m.
  std::vector<double> moments;
};

// Checks (1/m!) E X^k P(X) = alpha delta_{k,m}, alpha > 0, that P has exactly
// m sign changes and that Q P >= 0. Orthogonality is judged at 1e-8 relative
// to max(1, |alpha|).
ValidatedBias make_biasing_function(const DistributionSpec& dist, const BiasRepresentation& rep, int m);
inline constexpr double kOrthogonalityTolerance = 1e-8;

// How Y (with law Q P dmu_X / (m! alpha)) is drawn for continuous X.
enum class YSamplerMode { Auto, Rejection, Grid };

// Auto uses rejection from mu_X while the envelope constant stays below this.
inline constexpr double kRejectionMaxEnvelope = 64.0;

class TransformSampler {
 public:
  TransformSampler(DistributionSpec dist, BiasingFunction bf, double alpha, YSamplerMode mode = YSamplerMode::Auto);

  double draw(RandomStream& stream) const;
  double draw_y(RandomStream& stream) const;
  SampleBatch sample(std::size_t n, RandomStream& stream) const;

  // Rejection, Grid, or (for discrete X) exact reweighting.
  std::string y_method() const;
  double envelope() const { return envelope_; }
  const DistributionSpec& base() const { return dist_; }
  const BiasingFunction& function() const { return bf_; }
  double alpha() const { return alpha_; }

 private:
  double tilt(double y) const;
  double draw_grid(RandomStream& stream) const;

  DistributionSpec dist_;
  BiasingFunction bf_;
  double alpha_;
  double m_factorial_;
  enum class Method { Atoms, Rejection, Grid } method_;
  double envelope_ = 0.0;
  std::vector<double> atom_points_;
  std::vector<double> cumulative_;
  // Grid cells are uniform in u with x = to_x(u).
  double u_lo_ = 0.0;
  double u_width_ = 0.0;
  std::function<double(double)> to_x_;
};

// Maps U_1..U_m and Y to X^(P) given the roots r_1..r_m.
double combine_transform(double y, std::span<const double> roots, std::span<const double> u);

SampleBatch sample_transformed(const DistributionSpec& dist, const BiasingFunction& bf, double alpha, std::size_t n,
                               RandomStream& stream, YSamplerMode mode = YSamplerMode::Auto);

// Density of X^(P) when m = 1: E[P(X); X > x] / alpha.
double density_order_one(const DistributionSpec& dist, const BiasingFunction& bf, double alpha, double x);

struct DiscretePmf {
  std::vector<std::int64_t> points;
  std::vector<double> probs;
  double at(std::int64_t k) const;
};

// Solves (-1)^m nabla^m q = p P / alpha on the lattice of dist.
DiscretePmf discrete_transform_pmf(const DistributionSpec& dist, const BiasingFunction& bf, int m, double alpha);
DiscretePmf pmf_of(const DistributionSpec& lattice_dist, double tail = 1e-40);
double total_variation(const DiscretePmf& a, const DiscretePmf& b);

// Transformed reference law of a classical system.
DistributionSpec closed_form_transform(const PolySystemId& sys, int m);

enum class ClassicBias { Size, Zero };
SampleBatch classic_bias(const DistributionSpec& dist, ClassicBias kind, std::size_t n, RandomStream& stream);

// P^m of a classical system as a validated biasing function for its
// reference law, with alpha taken from the closed form.
ValidatedBias system_bias(const PolySystemId& sys, int m);

struct TransformResult {
  std::optional<DistributionSpec> closed_form;
  std::shared_ptr<const TransformSampler> sampler;
  double alpha;
  int m;
  std::string source;

  double draw(RandomStream& stream) const;
  SampleBatch sample(std::size_t n, RandomStream& stream) const;
};

TransformResult transform(const DistributionSpec& dist, const ValidatedBias& vb,
                          YSamplerMode mode = YSamplerMode::Auto);
TransformResult transform_reference(const PolySystemId& sys, int m);

}  // namespace steinbias
