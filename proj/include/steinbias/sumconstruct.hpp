#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "steinbias/biastransform.hpp"
#include "steinbias/distributions.hpp"
#include "steinbias/orthopoly.hpp"
#include "steinbias/rational.hpp"

namespace steinbias {

using MultiIndex = std::vector<int>;

inline constexpr double kMaxCompositions = 1e7;

// All compositions of m into n nonnegative parts, colexicographic: the last
// entry varies slowest. (2,2) gives (2,0), (1,1), (0,2).
std::vector<MultiIndex> enumerate_multi_indices(int n, int m);

struct IndexDistribution {
  PolyFamily family;
  std::vector<double> lambdas;
  double p;
  int m;
  std::vector<MultiIndex> compositions;
  std::vector<double> probs;
  // Present when every lambda (and p) is a small rational.
  std::optional<std::vector<Rational>> exact;
  // Multinomial / hypergeometric closed form, composition by composition.
  std::vector<double> closed_form;
  bool closed_form_agrees = false;

  std::size_t draw(RandomStream& stream) const;
};

IndexDistribution index_distribution(PolyFamily family, const std::vector<double>& lambdas, int m, double p = 0.5);

// Columns: composition,probability,exact
void write_index_csv(std::ostream& out, const IndexDistribution& dist);

struct AlphaIdentityResidual {
  double linear;   // |alpha - sum c alpha_m| / |alpha|
  double squared;  // |alpha - sum c^2 alpha_m / multinomial| / |alpha|
  bool exact;
};

AlphaIdentityResidual verify_alpha_identity(PolyFamily family, const std::vector<double>& lambdas, int m,
                                            double p = 0.5);

// Draws of a lattice pmf.
class PmfSampler {
 public:
  explicit PmfSampler(DiscretePmf pmf);
  double draw(RandomStream& stream) const;

 private:
  DiscretePmf pmf_;
  std::vector<double> cumulative_;
};

struct Summand {
  DistributionSpec dist;
  double lambda;
  // transforms[k] draws (X)^(k); k = 0 draws X itself.
  std::vector<std::function<double(RandomStream&)>> transforms;
};

struct SummandSet {
  PolyFamily family;
  double p;
  int m;
  std::vector<Summand> summands;

  std::vector<double> lambdas() const;
  double total_lambda() const;
};

// Checks E X_i^j = E Z_{lambda_i}^j for j <= 2m (analytically) and wires up
// per-order transform samplers: the closed form for reference laws, the
// discrete solver for difference families, the general construction
// otherwise. Throws MembershipViolated naming the summand.
SummandSet make_summand_set(PolyFamily family, const std::vector<DistributionSpec>& dists,
                            const std::vector<double>& lambdas, int m, double p = 0.5);

// Gauss quadrature law for the system: m+1 atoms at the roots of P^{m+1}.
// Its moments agree with Z_lambda up to order 2m+1, so it lies in M^m.
DistributionSpec gauss_atoms(const PolySystemId& sys, int m);

// Draws of sum_i (X_i)^(I_i) with I from the index law. The index draw and
// each summand use their own child streams.
SampleBatch sample_sum_transformed(const SummandSet& set, std::size_t n, RandomStream& stream);
std::vector<std::size_t> sample_indices(const IndexDistribution& dist, std::size_t n, RandomStream& stream);

// Law of W = sum of the summands' distributions when it is known exactly:
// the reference law for reference summands, the convolution for atoms.
std::optional<DistributionSpec> aggregate_law(const SummandSet& set);

// Independent draws of the W-P^m transform computed directly from the law of W.
SampleBatch sample_direct_transform(const SummandSet& set, std::size_t n, RandomStream& stream);

struct MomentRow {
  int order;
  double sample;
  double analytic;
  double stderr_;
  double z;
  bool pass;
};

struct IteratedBiasReport {
  PolySystemId system;
  int m;
  int k;
  int j;
  double mu;
  std::vector<MomentRow> rows;
  bool moments_match;
  // Whether X^(k) may be transformed again at order j.
  bool eligible;
};

// mu(lambda, k) for the family's shift rule.
double shifted_lambda(const PolySystemId& sys, int k);

IteratedBiasReport iterated_bias_check(const PolySystemId& sys, int m, int k, int j, std::size_t n,
                                       RandomStream& stream);

}  // namespace steinbias
