#include "steinbias/sumconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <ostream>

#include "steinbias/errors.hpp"

namespace steinbias {

namespace {

void compositions(int n, int m, std::vector<MultiIndex>& out) {
  if (n == 1) {
    out.push_back({m});
    return;
  }
  for (int last = 0; last <= m; ++last) {
    std::vector<MultiIndex> head;
    compositions(n - 1, m - last, head);
    for (auto& h : head) {
      h.push_back(last);
      out.push_back(std::move(h));
    }
  }
}

void require_closed(PolyFamily family) {
  if (!closed_under_addition(family)) {
    fail(ErrorCode::FamilyNotClosed,
         std::string(poly_family_name(family)) + " laws are not closed under independent addition");
  }
}

template <class T>
T multinomial(const MultiIndex& idx) {
  int total = 0;
  T denom(1);
  for (int v : idx) {
    total += v;
    denom *= factorial<T>(v);
  }
  return factorial<T>(total) / denom;
}

template <class T>
T product_alpha(PolyFamily f, const std::vector<T>& lambdas, const T& p, const MultiIndex& idx) {
  T out(1);
  for (std::size_t i = 0; i < idx.size(); ++i) out *= alpha_closed(f, lambdas[i], p, idx[i]);
  return out;
}

template <class T>
T closed_index_prob(PolyFamily f, const std::vector<T>& lambdas, const T& total, const MultiIndex& idx) {
  int m = 0;
  for (int v : idx) m += v;
  switch (f) {
    case PolyFamily::Hermite:
    case PolyFamily::Charlier: {
      T out = multinomial<T>(idx);
      for (std::size_t i = 0; i < idx.size(); ++i) out *= ipow(T(lambdas[i] / total), idx[i]);
      return out;
    }
    case PolyFamily::Laguerre: {
      T out(1);
      for (std::size_t i = 0; i < idx.size(); ++i) out *= binomial(T(lambdas[i] + T(idx[i] - 1)), idx[i]);
      return out / binomial(T(total + T(m - 1)), m);
    }
    case PolyFamily::Krawtchouk: {
      T out(1);
      for (std::size_t i = 0; i < idx.size(); ++i) out *= binomial(lambdas[i], idx[i]);
      return out / binomial(total, m);
    }
    case PolyFamily::Gegenbauer: break;
  }
  fail(ErrorCode::FamilyNotClosed, "no closed index law");
}

template <class T>
struct IndexLaw {
  std::vector<T> general;
  std::vector<T> closed;
};

template <class T>
IndexLaw<T> index_law(PolyFamily f, const std::vector<T>& lambdas, const T& p, int m,
                      const std::vector<MultiIndex>& comps) {
  T total(0);
  for (const auto& l : lambdas) total += l;
  const T alpha = alpha_closed(f, total, p, m);
  if (alpha == T(0)) fail(ErrorCode::DegreeTooLarge, "alpha of the aggregate law vanishes");
  IndexLaw<T> out;
  for (const auto& c : comps) {
    out.general.push_back(multinomial<T>(c) * product_alpha(f, lambdas, p, c) / alpha);
    out.closed.push_back(closed_index_prob(f, lambdas, total, c));
  }
  return out;
}

template <class T>
std::pair<T, T> alpha_identity_sums(PolyFamily f, const std::vector<T>& lambdas, const T& p,
                                    const std::vector<MultiIndex>& comps) {
  // The weights c are the multinomial coefficients; the squared identity
  // divides c^2 by the multinomial again.
  T linear(0), squared(0);
  for (const auto& idx : comps) {
    const T c = multinomial<T>(idx);
    const T a = product_alpha(f, lambdas, p, idx);
    linear += c * a;
    squared += c * c / multinomial<T>(idx) * a;
  }
  return {linear, squared};
}

bool all_small_rational(const std::vector<double>& xs, double p) {
  return has_small_rational(p) && std::all_of(xs.begin(), xs.end(), [](double x) { return has_small_rational(x); });
}

std::vector<Rational> to_rationals(const std::vector<double>& xs) {
  std::vector<Rational> out;
  for (double x : xs) out.push_back(to_rational(x));
  return out;
}

std::size_t draw_cumulative(const std::vector<double>& cumulative, RandomStream& s) {
  const double v = s.uniform() * cumulative.back();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), v);
  return std::min(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
}

std::function<double(RandomStream&)> law_drawer(DistributionSpec law) {
  return [law = std::move(law)](RandomStream& s) { return draw(law, s); };
}

std::function<double(RandomStream&)> general_drawer(const DistributionSpec& dist, const PolySystemId& sys, int k) {
  if (uses_differences(sys.family)) {
    if (!dist.is_lattice()) {
      fail(ErrorCode::PreconditionViolated,
           "difference families need integer-valued summands; got " + dist.description());
    }
    const auto bf = locate_sign_structure(poly_coeffs(sys, k));
    auto sampler =
        std::make_shared<const PmfSampler>(discrete_transform_pmf(dist, bf, k, alpha_closed_form(sys, k).value));
    return [sampler](RandomStream& s) { return sampler->draw(s); };
  }
  const auto vb = make_biasing_function(dist, poly_coeffs(sys, k), k);
  auto sampler = std::make_shared<const TransformSampler>(dist, vb.function, vb.alpha);
  return [sampler](RandomStream& s) { return sampler->draw(s); };
}

}  // namespace

std::vector<MultiIndex> enumerate_multi_indices(int n, int m) {
  if (n < 1 || m < 0) fail(ErrorCode::PreconditionViolated, "need n >= 1 and m >= 0");
  long double count = 1.0L;
  for (int i = 1; i <= m; ++i) count = count * (n - 1 + i) / i;
  if (count > kMaxCompositions) {
    fail(ErrorCode::SizeOverflow, std::to_string(static_cast<double>(count)) + " compositions exceed 1e7");
  }
  std::vector<MultiIndex> out;
  out.reserve(static_cast<std::size_t>(count));
  compositions(n, m, out);
  return out;
}

std::size_t IndexDistribution::draw(RandomStream& stream) const {
  std::vector<double> cumulative(probs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) cumulative[i] = acc += probs[i];
  return draw_cumulative(cumulative, stream);
}

IndexDistribution index_distribution(PolyFamily family, const std::vector<double>& lambdas, int m, double p) {
  require_closed(family);
  if (lambdas.empty()) fail(ErrorCode::PreconditionViolated, "need at least one summand");
  for (double l : lambdas) make_system(family, l, p);
  IndexDistribution out{family, lambdas, family == PolyFamily::Krawtchouk ? p : 0.5, m, {}, {}, {}, {}, false};
  out.compositions = enumerate_multi_indices(static_cast<int>(lambdas.size()), m);
  if (all_small_rational(lambdas, out.p)) {
    const auto law = index_law<Rational>(family, to_rationals(lambdas), to_rational(out.p), m, out.compositions);
    out.exact = law.general;
    out.closed_form_agrees = law.general == law.closed;
    for (const auto& v : law.general) out.probs.push_back(to_double(v));
    for (const auto& v : law.closed) out.closed_form.push_back(to_double(v));
  } else {
    const auto law = index_law<double>(family, lambdas, out.p, m, out.compositions);
    out.probs = law.general;
    out.closed_form = law.closed;
    out.closed_form_agrees = true;
    for (std::size_t i = 0; i < law.general.size(); ++i) {
      if (std::abs(law.general[i] - law.closed[i]) > 1e-12 * std::max(1e-300, std::abs(law.general[i]))) {
        out.closed_form_agrees = false;
      }
    }
  }
  return out;
}

void write_index_csv(std::ostream& out, const IndexDistribution& dist) {
  out << "composition,probability,exact\n";
  const auto old = out.precision(17);
  for (std::size_t i = 0; i < dist.compositions.size(); ++i) {
    const auto& c = dist.compositions[i];
    for (std::size_t j = 0; j < c.size(); ++j) out << (j ? ";" : "") << c[j];
    out << ',' << dist.probs[i] << ',';
    if (dist.exact) out << to_string((*dist.exact)[i]);
    out << '\n';
  }
  out.precision(old);
}

AlphaIdentityResidual verify_alpha_identity(PolyFamily family, const std::vector<double>& lambdas, int m, double p) {
  require_closed(family);
  if (lambdas.empty()) fail(ErrorCode::PreconditionViolated, "need at least one summand");
  for (double l : lambdas) make_system(family, l, p);
  const auto comps = enumerate_multi_indices(static_cast<int>(lambdas.size()), m);
  double total = 0.0;
  for (double l : lambdas) total += l;
  if (all_small_rational(lambdas, p)) {
    const auto lam = to_rationals(lambdas);
    Rational lam_total(0);
    for (const auto& l : lam) lam_total += l;
    const Rational pr = to_rational(p);
    const Rational alpha = alpha_closed(family, lam_total, pr, m);
    const auto [lin, sq] = alpha_identity_sums(family, lam, pr, comps);
    const auto rel = [&](const Rational& v) {
      if (alpha == 0) return v == 0 ? 0.0 : 1.0;
      return std::abs(to_double(Rational((alpha - v) / alpha)));
    };
    return {rel(lin), rel(sq), true};
  }
  const double alpha = alpha_closed(family, total, p, m);
  const auto [lin, sq] = alpha_identity_sums(family, lambdas, p, comps);
  const double scale = alpha == 0.0 ? 1.0 : std::abs(alpha);
  return {std::abs(alpha - lin) / scale, std::abs(alpha - sq) / scale, false};
}

PmfSampler::PmfSampler(DiscretePmf pmf) : pmf_(std::move(pmf)) {
  if (pmf_.probs.empty()) fail(ErrorCode::PreconditionViolated, "empty pmf");
  double acc = 0.0;
  for (double v : pmf_.probs) cumulative_.push_back(acc += v);
}

double PmfSampler::draw(RandomStream& stream) const {
  return static_cast<double>(pmf_.points[draw_cumulative(cumulative_, stream)]);
}

std::vector<double> SummandSet::lambdas() const {
  std::vector<double> out;
  for (const auto& s : summands) out.push_back(s.lambda);
  return out;
}

double SummandSet::total_lambda() const {
  double t = 0.0;
  for (const auto& s : summands) t += s.lambda;
  return t;
}

SummandSet make_summand_set(PolyFamily family, const std::vector<DistributionSpec>& dists,
                            const std::vector<double>& lambdas, int m, double p) {
  require_closed(family);
  if (dists.empty() || dists.size() != lambdas.size()) {
    fail(ErrorCode::PreconditionViolated, "need one lambda per summand");
  }
  if (m < 0) fail(ErrorCode::PreconditionViolated, "order must be nonnegative");
  SummandSet set{family, family == PolyFamily::Krawtchouk ? p : 0.5, m, {}};
  for (std::size_t i = 0; i < dists.size(); ++i) {
    const PolySystemId sys = make_system(family, lambdas[i], p);
    const DistributionSpec ref = reference_distribution(sys);
    const auto& d = dists[i];
    for (int j = 1; j <= 2 * m; ++j) {
      const double a = analytic_moment(d, j);
      const double b = analytic_moment(ref, j);
      if (std::abs(a - b) > 1e-9 * std::max(1.0, std::abs(b))) {
        fail(ErrorCode::MembershipViolated,
             "summand " + std::to_string(i) + " (" + d.description() + "): moment " + std::to_string(j) + " is " +
                 std::to_string(a) + ", expected " + std::to_string(b),
             static_cast<int>(i));
      }
    }
    Summand s{d, lambdas[i], {}};
    s.transforms.push_back(law_drawer(d));
    for (int k = 1; k <= m; ++k) {
      if (family == PolyFamily::Krawtchouk && k > lambdas[i]) {
        // Never selected: the index law gives such compositions zero weight.
        s.transforms.push_back([](RandomStream&) -> double {
          fail(ErrorCode::DegreeTooLarge, "order exceeds the summand's lambda");
        });
      } else if (d == ref) {
        s.transforms.push_back(law_drawer(closed_form_transform(sys, k)));
      } else {
        s.transforms.push_back(general_drawer(d, sys, k));
      }
    }
    set.summands.push_back(std::move(s));
  }
  return set;
}

DistributionSpec gauss_atoms(const PolySystemId& sys, int m) {
  const Poly next = poly_coeffs(sys, m + 1);
  const Poly cur = poly_coeffs(sys, m);
  const Poly dnext = next.derivative();
  const auto nodes = sign_change_roots(next);
  if (static_cast<int>(nodes.size()) != m + 1) {
    fail(ErrorCode::SingularMomentMatrix, "P^{m+1} does not have m+1 simple real roots");
  }
  const double norm = std::tgamma(m + 1.0) * alpha_closed_form(sys, m).value;
  std::vector<double> weights;
  for (double x : nodes) weights.push_back(norm / (cur(x) * dnext(x)));
  return make_atoms(nodes, weights);
}

std::vector<std::size_t> sample_indices(const IndexDistribution& dist, std::size_t n, RandomStream& stream) {
  RandomStream idx = stream.split(0);
  std::vector<double> cumulative;
  double acc = 0.0;
  for (double v : dist.probs) cumulative.push_back(acc += v);
  std::vector<std::size_t> out(n);
  for (auto& v : out) v = draw_cumulative(cumulative, idx);
  return out;
}

SampleBatch sample_sum_transformed(const SummandSet& set, std::size_t n, RandomStream& stream) {
  if (n == 0) fail(ErrorCode::PreconditionViolated, "sample size must be positive");
  const auto law = index_distribution(set.family, set.lambdas(), set.m, set.p);
  const auto picks = sample_indices(law, n, stream);
  std::vector<RandomStream> subs;
  for (std::size_t i = 0; i < set.summands.size(); ++i) subs.push_back(stream.split(static_cast<std::uint32_t>(i + 1)));
  SampleBatch batch;
  batch.values.reserve(n);
  for (std::size_t draw_id = 0; draw_id < n; ++draw_id) {
    const auto& comp = law.compositions[picks[draw_id]];
    double w = 0.0;
    for (std::size_t i = 0; i < set.summands.size(); ++i) w += set.summands[i].transforms[comp[i]](subs[i]);
    batch.values.push_back(w);
  }
  batch.source = "sum family=" + std::string(poly_family_name(set.family)) + " n=" +
                 std::to_string(set.summands.size()) + " m=" + std::to_string(set.m);
  batch.seed = stream.seed();
  batch.stream = stream.stream();
  return batch;
}

std::optional<DistributionSpec> aggregate_law(const SummandSet& set) {
  const bool all_reference = std::all_of(set.summands.begin(), set.summands.end(), [&](const Summand& s) {
    return s.dist == reference_distribution(make_system(set.family, s.lambda, set.p));
  });
  if (all_reference) return reference_distribution(make_system(set.family, set.total_lambda(), set.p));
  const bool all_discrete =
      std::all_of(set.summands.begin(), set.summands.end(), [](const Summand& s) { return s.dist.is_discrete(); });
  if (!all_discrete) return std::nullopt;
  std::map<double, double> acc{{0.0, 1.0}};
  for (const auto& s : set.summands) {
    std::map<double, double> next;
    for (const auto& [x, w] : acc) {
      for (const auto& a : discrete_atoms(s.dist, 1e-40)) next[x + a.x] += w * a.w;
    }
    acc = std::move(next);
  }
  std::vector<double> pts, ws;
  for (const auto& [x, w] : acc) {
    pts.push_back(x);
    ws.push_back(w);
  }
  return make_atoms(pts, ws);
}

SampleBatch sample_direct_transform(const SummandSet& set, std::size_t n, RandomStream& stream) {
  const auto law = aggregate_law(set);
  if (!law) fail(ErrorCode::PreconditionViolated, "law of the sum is not available in closed form");
  const PolySystemId sys = make_system(set.family, set.total_lambda(), set.p);
  if (*law == reference_distribution(sys)) return sample(closed_form_transform(sys, set.m), n, stream);
  const auto drawer = general_drawer(*law, sys, set.m);
  SampleBatch batch;
  for (std::size_t i = 0; i < n; ++i) batch.values.push_back(drawer(stream));
  batch.source = "direct " + law->description();
  batch.seed = stream.seed();
  batch.stream = stream.stream();
  return batch;
}

double shifted_lambda(const PolySystemId& sys, int k) {
  switch (sys.family) {
    case PolyFamily::Hermite:
    case PolyFamily::Charlier: return sys.lambda;
    case PolyFamily::Laguerre:
    case PolyFamily::Gegenbauer: return sys.lambda + k;
    case PolyFamily::Krawtchouk: return sys.lambda - k;
  }
  return sys.lambda;
}

IteratedBiasReport iterated_bias_check(const PolySystemId& sys, int m, int k, int j, std::size_t n,
                                       RandomStream& stream) {
  if (k < 0 || j < 0 || m < 0) fail(ErrorCode::PreconditionViolated, "orders must be nonnegative");
  if (k + j > m) {
    fail(ErrorCode::OrderViolated,
         "k + j = " + std::to_string(k + j) + " exceeds m = " + std::to_string(m));
  }
  if (n < 2) fail(ErrorCode::PreconditionViolated, "need at least two draws");
  poly_coeffs(sys, m);  // degree check
  const DistributionSpec ref = reference_distribution(sys);
  IteratedBiasReport report{sys, m, k, j, shifted_lambda(sys, k), {}, true, false};
  const int orders = 2 * (m - k);
  if (orders > 0) {
    const auto draw_k = k == 0 ? law_drawer(ref) : general_drawer(ref, sys, k);
    std::vector<double> xs(n);
    for (auto& x : xs) x = draw_k(stream);
    const DistributionSpec target = reference_distribution(make_system(sys.family, report.mu, sys.p));
    for (int r = 1; r <= orders; ++r) {
      double sum = 0.0, sum2 = 0.0;
      for (double x : xs) {
        const double v = std::pow(x, r);
        sum += v;
        sum2 += v * v;
      }
      const double mean_r = sum / n;
      const double var_r = std::max(0.0, (sum2 - n * mean_r * mean_r) / (n - 1));
      const double se = std::sqrt(var_r / n);
      const double exact = analytic_moment(target, r);
      const double diff = mean_r - exact;
      const double z = se > 0 ? diff / se : 0.0;
      const bool pass = se > 0 ? std::abs(z) <= 4.0 : std::abs(diff) <= 1e-12 * std::max(1.0, std::abs(exact));
      report.rows.push_back({r, mean_r, exact, se, z, pass});
      report.moments_match = report.moments_match && pass;
    }
  }
  report.eligible = report.moments_match && k + j <= m;
  return report;
}

}  // namespace steinbias
