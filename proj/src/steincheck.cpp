#include "steinbias/steincheck.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>

#include "steinbias/errors.hpp"

namespace steinbias {

namespace {

// Truncated Taylor series c_0 + c_1 h + ... + c_8 h^8 about a point.
struct Jet {
  std::array<double, kMaxDerivativeOrder + 1> c{};
};

Jet operator*(const Jet& a, const Jet& b) {
  Jet r;
  for (std::size_t k = 0; k < r.c.size(); ++k) {
    for (std::size_t i = 0; i <= k; ++i) r.c[k] += a.c[i] * b.c[k - i];
  }
  return r;
}

Jet affine(const Jet& a, double scale, double shift) {
  Jet r = a;
  for (auto& v : r.c) v *= scale;
  r.c[0] += shift;
  return r;
}

Jet reciprocal(const Jet& a) {
  Jet r;
  r.c[0] = 1.0 / a.c[0];
  for (std::size_t k = 1; k < r.c.size(); ++k) {
    double acc = 0.0;
    for (std::size_t i = 1; i <= k; ++i) acc += a.c[i] * r.c[k - i];
    r.c[k] = -acc / a.c[0];
  }
  return r;
}

Jet exp(const Jet& a) {
  Jet r;
  r.c[0] = std::exp(a.c[0]);
  for (std::size_t k = 1; k < r.c.size(); ++k) {
    double acc = 0.0;
    for (std::size_t i = 1; i <= k; ++i) acc += static_cast<double>(i) * a.c[i] * r.c[k - i];
    r.c[k] = acc / static_cast<double>(k);
  }
  return r;
}

double factorial(int q) { return std::tgamma(q + 1.0); }

// Physicists' Hermite polynomial H_q.
double hermite_phys(int q, double x) {
  double prev = 1.0, cur = 2.0 * x;
  if (q == 0) return prev;
  for (int n = 1; n < q; ++n) {
    const double next = 2.0 * x * cur - 2.0 * n * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double binom(int q, int i) { return factorial(q) / (factorial(i) * factorial(q - i)); }

struct OperatorPolys {
  Poly hm;
  Poly hm1;
};

OperatorPolys validate_operator(SteinOperator op, const TestFunction& f, const OperatorParams& prm) {
  const auto mismatch = [&](const std::string& why) {
    fail(ErrorCode::OperatorParamMismatch, std::string(to_string(op)) + ": " + why);
  };
  if (op != SteinOperator::BinomialEhm && !f.has_derivatives()) mismatch("test function " + f.id() + " has no derivatives");
  OperatorPolys polys;
  switch (op) {
    case SteinOperator::Classical: break;
    case SteinOperator::H1:
    case SteinOperator::H2: {
      if (prm.m < 1 || prm.m > kMaxDerivativeOrder) mismatch("m must lie in [1, 8]");
      const auto h = make_system(PolyFamily::Hermite, 1.0);
      polys.hm = poly_coeffs(h, prm.m);
      polys.hm1 = poly_coeffs(h, prm.m - 1);
      break;
    }
    case SteinOperator::Gamma:
      if (!(prm.lambda > 0)) mismatch("lambda must be positive");
      break;
    case SteinOperator::BinomialEhm:
      if (!(prm.lambda >= 1) || std::floor(prm.lambda) != prm.lambda) mismatch("lambda must be a positive integer");
      if (!(prm.p > 0 && prm.p < 1)) mismatch("p must lie in (0,1)");
      break;
  }
  return polys;
}

double operator_value(SteinOperator op, const TestFunction& f, double x, const OperatorParams& prm,
                      const OperatorPolys& polys) {
  switch (op) {
    case SteinOperator::Classical: return f.derivative(1, x) - x * f(x);
    case SteinOperator::H1: return f.derivative(1, x) * polys.hm1(x) - polys.hm(x) * f(x);
    case SteinOperator::H2: return f.derivative(prm.m, x) - polys.hm(x) * f(x);
    case SteinOperator::Gamma: return (x - prm.lambda) * f(x) - x * f.derivative(1, x);
    case SteinOperator::BinomialEhm: return prm.p * (prm.lambda - x) * f(x + 1.0) - (1.0 - prm.p) * x * f(x);
  }
  return 0.0;
}

MCEstimate mean_and_error(const std::vector<double>& v, std::uint64_t seed, std::uint32_t stream) {
  const std::size_t n = v.size();
  double sum = 0.0;
  for (double x : v) sum += x;
  const double mean = sum / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double se = n > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0;
  return {mean, se, n, seed, stream};
}

void check_membership(const DistributionSpec& dist, const PolySystemId& sys, int m) {
  const auto ref = reference_distribution(sys);
  for (int j = 1; j <= 2 * m; ++j) {
    const double a = analytic_moment(dist, j);
    const double b = analytic_moment(ref, j);
    if (std::abs(a - b) > 1e-9 * std::max(1.0, std::abs(b))) {
      fail(ErrorCode::MembershipViolated, dist.description() + ": moment " + std::to_string(j) + " is " +
                                              std::to_string(a) + ", the reference law has " + std::to_string(b));
    }
  }
}

std::vector<double> column(const std::vector<double>& xs, const std::function<double(double)>& f) {
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out[i] = f(xs[i]);
    if (!std::isfinite(out[i])) {
      fail(ErrorCode::NonFiniteValue, "non-finite value at x = " + std::to_string(xs[i]), static_cast<int>(i));
    }
  }
  return out;
}

}  // namespace

TestFunction::TestFunction(std::string id, std::function<double(double)> value,
                           std::function<double(int, double)> derivative, Growth growth, int degree)
    : id_(std::move(id)), value_(std::move(value)), derivative_(std::move(derivative)), growth_(growth),
      degree_(degree) {}

double TestFunction::derivative(int q, double x) const {
  if (q < 0 || q > kMaxDerivativeOrder) fail(ErrorCode::PreconditionViolated, "derivative order must lie in [0, 8]");
  if (q == 0) return value_(x);
  if (!derivative_) fail(ErrorCode::NotApplicable, id_ + " has no derivatives");
  return derivative_(q, x);
}

double TestFunction::forward_difference(int q, double x) const {
  double acc = 0.0;
  for (int i = 0; i <= q; ++i) acc += binom(q, i) * (((q - i) % 2) ? -1.0 : 1.0) * value_(x + i);
  return acc;
}

TestFunction monomial(int j) {
  return TestFunction(
      "x^" + std::to_string(j), [j](double x) { return std::pow(x, j); },
      [j](int q, double x) {
        if (q > j) return 0.0;
        return factorial(j) / factorial(j - q) * std::pow(x, j - q);
      },
      j == 0 ? Growth::Bounded : Growth::Polynomial, j);
}

TestFunction gaussian_bump() {
  return TestFunction(
      "exp(-x^2)", [](double x) { return std::exp(-x * x); },
      [](int q, double x) { return ((q % 2) ? -1.0 : 1.0) * hermite_phys(q, x) * std::exp(-x * x); }, Growth::Bounded);
}

TestFunction sine() {
  return TestFunction(
      "sin", [](double x) { return std::sin(x); },
      [](int q, double x) { return std::sin(x + q * std::numbers::pi / 2); }, Growth::Bounded);
}

TestFunction cosine() {
  return TestFunction(
      "cos", [](double x) { return std::cos(x); },
      [](int q, double x) { return std::cos(x + q * std::numbers::pi / 2); }, Growth::Bounded);
}

TestFunction smooth_bump() {
  return TestFunction(
      "bump",
      [](double x) {
        if (std::abs(x) >= 2.0) return 0.0;
        const double u = 0.5 * x;
        return std::exp(-1.0 / (1.0 - u * u));
      },
      [](int q, double x) {
        if (std::abs(x) >= 2.0) return 0.0;
        Jet t;
        t.c[0] = x;
        t.c[1] = 1.0;
        const Jet u = affine(t, 0.5, 0.0);
        const Jet s = affine(u * u, -1.0, 1.0);
        const Jet f = exp(affine(reciprocal(s), -1.0, 0.0));
        return factorial(q) * f.c[q];
      },
      Growth::Bounded);
}

TestFunction indicator(long k) {
  return TestFunction(
      "ind{" + std::to_string(k) + "}", [k](double x) { return x == static_cast<double>(k) ? 1.0 : 0.0; }, {},
      Growth::Bounded);
}

std::vector<TestFunction> default_bank(bool lattice) {
  std::vector<TestFunction> bank;
  for (int j = 0; j <= 5; ++j) bank.push_back(monomial(j));
  bank.push_back(gaussian_bump());
  bank.push_back(sine());
  bank.push_back(cosine());
  bank.push_back(smooth_bump());
  if (lattice) {
    for (long k = 0; k <= 5; ++k) bank.push_back(indicator(k));
  }
  return bank;
}

double derivative_self_test(const TestFunction& f, const std::vector<double>& grid, int max_order) {
  constexpr double h = 1e-3;
  double worst = 0.0;
  for (int q = 1; q <= max_order; ++q) {
    for (double x : grid) {
      const double exact = f.derivative(q, x);
      const auto d = [&](double t) { return f.derivative(q - 1, t); };
      const double fd = (d(x - 2 * h) - 8 * d(x - h) + 8 * d(x + h) - d(x + 2 * h)) / (12 * h);
      worst = std::max(worst, std::abs(exact - fd) / std::max(1.0, std::abs(exact)));
    }
  }
  return worst;
}

MCEstimate mc_expectation(const std::function<double(double)>& f, const SampleBatch& samples) {
  if (samples.values.empty()) fail(ErrorCode::PreconditionViolated, "no samples");
  return mean_and_error(column(samples.values, f), samples.seed, samples.stream);
}

bool VerificationReport::pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const VerificationRow& r) { return r.pass; });
}

double VerificationReport::pass_fraction() const {
  if (rows.empty()) return 1.0;
  const auto n = std::count_if(rows.begin(), rows.end(), [](const VerificationRow& r) { return r.pass; });
  return static_cast<double>(n) / rows.size();
}

void write_verification_csv(std::ostream& out, const VerificationReport& report) {
  out << "check_id,family,lambda,p,m,function_id,lhs,rhs,stderr_lhs,stderr_rhs,z,pass\n";
  const auto old = out.precision(17);
  for (const auto& r : report.rows) {
    out << r.check_id << ',' << r.family << ',' << r.lambda << ',' << r.p << ',' << r.m << ',' << r.function_id << ','
        << r.lhs << ',' << r.rhs << ',' << r.stderr_lhs << ',' << r.stderr_rhs << ',' << r.z << ','
        << (r.pass ? "true" : "false") << '\n';
  }
  out.precision(old);
}

double exact_z(double lhs, double rhs) {
  const double tol = kExactTolerance * std::max({1.0, std::abs(lhs), std::abs(rhs)});
  return (lhs - rhs) / (tol / kZThreshold);
}

VerificationReport verify_characterization(const DistributionSpec& dist, const PolySystemId& sys, int m,
                                           const std::vector<TestFunction>& bank, std::size_t n,
                                           RandomStream& stream) {
  if (bank.empty()) fail(ErrorCode::PreconditionViolated, "empty test-function bank");
  if (m < 0) fail(ErrorCode::PreconditionViolated, "order must be nonnegative");
  check_membership(dist, sys, m);
  const Poly pm = poly_coeffs(sys, m);
  const double alpha = alpha_closed_form(sys, m).value;
  const auto bf = locate_sign_structure(pm);

  VerificationReport report;
  report.config = dist.description() + " system=" + std::string(poly_family_name(sys.family)) +
                  " m=" + std::to_string(m) + " n=" + std::to_string(n) + " seed=" + std::to_string(stream.seed()) +
                  " stream=" + std::to_string(stream.stream());
  const auto row = [&](const TestFunction& f, double lhs, double rhs, double sl, double sr) {
    const double z = (sl > 0 || sr > 0) ? (lhs - rhs) / std::hypot(sl, sr) : exact_z(lhs, rhs);
    report.rows.push_back({"char seed=" + std::to_string(stream.seed()) + " " + dist.description(),
                           std::string(poly_family_name(sys.family)), sys.lambda, sys.p, m, f.id(), lhs, rhs, sl, sr, z,
                           std::abs(z) <= kZThreshold});
  };

  if (uses_differences(sys.family)) {
    if (!dist.is_lattice()) fail(ErrorCode::PreconditionViolated, "difference systems need an integer-valued law");
    const auto atoms = discrete_atoms(dist, 1e-40);
    const auto q = discrete_transform_pmf(dist, bf, m, alpha);
    for (const auto& f : bank) {
      double lhs = 0.0, rhs = 0.0;
      for (const auto& a : atoms) lhs += a.w * pm(a.x) * f(a.x);
      for (std::size_t j = 0; j < q.points.size(); ++j) {
        rhs += q.probs[j] * f.forward_difference(m, static_cast<double>(q.points[j]));
      }
      rhs *= alpha;
      if (!std::isfinite(lhs) || !std::isfinite(rhs)) fail(ErrorCode::NonFiniteValue, f.id() + " is not finite");
      row(f, lhs, rhs, 0.0, 0.0);
    }
    return report;
  }

  for (const auto& f : bank) {
    if (!f.has_derivatives()) fail(ErrorCode::PreconditionViolated, f.id() + " needs derivatives for this system");
  }
  std::vector<double> xs;
  std::vector<Atom> atoms;
  if (dist.is_discrete()) {
    atoms = discrete_atoms(dist, 1e-40);
  } else {
    RandomStream sx = stream.split(0);
    xs = sample(dist, n, sx).values;
  }
  RandomStream sy = stream.split(1);
  const TransformSampler sampler(dist, bf, alpha);
  const auto ys = sampler.sample(n, sy).values;

  for (const auto& f : bank) {
    double lhs = 0.0, sl = 0.0;
    if (dist.is_discrete()) {
      for (const auto& a : atoms) lhs += a.w * pm(a.x) * f(a.x);
    } else {
      const auto est = mean_and_error(column(xs, [&](double x) { return pm(x) * f(x); }), stream.seed(), 0);
      lhs = est.mean;
      sl = est.stderr_;
    }
    const auto r = mean_and_error(column(ys, [&](double y) { return f.derivative(m, y); }), stream.seed(), 1);
    row(f, lhs, alpha * r.mean, sl, alpha * r.stderr_);
  }
  return report;
}

std::string_view to_string(SteinOperator op) {
  switch (op) {
    case SteinOperator::Classical: return "classical";
    case SteinOperator::H1: return "h1";
    case SteinOperator::H2: return "h2";
    case SteinOperator::Gamma: return "gamma";
    case SteinOperator::BinomialEhm: return "binomial_ehm";
  }
  return "unknown";
}

SteinOperator parse_stein_operator(std::string_view name) {
  for (auto op : {SteinOperator::Classical, SteinOperator::H1, SteinOperator::H2, SteinOperator::Gamma,
                  SteinOperator::BinomialEhm}) {
    if (to_string(op) == name) return op;
  }
  fail(ErrorCode::OperatorParamMismatch, "unknown operator '" + std::string(name) + "'");
}

double stein_operator(SteinOperator op, const TestFunction& f, double x, const OperatorParams& params) {
  return operator_value(op, f, x, params, validate_operator(op, f, params));
}

MCEstimate stein_residual(SteinOperator op, const TestFunction& f, const SampleBatch& samples,
                          const OperatorParams& params) {
  const auto polys = validate_operator(op, f, params);
  return mc_expectation([&](double x) { return operator_value(op, f, x, params, polys); }, samples);
}

double stein_residual_exact(SteinOperator op, const TestFunction& f, const DistributionSpec& dist,
                            const OperatorParams& params) {
  if (!dist.is_discrete()) fail(ErrorCode::PreconditionViolated, "exact residuals need a discrete law");
  const auto polys = validate_operator(op, f, params);
  double acc = 0.0;
  for (const auto& a : discrete_atoms(dist, 1e-40)) acc += a.w * operator_value(op, f, a.x, params, polys);
  return acc;
}

double normal_expectation(const std::function<double(double)>& h) {
  return expect(make_distribution(Family::NormalMeanZero, {1.0}), h);
}

std::vector<MomentCheck> moment_checks(const std::vector<double>& xs, const DistributionSpec& target, int max_order) {
  std::vector<MomentCheck> out;
  for (int r = 1; r <= max_order; ++r) {
    const auto est = mean_and_error(column(xs, [r](double x) { return std::pow(x, r); }), 0, 0);
    const double exact = analytic_moment(target, r);
    const double diff = est.mean - exact;
    const double z = est.stderr_ > 0 ? diff / est.stderr_ : exact_z(est.mean, exact);
    out.push_back({r, est.mean, exact, est.stderr_, z, std::abs(z) <= kZThreshold});
  }
  return out;
}

EquivalenceReport gamma_sizebias_equivalence(double lambda, std::size_t n, RandomStream& stream) {
  const auto sys = make_system(PolyFamily::Laguerre, lambda);
  const auto gamma = reference_distribution(sys);
  const auto vb = system_bias(sys, 1);
  RandomStream sa = stream.split(0);
  RandomStream sb = stream.split(1);
  const auto a = TransformSampler(gamma, vb.function, vb.alpha).sample(n, sa).values;
  const auto b = classic_bias(gamma, ClassicBias::Size, n, sb).values;
  EquivalenceReport r{lambda, ks_statistic(a, b), ks_critical_two_sample(n, n), {}, {}, false};
  const auto target = make_distribution(Family::Gamma, {lambda + 1.0});
  r.transform_moments = moment_checks(a, target, 4);
  r.size_bias_moments = moment_checks(b, target, 4);
  const auto ok = [](const std::vector<MomentCheck>& v) {
    return std::all_of(v.begin(), v.end(), [](const MomentCheck& c) { return c.pass; });
  };
  r.pass = r.ks < r.ks_critical && ok(r.transform_moments) && ok(r.size_bias_moments);
  return r;
}

FixedPointReport fixed_point_test(const DistributionSpec& dist, const PolySystemId& sys, int m, std::size_t n,
                                  RandomStream& stream) {
  const Poly pm = poly_coeffs(sys, m);
  if (!uses_differences(sys.family)) return fixed_point_test(dist, pm, m, n, stream);
  if (!dist.is_lattice()) fail(ErrorCode::PreconditionViolated, "difference systems need an integer-valued law");
  const auto vb = make_biasing_function(dist, pm, m);
  const auto q = discrete_transform_pmf(dist, vb.function, m, vb.alpha);
  const double tv = total_variation(q, pmf_of(dist));
  return {"tv", tv, 1e-10, tv < 1e-10};
}

FixedPointReport fixed_point_test(const DistributionSpec& dist, const BiasRepresentation& rep, int m, std::size_t n,
                                  RandomStream& stream) {
  const auto vb = make_biasing_function(dist, rep, m);
  RandomStream sa = stream.split(0);
  RandomStream sb = stream.split(1);
  const auto a = TransformSampler(dist, vb.function, vb.alpha).sample(n, sa).values;
  const auto b = sample(dist, n, sb).values;
  const double ks = ks_statistic(a, b);
  const double crit = ks_critical_two_sample(n, n);
  return {"ks", ks, crit, ks < crit};
}

}  // namespace steinbias
