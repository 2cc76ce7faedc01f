#include "steinbias/biastransform.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "steinbias/errors.hpp"

namespace steinbias {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kGridCells = 1u << 15;
constexpr int kEnvelopeGrid = 4096;

int sgn(double v) { return (v > 0) - (v < 0); }

double sign_function_value(const SignFunction& s, double x) {
  const auto it = std::lower_bound(s.breaks.begin(), s.breaks.end(), x);
  const auto i = static_cast<std::size_t>(it - s.breaks.begin());
  if (it != s.breaks.end() && *it == x) return s.at_breaks[i];
  return s.levels[i];
}

void validate_sign_function(const SignFunction& s) {
  if (s.levels.size() != s.breaks.size() + 1 || s.at_breaks.size() != s.breaks.size()) {
    fail(ErrorCode::PreconditionViolated, "sign function needs one more level than breakpoints");
  }
  for (std::size_t i = 1; i < s.breaks.size(); ++i) {
    if (!(s.breaks[i] > s.breaks[i - 1])) fail(ErrorCode::PreconditionViolated, "breakpoints must increase");
  }
  const auto bad = [](int v) { return v < -1 || v > 1; };
  if (std::any_of(s.levels.begin(), s.levels.end(), bad) || std::any_of(s.at_breaks.begin(), s.at_breaks.end(), bad)) {
    fail(ErrorCode::PreconditionViolated, "sign function levels must lie in {-1, 0, 1}");
  }
}

// Representative of a declared sign change of a callable inside [a, b].
std::pair<double, std::pair<double, double>> callable_root(const std::function<double(double)>& f, double a,
                                                            double b) {
  if (a == b) return {a, {a, b}};
  constexpr int n = 256;
  std::vector<double> grid(n + 1);
  std::vector<int> sign(n + 1);
  for (int k = 0; k <= n; ++k) {
    grid[k] = a + (b - a) * k / n;
    sign[k] = sgn(f(grid[k]));
  }
  const auto first = std::find_if(sign.begin(), sign.end(), [](int v) { return v != 0; });
  if (first == sign.end()) return {0.5 * (a + b), {a, b}};
  const int before = *first;
  const auto after_it = std::find(first, sign.end(), -before);
  if (after_it == sign.end()) return {0.5 * (a + b), {a, b}};
  const auto i = static_cast<int>(after_it - sign.begin());
  int j = i - 1;
  while (sign[j] != before) --j;
  if (j + 1 < i) return {0.5 * (grid[j + 1] + grid[i - 1]), {grid[j + 1], grid[i - 1]}};
  double lo = grid[j], hi = grid[i];
  for (int it = 0; it < 200 && hi - lo > 0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const int s = sgn(f(mid));
    if (s == 0) return {mid, {mid, mid}};
    (s == before ? lo : hi) = mid;
  }
  const double r = 0.5 * (lo + hi);
  return {r, {r, r}};
}

double factorial_d(int m) { return std::tgamma(m + 1.0); }

std::vector<double> check_points(const DistributionSpec& dist, const BiasingFunction& bf) {
  std::vector<double> pts;
  if (dist.is_discrete()) {
    for (const auto& a : discrete_atoms(dist, 1e-40)) pts.push_back(a.x);
    return pts;
  }
  const auto [lo, hi] = truncation_range(dist);
  for (int k = 0; k <= kEnvelopeGrid; ++k) pts.push_back(lo + (hi - lo) * k / kEnvelopeGrid);
  for (double b : bf.breakpoints()) {
    if (b >= lo && b <= hi) pts.push_back(b);
  }
  return pts;
}

}  // namespace

SignFunction sign_function(std::vector<double> breaks, std::vector<int> levels, std::vector<int> at_breaks) {
  if (at_breaks.empty()) at_breaks.assign(breaks.size(), 0);
  SignFunction s{std::move(breaks), std::move(levels), std::move(at_breaks)};
  validate_sign_function(s);
  return s;
}

SignFunction sign_of_x() { return sign_function({0.0}, {-1, 1}); }

double BiasingFunction::operator()(double x) const {
  return std::visit(
      [x](const auto& r) -> double {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, Poly>) {
          return r(x);
        } else if constexpr (std::is_same_v<R, SignFunction>) {
          return sign_function_value(r, x);
        } else {
          return r.f(x);
        }
      },
      rep_);
}

std::vector<double> BiasingFunction::breakpoints() const {
  if (const auto* s = std::get_if<SignFunction>(&rep_)) return s->breaks;
  if (const auto* c = std::get_if<CallableFunction>(&rep_)) {
    std::vector<double> out;
    for (const auto& [a, b] : c->sign_change_intervals) {
      out.push_back(a);
      out.push_back(b);
    }
    out.insert(out.end(), roots_.begin(), roots_.end());
    return out;
  }
  return {};
}

std::string BiasingFunction::description() const {
  std::string out;
  if (const auto* p = std::get_if<Poly>(&rep_)) {
    out = "poly[";
    for (int i = 0; i <= p->degree(); ++i) out += (i ? ";" : "") + std::to_string((*p)[i]);
    out += "]";
  } else if (std::holds_alternative<SignFunction>(rep_)) {
    out = "sign";
  } else {
    out = std::get<CallableFunction>(rep_).label;
  }
  out += " m=" + std::to_string(order());
  return out;
}

BiasingFunction BiasingFunction::with_roots(std::vector<double> roots) const {
  if (roots.size() != roots_.size()) {
    fail(ErrorCode::SignStructureMismatch, "expected " + std::to_string(roots_.size()) + " roots");
  }
  for (std::size_t i = 0; i < roots.size(); ++i) {
    const auto [a, b] = root_intervals_[i];
    const double slack = 1e-12 * std::max(1.0, std::abs(roots_[i]));
    if (roots[i] < a - slack || roots[i] > b + slack) {
      fail(ErrorCode::SignStructureMismatch, "root " + std::to_string(roots[i]) + " lies outside its sign-change interval",
           static_cast<int>(i));
    }
  }
  BiasingFunction out = *this;
  out.roots_ = std::move(roots);
  out.q_ = from_roots(out.roots_);
  return out;
}

BiasingFunction locate_sign_structure(const BiasRepresentation& rep) {
  BiasingFunction bf;
  bf.rep_ = rep;
  if (const auto* p = std::get_if<Poly>(&rep)) {
    if (p->coeffs().empty() || p->leading() == 0.0) fail(ErrorCode::SignStructureMismatch, "P is identically zero");
    if (p->leading() < 0) fail(ErrorCode::SignStructureMismatch, "P must be positive on its rightmost interval");
    bf.roots_ = sign_change_roots(*p);
    for (double r : bf.roots_) bf.root_intervals_.emplace_back(r, r);
  } else if (const auto* s = std::get_if<SignFunction>(&rep)) {
    validate_sign_function(*s);
    std::vector<std::size_t> nonzero;
    for (std::size_t i = 0; i < s->levels.size(); ++i) {
      if (s->levels[i] != 0) nonzero.push_back(i);
    }
    if (nonzero.empty()) fail(ErrorCode::SignStructureMismatch, "P is identically zero");
    if (s->levels[nonzero.back()] < 0) {
      fail(ErrorCode::SignStructureMismatch, "P must be positive on its rightmost interval");
    }
    for (std::size_t k = 1; k < nonzero.size(); ++k) {
      const std::size_t i = nonzero[k - 1];
      const std::size_t j = nonzero[k];
      if (s->levels[i] == s->levels[j]) continue;
      const double a = s->breaks[i];
      const double b = s->breaks[j - 1];
      bf.roots_.push_back(0.5 * (a + b));
      bf.root_intervals_.emplace_back(a, b);
    }
  } else {
    const auto& c = std::get<CallableFunction>(rep);
    if (!c.f) fail(ErrorCode::PreconditionViolated, "callable P is empty");
    double prev = -std::numeric_limits<double>::infinity();
    for (const auto& [a, b] : c.sign_change_intervals) {
      if (!(a <= b) || !(a > prev)) {
        fail(ErrorCode::PreconditionViolated, "sign-change intervals must be ordered and disjoint");
      }
      prev = b;
      const auto [r, iv] = callable_root(c.f, a, b);
      bf.roots_.push_back(r);
      bf.root_intervals_.push_back(iv);
    }
  }
  bf.q_ = from_roots(bf.roots_);
  return bf;
}

ValidatedBias make_biasing_function(const DistributionSpec& dist, const BiasRepresentation& rep, int m) {
  if (m < 0) fail(ErrorCode::PreconditionViolated, "order must be nonnegative");
  BiasingFunction bf = locate_sign_structure(rep);
  if (bf.order() != m) {
    fail(ErrorCode::SignStructureMismatch,
         "P has " + std::to_string(bf.order()) + " sign changes but order " + std::to_string(m) + " was claimed");
  }

  // Q and P must share their sign on the support.
  const auto pts = check_points(dist, bf);
  std::vector<double> qp(pts.size());
  double scale = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    qp[i] = bf.q()(pts[i]) * bf(pts[i]);
    scale = std::max(scale, std::abs(qp[i]));
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (qp[i] < -1e-9 * std::max(1.0, scale)) {
      fail(ErrorCode::SignStructureMismatch, "Q P < 0 at x = " + std::to_string(pts[i]));
    }
  }

  const auto breaks = bf.breakpoints();
  const double mf = factorial_d(m);
  std::vector<double> moments(m + 1);
  for (int k = 0; k <= m; ++k) {
    moments[k] = expect(dist, [&](double x) { return std::pow(x, k) * bf(x); }, breaks) / mf;
  }
  const double alpha = moments[m];
  if (!(alpha > 0)) fail(ErrorCode::NonPositiveAlpha, "alpha = " + std::to_string(alpha) + " is not positive");
  for (int k = 0; k < m; ++k) {
    if (std::abs(moments[k]) > kOrthogonalityTolerance * std::max(1.0, std::abs(alpha))) {
      fail(ErrorCode::OrthogonalityViolated,
           "(1/m!) E X^" + std::to_string(k) + " P(X) = " + std::to_string(moments[k]) + " is not zero", k);
    }
  }
  return {std::move(bf), alpha, std::move(moments)};
}

double combine_transform(double y, std::span<const double> roots, std::span<const double> u) {
  const std::size_t m = roots.size();
  if (m == 0) return y;
  const auto r = [&](std::size_t k) { return k == 0 ? y : roots[k - 1]; };
  double result = r(m);
  double prod = 1.0;
  for (std::size_t k = m; k >= 1; --k) {
    prod *= u[k - 1];
    result += prod * (r(k - 1) - r(k));
  }
  return result;
}

TransformSampler::TransformSampler(DistributionSpec dist, BiasingFunction bf, double alpha, YSamplerMode mode)
    : dist_(std::move(dist)), bf_(std::move(bf)), alpha_(alpha), m_factorial_(factorial_d(bf_.order())),
      method_(Method::Atoms) {
  if (!(alpha_ > 0)) fail(ErrorCode::NonPositiveAlpha, "alpha must be positive");

  if (dist_.is_discrete()) {
    double acc = 0.0;
    for (const auto& a : discrete_atoms(dist_, 1e-40)) {
      const double w = a.w * std::max(0.0, tilt(a.x));
      if (w <= 0) continue;
      acc += w;
      atom_points_.push_back(a.x);
      cumulative_.push_back(acc);
    }
    if (atom_points_.empty()) fail(ErrorCode::YSamplerFailure, "tilted measure has no mass");
    return;
  }

  const auto [lo, hi] = truncation_range(dist_);
  double sup = 0.0;
  for (int k = 0; k <= kEnvelopeGrid; ++k) sup = std::max(sup, tilt(lo + (hi - lo) * k / kEnvelopeGrid));
  for (double b : bf_.breakpoints()) {
    if (b >= lo && b <= hi) sup = std::max(sup, tilt(b));
  }
  envelope_ = 1.5 * sup;

  const bool rejection =
      mode == YSamplerMode::Rejection || (mode == YSamplerMode::Auto && envelope_ <= kRejectionMaxEnvelope);
  if (rejection) {
    method_ = Method::Rejection;
    return;
  }

  // Grid inversion of the tilted density, in a variable where it is bounded.
  method_ = Method::Grid;
  std::function<double(double)> weight;
  double u_hi = hi;
  if (const auto lam = symmetric_beta_lambda(dist_)) {
    const double c = symmetric_beta_constant(*lam);
    const double two_lam = 2.0 * *lam;
    u_lo_ = 0.0;
    u_hi = kPi;
    to_x_ = [](double u) { return -std::cos(u); };
    weight = [this, c, two_lam](double u) { return tilt(-std::cos(u)) * c * std::pow(std::sin(u), two_lam); };
  } else if (dist_.family() == Family::Gamma) {
    const double k = std::clamp(std::ceil(1.0 / dist_.param(0)), 1.0, 8.0);
    u_lo_ = 0.0;
    u_hi = std::pow(hi, 1.0 / k);
    to_x_ = [k](double u) { return std::pow(u, k); };
    weight = [this, k](double u) {
      const double x = std::pow(u, k);
      return tilt(x) * density(dist_, x) * k * std::pow(u, k - 1.0);
    };
  } else {
    u_lo_ = lo;
    to_x_ = [](double u) { return u; };
    weight = [this](double x) { return tilt(x) * density(dist_, x); };
  }
  u_width_ = (u_hi - u_lo_) / kGridCells;
  using gl = boost::math::quadrature::gauss<double, 8>;
  cumulative_.resize(kGridCells);
  double acc = 0.0;
  for (std::size_t c = 0; c < kGridCells; ++c) {
    const double a = u_lo_ + c * u_width_;
    const double mass = gl::integrate(weight, a, a + u_width_);
    acc += std::max(0.0, mass);
    cumulative_[c] = acc;
  }
  if (!(acc > 0)) fail(ErrorCode::YSamplerFailure, "tilted density has no mass on the grid");
}

double TransformSampler::tilt(double y) const { return bf_.q()(y) * bf_(y) / (m_factorial_ * alpha_); }

std::string TransformSampler::y_method() const {
  switch (method_) {
    case Method::Atoms: return "atoms";
    case Method::Rejection: return "rejection";
    case Method::Grid: return "grid";
  }
  return "unknown";
}

double TransformSampler::draw_grid(RandomStream& s) const {
  const double v = s.uniform() * cumulative_.back();
  const auto idx = static_cast<std::size_t>(std::upper_bound(cumulative_.begin(), cumulative_.end(), v) -
                                            cumulative_.begin());
  const std::size_t cell = std::min(idx, cumulative_.size() - 1);
  return to_x_(u_lo_ + (static_cast<double>(cell) + s.uniform()) * u_width_);
}

double TransformSampler::draw_y(RandomStream& s) const {
  switch (method_) {
    case Method::Atoms: {
      const double v = s.uniform() * cumulative_.back();
      const auto idx = static_cast<std::size_t>(std::upper_bound(cumulative_.begin(), cumulative_.end(), v) -
                                                cumulative_.begin());
      return atom_points_[std::min(idx, atom_points_.size() - 1)];
    }
    case Method::Rejection: {
      const double cap = std::max(1e6, 1000.0 * envelope_);
      for (double trial = 0; trial < cap; trial += 1) {
        const double x = steinbias::draw(dist_, s);
        if (s.uniform() * envelope_ <= tilt(x)) return x;
      }
      fail(ErrorCode::YSamplerFailure, "rejection sampler exhausted its trial budget");
    }
    case Method::Grid: return draw_grid(s);
  }
  return 0.0;
}

double TransformSampler::draw(RandomStream& s) const {
  const double y = draw_y(s);
  const int m = bf_.order();
  std::vector<double> u(m);
  for (int i = 1; i <= m; ++i) u[i - 1] = std::pow(s.uniform(), 1.0 / i);
  return combine_transform(y, bf_.roots(), u);
}

SampleBatch TransformSampler::sample(std::size_t n, RandomStream& s) const {
  if (n == 0) fail(ErrorCode::PreconditionViolated, "sample size must be positive");
  SampleBatch batch;
  batch.values.reserve(n);
  for (std::size_t i = 0; i < n; ++i) batch.values.push_back(draw(s));
  batch.source = dist_.description() + " P=" + bf_.description() + " y=" + y_method();
  batch.seed = s.seed();
  batch.stream = s.stream();
  return batch;
}

SampleBatch sample_transformed(const DistributionSpec& dist, const BiasingFunction& bf, double alpha, std::size_t n,
                               RandomStream& stream, YSamplerMode mode) {
  return TransformSampler(dist, bf, alpha, mode).sample(n, stream);
}

double density_order_one(const DistributionSpec& dist, const BiasingFunction& bf, double alpha, double x) {
  if (bf.order() != 1) fail(ErrorCode::PreconditionViolated, "density formula needs m = 1");
  if (!(alpha > 0)) fail(ErrorCode::NonPositiveAlpha, "alpha must be positive");
  const Support s = dist.support();
  if (x < s.lo || x >= s.hi) return 0.0;
  const double v =
      expect_between(dist, [&](double t) { return bf(t); }, x, std::numeric_limits<double>::infinity(),
                     bf.breakpoints()) /
      alpha;
  return (v < 0 && v > -1e-10) ? 0.0 : v;
}

double DiscretePmf::at(std::int64_t k) const {
  if (points.empty() || k < points.front() || k > points.back()) return 0.0;
  return probs[static_cast<std::size_t>(k - points.front())];
}

DiscretePmf discrete_transform_pmf(const DistributionSpec& dist, const BiasingFunction& bf, int m, double alpha) {
  if (!dist.is_lattice()) fail(ErrorCode::PreconditionViolated, "discrete transform needs an integer-valued law");
  if (m < 0) fail(ErrorCode::PreconditionViolated, "order must be nonnegative");
  if (!(alpha > 0)) fail(ErrorCode::NonPositiveAlpha, "alpha must be positive");
  const auto atoms = discrete_atoms(dist, 1e-40);
  const auto lo = static_cast<std::int64_t>(std::llround(atoms.front().x));
  const auto hi = static_cast<std::int64_t>(std::llround(atoms.back().x));
  const auto len = static_cast<std::size_t>(hi - lo + 1);
  std::vector<long double> a(len, 0.0L);
  for (const auto& at : atoms) {
    a[static_cast<std::size_t>(std::llround(at.x) - lo)] =
        static_cast<long double>(at.w) * static_cast<long double>(bf(at.x)) / static_cast<long double>(alpha);
  }
  if (static_cast<std::size_t>(m) >= len) fail(ErrorCode::SingularSystem, "lattice shorter than the order");
  // m-fold prefix sums, and m-fold suffix sums; since P is orthogonal to
  // polynomials of degree < m, (-1)^m prefix_i = suffix_{i+m}. Each side is
  // taken where it accumulated less magnitude, avoiding tail cancellation.
  std::vector<long double> fwd = a, bwd = a, fwd_abs(len), bwd_abs(len);
  for (std::size_t i = 0; i < len; ++i) fwd_abs[i] = bwd_abs[i] = std::abs(a[i]);
  for (int r = 0; r < m; ++r) {
    for (std::size_t i = 1; i < len; ++i) {
      fwd[i] += fwd[i - 1];
      fwd_abs[i] += fwd_abs[i - 1];
    }
    for (std::size_t i = len - 1; i-- > 0;) {
      bwd[i] += bwd[i + 1];
      bwd_abs[i] += bwd_abs[i + 1];
    }
  }
  const long double sign = (m % 2 == 1) ? -1.0L : 1.0L;
  for (std::size_t i = len - m; i < len; ++i) {
    if (std::abs(fwd[i]) > 1e-10L) {
      fail(ErrorCode::SingularSystem,
           "boundary residual " + std::to_string(static_cast<double>(fwd[i])) + " exceeds 1e-10", static_cast<int>(i));
    }
  }
  std::vector<long double> q(len, 0.0L);
  for (std::size_t i = 0; i + m < len; ++i) {
    q[i] = fwd_abs[i] <= bwd_abs[i + m] ? sign * fwd[i] : bwd[i + m];
  }
  DiscretePmf out;
  long double total = 0.0L;
  for (std::size_t i = 0; i + m < len; ++i) {
    long double v = q[i];
    if (v < -1e-14L) {
      fail(ErrorCode::NegativeMass, "mass " + std::to_string(static_cast<double>(v)) + " at k = " +
                                        std::to_string(lo + static_cast<std::int64_t>(i)),
           static_cast<int>(i));
    }
    v = std::max(v, 0.0L);
    total += v;
    out.points.push_back(lo + static_cast<std::int64_t>(i));
    out.probs.push_back(static_cast<double>(v));
  }
  if (std::abs(total - 1.0L) > 1e-10L) {
    fail(ErrorCode::SingularSystem, "solution sums to " + std::to_string(static_cast<double>(total)));
  }
  return out;
}

DiscretePmf pmf_of(const DistributionSpec& dist, double tail) {
  if (!dist.is_lattice()) fail(ErrorCode::PreconditionViolated, "pmf_of needs an integer-valued law");
  const auto atoms = discrete_atoms(dist, tail);
  DiscretePmf out;
  const auto lo = static_cast<std::int64_t>(std::llround(atoms.front().x));
  const auto hi = static_cast<std::int64_t>(std::llround(atoms.back().x));
  for (std::int64_t k = lo; k <= hi; ++k) out.points.push_back(k);
  out.probs.assign(out.points.size(), 0.0);
  for (const auto& a : atoms) out.probs[static_cast<std::size_t>(std::llround(a.x) - lo)] += a.w;
  return out;
}

double total_variation(const DiscretePmf& a, const DiscretePmf& b) {
  std::map<std::int64_t, double> diff;
  for (std::size_t i = 0; i < a.points.size(); ++i) diff[a.points[i]] += a.probs[i];
  for (std::size_t i = 0; i < b.points.size(); ++i) diff[b.points[i]] -= b.probs[i];
  double acc = 0.0;
  for (const auto& [k, v] : diff) acc += std::abs(v);
  return 0.5 * acc;
}

DistributionSpec closed_form_transform(const PolySystemId& sys, int m) {
  if (m < 0) fail(ErrorCode::DegreeTooLarge, "negative order");
  const double lam = sys.lambda;
  switch (sys.family) {
    case PolyFamily::Hermite: return make_distribution(Family::NormalMeanZero, {lam});
    case PolyFamily::Laguerre: return make_distribution(Family::Gamma, {lam + m});
    case PolyFamily::Charlier: return make_distribution(Family::Poisson, {lam});
    case PolyFamily::Krawtchouk: {
      if (m > lam) {
        fail(ErrorCode::DegreeTooLarge, "order " + std::to_string(m) + " exceeds lambda = " + std::to_string(lam));
      }
      if (m == lam) {
        const double pt[] = {0.0};
        const double w[] = {1.0};
        return make_atoms(pt, w);
      }
      return make_distribution(Family::Binomial, {lam - m, sys.p});
    }
    case PolyFamily::Gegenbauer: {
      if (lam + m == 1.0) return make_distribution(Family::Semicircle, {});
      return make_distribution(Family::GegenbauerBeta, {lam + m});
    }
  }
  fail(ErrorCode::ParameterOutOfRange, "unknown family");
}

SampleBatch classic_bias(const DistributionSpec& dist, ClassicBias kind, std::size_t n, RandomStream& stream) {
  if (kind == ClassicBias::Size) {
    if (dist.support().lo < 0) fail(ErrorCode::PreconditionViolated, "size bias needs a nonnegative law");
    if (!(mean(dist) > 0)) fail(ErrorCode::PreconditionViolated, "size bias needs a positive mean");
    const CallableFunction plus{[](double x) { return std::max(x, 0.0); }, {}, "x+"};
    const auto vb = make_biasing_function(dist, plus, 0);
    return sample_transformed(dist, vb.function, vb.alpha, n, stream);
  }
  const double var = variance(dist);
  if (!(var > 0)) fail(ErrorCode::PreconditionViolated, "zero bias needs positive variance");
  if (std::abs(mean(dist)) > 1e-12 * std::sqrt(var)) {
    fail(ErrorCode::PreconditionViolated, "zero bias needs mean zero");
  }
  const auto vb = make_biasing_function(dist, Poly::x(), 1);
  return sample_transformed(dist, vb.function, vb.alpha, n, stream);
}

ValidatedBias system_bias(const PolySystemId& sys, int m) {
  const double alpha = alpha_closed_form(sys, m).value;
  std::vector<double> moments(m + 1, 0.0);
  moments[m] = alpha;
  return {locate_sign_structure(poly_coeffs(sys, m)), alpha, std::move(moments)};
}

double TransformResult::draw(RandomStream& stream) const {
  if (closed_form) return steinbias::draw(*closed_form, stream);
  return sampler->draw(stream);
}

SampleBatch TransformResult::sample(std::size_t n, RandomStream& stream) const {
  if (closed_form) return steinbias::sample(*closed_form, n, stream);
  return sampler->sample(n, stream);
}

TransformResult transform(const DistributionSpec& dist, const ValidatedBias& vb, YSamplerMode mode) {
  auto s = std::make_shared<const TransformSampler>(dist, vb.function, vb.alpha, mode);
  return {std::nullopt, std::move(s), vb.alpha, vb.function.order(),
          "general construction: " + dist.description() + " P=" + vb.function.description()};
}

TransformResult transform_reference(const PolySystemId& sys, int m) {
  const auto law = closed_form_transform(sys, m);
  return {law, nullptr, alpha_closed_form(sys, m).value, m,
          "closed form: " + std::string(poly_family_name(sys.family)) + " m=" + std::to_string(m)};
}

}  // namespace steinbias
