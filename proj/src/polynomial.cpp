#include "steinbias/polynomial.hpp"

#include <cmath>
#include <limits>

namespace steinbias {

namespace {

double cauchy_bound(const Poly& p) {
  const double lead = std::abs(p.leading());
  double bound = 0.0;
  for (int i = 0; i < p.degree(); ++i) bound = std::max(bound, std::abs(p[i]) / lead);
  return 1.0 + bound;
}

double bisect(const Poly& p, double lo, double hi) {
  double flo = p(lo);
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = p(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// All real roots (any multiplicity, deduplicated) of p, ascending.
std::vector<double> real_roots(const Poly& p) {
  if (p.degree() <= 0) return {};
  if (p.degree() == 1) return {-p[0] / p[1]};
  const double bound = cauchy_bound(p);
  std::vector<double> knots{-bound};
  for (double c : real_roots(p.derivative())) {
    if (c > -bound && c < bound) knots.push_back(c);
  }
  knots.push_back(bound);
  std::vector<double> roots;
  const double scale = std::max(1.0, bound);
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double a = knots[i];
    const double b = knots[i + 1];
    const double fa = p(a);
    const double fb = p(b);
    if (fa == 0.0) {
      roots.push_back(a);
    } else if ((fa < 0) != (fb < 0) && fb != 0.0) {
      roots.push_back(bisect(p, a, b));
    }
  }
  if (p(knots.back()) == 0.0) roots.push_back(knots.back());
  std::vector<double> unique;
  for (double r : roots) {
    if (unique.empty() || std::abs(r - unique.back()) > 1e-12 * scale) unique.push_back(r);
  }
  return unique;
}

}  // namespace

std::vector<double> sign_change_roots(const Poly& p) {
  std::vector<double> out;
  const double bound = cauchy_bound(p);
  for (double r : real_roots(p)) {
    // odd multiplicity iff the sign differs on either side
    const double h = 1e-7 * std::max(1.0, std::abs(r)) + 1e-9 * bound;
    const double left = p(r - h);
    const double right = p(r + h);
    if ((left < 0) != (right < 0)) out.push_back(r);
  }
  return out;
}

}  // namespace steinbias
