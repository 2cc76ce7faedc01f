#include <doctest.h>

#include <cmath>

#include "steinbias/errors.hpp"
#include "steinbias/orthopoly.hpp"

using namespace steinbias;

namespace {
void check_coeffs(const Poly& p, std::vector<double> expected) {
  REQUIRE(p.degree() + 1 == static_cast<int>(expected.size()));
  for (std::size_t i = 0; i < expected.size(); ++i) CHECK(p[i] == doctest::Approx(expected[i]).epsilon(1e-12));
}
}  // namespace

TEST_CASE("known low-degree polynomials") {
  check_coeffs(poly_coeffs(make_system(PolyFamily::Charlier, 1.0), 2), {1, -3, 1});
  check_coeffs(poly_coeffs(make_system(PolyFamily::Hermite, 1.0), 3), {0, -3, 0, 1});
  check_coeffs(poly_coeffs(make_system(PolyFamily::Laguerre, 1.0), 2), {2, -4, 1});
  check_coeffs(poly_coeffs(make_system(PolyFamily::Gegenbauer, 0.5), 2), {-1.0 / 3.0, 0, 1});
  check_coeffs(poly_coeffs(make_system(PolyFamily::Krawtchouk, 4.0, 0.5), 1), {-2, 1});
}

TEST_CASE("recurrence and expansion agree") {
  for (auto sys : {make_system(PolyFamily::Hermite, 1.7), make_system(PolyFamily::Laguerre, 0.3),
                   make_system(PolyFamily::Charlier, 2.2), make_system(PolyFamily::Krawtchouk, 9, 0.3),
                   make_system(PolyFamily::Gegenbauer, 0.0), make_system(PolyFamily::Gegenbauer, 1.4)}) {
    for (int m = 0; m <= 8; ++m) {
      const Poly a = poly_coeffs_recurrence(sys, m);
      const Poly b = poly_coeffs_expansion(sys, m);
      REQUIRE(a.degree() == m);
      CHECK(a.is_monic());
      for (int i = 0; i <= m; ++i) {
        CHECK(std::abs(a[i] - b[i]) <= 1e-9 * std::max(1.0, std::abs(a[i])));
      }
    }
  }
}

TEST_CASE("alpha closed forms") {
  CHECK(alpha_closed_form(make_system(PolyFamily::Krawtchouk, 4, 0.5), 2).value == doctest::Approx(0.75));
  CHECK(alpha_closed_form(make_system(PolyFamily::Laguerre, 2.0), 3).value == doctest::Approx(24.0));
  CHECK(alpha_exact(make_system(PolyFamily::Hermite, 0.5), 3) == Rational(1, 8));
  for (double lam : {0.0, 0.5, 1.0, 2.5}) {
    CHECK(alpha_closed_form(make_system(PolyFamily::Gegenbauer, lam), 1).value ==
          doctest::Approx(1.0 / (2.0 * (lam + 1.0))));
  }
}

TEST_CASE("alpha numeric agrees with closed form") {
  for (auto sys : {make_system(PolyFamily::Hermite, 2.0), make_system(PolyFamily::Laguerre, 1.5),
                   make_system(PolyFamily::Charlier, 0.8), make_system(PolyFamily::Krawtchouk, 6, 0.25),
                   make_system(PolyFamily::Gegenbauer, 0.0), make_system(PolyFamily::Gegenbauer, 3.0)}) {
    for (int m = 0; m <= 5; ++m) {
      const double c = alpha_closed_form(sys, m).value;
      CHECK(std::abs(alpha_numeric(sys, m) - c) <= 1e-8 * std::max(1.0, c));
    }
  }
}

TEST_CASE("Gram-Schmidt reproduces the classical families") {
  check_coeffs(orthopoly_from_moments(make_distribution(Family::Poisson, {1.0}), 2), {1, -3, 1});
  for (auto sys : {make_system(PolyFamily::Hermite, 1.0), make_system(PolyFamily::Laguerre, 2.0),
                   make_system(PolyFamily::Krawtchouk, 5, 0.5), make_system(PolyFamily::Gegenbauer, 1.0)}) {
    for (int m = 1; m <= 5; ++m) {
      const Poly a = orthopoly_from_moments(reference_distribution(sys), m);
      const Poly b = poly_coeffs(sys, m);
      for (int i = 0; i <= m; ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-10 * std::max(1.0, std::abs(b[i])));
    }
  }
}

TEST_CASE("singular moment matrix") {
  const double pts[] = {-1.0, 1.0};
  const double w[] = {0.5, 0.5};
  try {
    orthopoly_from_moments(make_atoms(pts, w), 3);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularMomentMatrix);
  }
}

TEST_CASE("Krawtchouk degree bound") {
  try {
    poly_coeffs(make_system(PolyFamily::Krawtchouk, 3, 0.5), 4);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegreeTooLarge);
  }
  CHECK_THROWS_AS(make_system(PolyFamily::Krawtchouk, 2.5, 0.5), Error);
  CHECK_THROWS_AS(make_system(PolyFamily::Gegenbauer, -0.5), Error);
}

TEST_CASE("orthogonality residuals are small") {
  for (auto sys : {make_system(PolyFamily::Hermite, 1.0), make_system(PolyFamily::Laguerre, 0.5),
                   make_system(PolyFamily::Charlier, 2.0), make_system(PolyFamily::Krawtchouk, 10, 0.4),
                   make_system(PolyFamily::Gegenbauer, 0.0), make_system(PolyFamily::Gegenbauer, 2.0)}) {
    CHECK(orthogonality_residuals(sys, 8).max_relative() < 1e-8);
  }
  CHECK_THROWS_AS(orthogonality_residuals(make_system(PolyFamily::Hermite, 1.0), 9), Error);
}

TEST_CASE("generating function checks") {
  const std::vector<double> xs{0.0, 1.0, 2.0, 3.0};
  const std::vector<double> ts{-0.1, 0.05, 0.1};
  for (auto sys : {make_system(PolyFamily::Hermite, 1.0), make_system(PolyFamily::Laguerre, 2.0),
                   make_system(PolyFamily::Charlier, 1.5), make_system(PolyFamily::Krawtchouk, 6, 0.3)}) {
    const auto r = gen_fn_checks(sys, xs, ts, 3);
    CHECK(r.pass());
    for (const auto& row : r.rows) CHECK(row.status == CheckStatus::Pass);
  }
  const auto g = gen_fn_checks(make_system(PolyFamily::Gegenbauer, 1.0), {0.5}, {0.1}, 2);
  CHECK(g.pass());
  int na = 0;
  for (const auto& row : g.rows) na += row.status == CheckStatus::NotApplicable;
  CHECK(na == 2);
  CHECK_THROWS_AS(gen_fn_checks(make_system(PolyFamily::Hermite, 1.0), xs, {0.3}, 2), Error);
  // Order 12 is too short for Laguerre at |t| = 0.2.
  CHECK_THROWS_AS(gen_fn_checks(make_system(PolyFamily::Laguerre, 2.0), {0.0}, {0.2}, 2), Error);
  CHECK(gen_fn_checks(make_system(PolyFamily::Hermite, 1.0), xs, {-0.2, 0.2}, 2).pass());
  CHECK_THROWS_AS(generating_function(make_system(PolyFamily::Gegenbauer, 1.0), 0.1, 0.1), Error);
}
