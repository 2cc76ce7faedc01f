#include <doctest.h>

#include <cmath>
#include <sstream>

#include "steinbias/distributions.hpp"
#include "steinbias/errors.hpp"
#include "steinbias/polynomial.hpp"
#include "steinbias/random_stream.hpp"

using namespace steinbias;

TEST_CASE("rational conversion round-trips decimal literals") {
  CHECK(to_rational(0.3) == Rational(3, 10));
  CHECK(to_rational(2.5) == Rational(5, 2));
  CHECK(has_small_rational(0.25));
  CHECK_FALSE(has_small_rational(std::sqrt(2.0)));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(make_distribution(Family::NormalMeanZero, {-1.0}), Error);
  CHECK_THROWS_AS(make_distribution(Family::Binomial, {3.5, 0.5}), Error);
  CHECK_THROWS_AS(make_distribution(Family::Binomial, {3, 1.5}), Error);
  CHECK_THROWS_AS(make_distribution(Family::GegenbauerBeta, {-0.5}), Error);
  try {
    make_distribution(Family::Gamma, {0.0});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParameterOutOfRange);
  }
}

TEST_CASE("atoms are merged and normalized") {
  const double pts[] = {1.0, -1.0, 1.0};
  const double w[] = {1.0, 2.0, 1.0};
  const auto d = make_atoms(pts, w);
  REQUIRE(d.atoms().size() == 2);
  CHECK(d.atoms()[0].x == -1.0);
  CHECK(d.atoms()[0].w == doctest::Approx(0.5));
  CHECK(mean(d) == doctest::Approx(0.0));
}

TEST_CASE("analytic moments") {
  const auto n = make_distribution(Family::NormalMeanZero, {2.0});
  CHECK(analytic_moment(n, 4) == doctest::Approx(12.0));
  CHECK(analytic_moment(n, 3) == 0.0);
  const auto g = make_distribution(Family::Gamma, {3.0});
  CHECK(analytic_moment(g, 2) == doctest::Approx(12.0));
  const auto p = make_distribution(Family::Poisson, {1.0});
  CHECK(analytic_moment_exact(p, 4) == Rational(15));
  const auto b = make_distribution(Family::Binomial, {4.0, 0.5});
  CHECK(variance(b) == doctest::Approx(1.0));
  const auto u = make_distribution(Family::GegenbauerBeta, {0.5});
  CHECK(analytic_moment(u, 2) == doctest::Approx(1.0 / 3.0));
  const auto a = make_distribution(Family::Arcsine, {});
  CHECK(analytic_moment(a, 2) == doctest::Approx(0.5));
  const auto s = make_distribution(Family::Semicircle, {});
  CHECK(analytic_moment(s, 4) == doctest::Approx(0.125));
}

TEST_CASE("quadrature expectations match moments") {
  for (auto d : {make_distribution(Family::NormalMeanZero, {1.5}), make_distribution(Family::Gamma, {0.5}),
                 make_distribution(Family::GegenbauerBeta, {0.0}), make_distribution(Family::GegenbauerBeta, {2.0}),
                 make_distribution(Family::Laplace, {1.0}), make_distribution(Family::Poisson, {3.0})}) {
    for (int k = 0; k <= 6; ++k) {
      const double q = expect(d, [k](double x) { return std::pow(x, k); });
      CHECK(q == doctest::Approx(analytic_moment(d, k)).epsilon(1e-9));
    }
  }
}

TEST_CASE("evaluate rejects the wrong kind") {
  const auto p = make_distribution(Family::Poisson, {2.0});
  CHECK_THROWS_AS(density(p, 1.0), Error);
  CHECK(pmf(p, 0.0) == doctest::Approx(std::exp(-2.0)));
  const auto n = make_distribution(Family::NormalMeanZero, {1.0});
  CHECK_THROWS_AS(pmf(n, 0.0), Error);
  CHECK(cdf(n, 0.0) == doctest::Approx(0.5));
}

TEST_CASE("samplers agree with their cdf") {
  RandomStream rs(7, 0);
  for (auto d : {make_distribution(Family::NormalMeanZero, {2.0}), make_distribution(Family::Gamma, {0.7}),
                 make_distribution(Family::GegenbauerBeta, {0.0}), make_distribution(Family::GegenbauerBeta, {1.3}),
                 make_distribution(Family::Laplace, {2.0}), make_distribution(Family::Semicircle, {})}) {
    const auto batch = sample(d, 20000, rs);
    const double ks = ks_statistic([&](double x) { return cdf(d, x); }, batch.values);
    CHECK(ks < ks_critical_one_sample(batch.values.size()));
  }
}

TEST_CASE("sampling is reproducible per stream") {
  const auto d = make_distribution(Family::Poisson, {2.0});
  RandomStream a(11, 3), b(11, 3), c(11, 4);
  const auto sa = sample(d, 100, a).values;
  CHECK(sa == sample(d, 100, b).values);
  CHECK(sa != sample(d, 100, c).values);
  CHECK_THROWS_AS(sample(d, 0, a), Error);
}

TEST_CASE("sample csv round trip") {
  const auto d = make_distribution(Family::Gamma, {2.0});
  RandomStream rs(5, 1);
  const auto batch = sample(d, 50, rs);
  std::stringstream ss;
  write_sample_csv(ss, batch);
  const auto back = read_sample_csv(ss);
  CHECK(back.values == batch.values);
  CHECK(back.seed == 5);
}

TEST_CASE("sign change roots skip even multiplicities") {
  const Poly p = from_roots<double>({1.0, 1.0, -2.0, 3.0});
  const auto r = sign_change_roots(p);
  REQUIRE(r.size() == 2);
  CHECK(r[0] == doctest::Approx(-2.0));
  CHECK(r[1] == doctest::Approx(3.0));
}
