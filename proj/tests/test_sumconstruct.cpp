#include <doctest.h>

#include <cmath>
#include <sstream>

#include "steinbias/errors.hpp"
#include "steinbias/sumconstruct.hpp"

using namespace steinbias;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an exception");
  return ErrorCode::IoFailure;
}

double prob_of(const IndexDistribution& d, const MultiIndex& idx) {
  for (std::size_t i = 0; i < d.compositions.size(); ++i) {
    if (d.compositions[i] == idx) return d.probs[i];
  }
  FAIL("composition not found");
  return -1;
}

}  // namespace

TEST_CASE("multi-index enumeration") {
  CHECK(enumerate_multi_indices(2, 2) == std::vector<MultiIndex>{{2, 0}, {1, 1}, {0, 2}});
  CHECK(enumerate_multi_indices(3, 0) == std::vector<MultiIndex>{{0, 0, 0}});
  CHECK(enumerate_multi_indices(1, 5) == std::vector<MultiIndex>{{5}});
  CHECK(enumerate_multi_indices(4, 6).size() == 84);
  CHECK(code_of([] { enumerate_multi_indices(100, 10); }) == ErrorCode::SizeOverflow);
}

TEST_CASE("index laws") {
  const auto h1 = index_distribution(PolyFamily::Hermite, {1, 1}, 1);
  CHECK(prob_of(h1, {1, 0}) == doctest::Approx(0.5));

  const auto h = index_distribution(PolyFamily::Hermite, {1, 2}, 2);
  REQUIRE(h.exact);
  CHECK((*h.exact)[0] == Rational(1, 9));
  CHECK((*h.exact)[1] == Rational(4, 9));
  CHECK((*h.exact)[2] == Rational(4, 9));

  const auto k = index_distribution(PolyFamily::Krawtchouk, {2, 3}, 2, 0.5);
  CHECK(prob_of(k, {1, 1}) == doctest::Approx(0.6));
  const auto k0 = index_distribution(PolyFamily::Krawtchouk, {1, 3}, 2, 0.3);
  CHECK(prob_of(k0, {2, 0}) == 0.0);

  for (auto fam : {PolyFamily::Hermite, PolyFamily::Laguerre, PolyFamily::Charlier, PolyFamily::Krawtchouk}) {
    for (int m = 0; m <= 4; ++m) {
      const auto d = index_distribution(fam, {1, 2, 3}, m, 0.25);
      CHECK(d.closed_form_agrees);
      REQUIRE(d.exact);
      Rational total(0);
      for (const auto& v : *d.exact) {
        CHECK(v >= 0);
        total += v;
      }
      CHECK(total == 1);
    }
  }
  const auto irr = index_distribution(PolyFamily::Laguerre, {std::sqrt(2.0), 0.7}, 3);
  CHECK_FALSE(irr.exact);
  CHECK(irr.closed_form_agrees);

  CHECK(code_of([] { index_distribution(PolyFamily::Gegenbauer, {1, 1}, 1); }) == ErrorCode::FamilyNotClosed);

  std::ostringstream os;
  write_index_csv(os, h);
  CHECK(os.str().find("1;1,0.44444444444444442,4/9") != std::string::npos);
}

TEST_CASE("alpha identities") {
  const auto r = verify_alpha_identity(PolyFamily::Hermite, {1, 2}, 2);
  CHECK(r.exact);
  CHECK(r.linear == 0.0);
  CHECK(r.squared == 0.0);
  const auto k = verify_alpha_identity(PolyFamily::Krawtchouk, {4, 4}, 3, 0.5);
  CHECK(k.linear < 1e-12);
  CHECK(k.squared < 1e-12);
  const auto f = verify_alpha_identity(PolyFamily::Laguerre, {std::sqrt(3.0), 0.1, 2.2}, 4);
  CHECK_FALSE(f.exact);
  CHECK(f.linear < 1e-10);
  CHECK(f.squared < 1e-10);
  const auto one = verify_alpha_identity(PolyFamily::Charlier, {2.5}, 3);
  CHECK(one.linear == 0.0);
  CHECK(code_of([] { verify_alpha_identity(PolyFamily::Gegenbauer, {1}, 1); }) == ErrorCode::FamilyNotClosed);
}

TEST_CASE("Gauss atoms match the reference moments") {
  const auto sys = make_system(PolyFamily::Hermite, 2.0);
  const auto g = gauss_atoms(sys, 2);
  REQUIRE(g.atoms().size() == 3);
  CHECK(g.atoms()[0].x == doctest::Approx(-std::sqrt(6.0)));
  CHECK(g.atoms()[0].w == doctest::Approx(1.0 / 6));
  CHECK(g.atoms()[1].w == doctest::Approx(2.0 / 3));
  for (int j = 1; j <= 5; ++j) {
    CHECK(analytic_moment(g, j) == doctest::Approx(analytic_moment(reference_distribution(sys), j)).scale(1.0));
  }
  const auto lag = gauss_atoms(make_system(PolyFamily::Laguerre, 1.5), 3);
  for (int j = 1; j <= 7; ++j) {
    CHECK(analytic_moment(lag, j) == doctest::Approx(analytic_moment(make_distribution(Family::Gamma, {1.5}), j)));
  }
}

TEST_CASE("membership is enforced") {
  const auto n2 = make_distribution(Family::NormalMeanZero, {2.0});
  try {
    make_summand_set(PolyFamily::Hermite, {make_distribution(Family::NormalMeanZero, {1.0}), n2}, {1.0, 1.0}, 1);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MembershipViolated);
    CHECK(e.index() == 1);
  }
  // Rademacher lies in M^1 for Hermite(1) but not in M^2.
  const auto rad = make_atoms(std::vector<double>{-1, 1}, std::vector<double>{0.5, 0.5});
  CHECK_NOTHROW(make_summand_set(PolyFamily::Hermite, {rad}, {1.0}, 1));
  CHECK(code_of([&] { make_summand_set(PolyFamily::Hermite, {rad}, {1.0}, 2); }) == ErrorCode::MembershipViolated);
}

TEST_CASE("sum construction matches the direct transform") {
  constexpr std::size_t n = 20000;
  RandomStream rs(99, 0);
  const double crit = ks_critical_two_sample(n, n);

  SUBCASE("single summand") {
    const auto g = gauss_atoms(make_system(PolyFamily::Hermite, 1.0), 2);
    const auto set = make_summand_set(PolyFamily::Hermite, {g}, {1.0}, 2);
    RandomStream other(100, 0);
    CHECK(ks_statistic(sample_sum_transformed(set, n, rs).values, sample_direct_transform(set, n, other).values) <
          crit);
  }
  SUBCASE("three normals, zero bias") {
    std::vector<DistributionSpec> ds;
    for (double l : {0.5, 1.0, 2.5}) ds.push_back(make_distribution(Family::NormalMeanZero, {l}));
    const auto set = make_summand_set(PolyFamily::Hermite, ds, {0.5, 1.0, 2.5}, 1);
    const auto w = sample_sum_transformed(set, n, rs);
    const auto target = make_distribution(Family::NormalMeanZero, {4.0});
    CHECK(ks_statistic([&](double x) { return cdf(target, x); }, w.values) < ks_critical_one_sample(n));
  }
  SUBCASE("three Poisson summands, Charlier m = 2") {
    std::vector<DistributionSpec> ds;
    for (double l : {0.5, 1.0, 1.5}) ds.push_back(make_distribution(Family::Poisson, {l}));
    const auto set = make_summand_set(PolyFamily::Charlier, ds, {0.5, 1.0, 1.5}, 2);
    const auto w = sample_sum_transformed(set, n, rs);
    const auto pmf = discrete_transform_pmf(make_distribution(Family::Poisson, {3.0}),
                                            system_bias(make_system(PolyFamily::Charlier, 3.0), 2).function, 2,
                                            alpha_closed_form(make_system(PolyFamily::Charlier, 3.0), 2).value);
    const PmfSampler direct(pmf);
    std::vector<double> d(n);
    for (auto& x : d) x = direct.draw(rs);
    CHECK(ks_statistic(w.values, d) < crit);
  }
  SUBCASE("Gauss atom summands use the general construction") {
    const auto sys = make_system(PolyFamily::Hermite, 1.0);
    const auto g = gauss_atoms(sys, 2);
    const auto set = make_summand_set(PolyFamily::Hermite, {g, g, g}, {1.0, 1.0, 1.0}, 2);
    RandomStream other(4, 4);
    CHECK(ks_statistic(sample_sum_transformed(set, n, rs).values, sample_direct_transform(set, n, other).values) <
          crit);
  }
  SUBCASE("binomial summands with a Krawtchouk infeasible composition") {
    const std::vector<DistributionSpec> ds{make_distribution(Family::Binomial, {1, 0.4}),
                                           make_distribution(Family::Binomial, {3, 0.4})};
    const auto set = make_summand_set(PolyFamily::Krawtchouk, ds, {1, 3}, 2, 0.4);
    const auto w = sample_sum_transformed(set, n, rs);
    const auto target = make_distribution(Family::Binomial, {2, 0.4});
    // Discrete: compare frequencies directly.
    std::vector<double> freq(3, 0.0);
    for (double x : w.values) freq[static_cast<int>(x)] += 1.0 / n;
    for (int k = 0; k <= 2; ++k) CHECK(std::abs(freq[k] - pmf(target, k)) < 4 * std::sqrt(0.25 / n));
  }
}

TEST_CASE("index frequencies") {
  const auto law = index_distribution(PolyFamily::Laguerre, {0.5, 1.0, 2.0}, 3);
  RandomStream rs(5, 2);
  constexpr std::size_t n = 200000;
  const auto picks = sample_indices(law, n, rs);
  std::vector<double> freq(law.probs.size(), 0.0);
  for (auto i : picks) freq[i] += 1.0;
  for (std::size_t i = 0; i < freq.size(); ++i) {
    const double p = law.probs[i];
    CHECK(std::abs(freq[i] / n - p) <= 4 * std::sqrt(p * (1 - p) / n) + 1e-12);
  }
}

TEST_CASE("iterated biasing") {
  RandomStream rs(8, 1);
  const auto h = iterated_bias_check(make_system(PolyFamily::Hermite, 1.0), 3, 2, 1, 50000, rs);
  CHECK(h.moments_match);
  CHECK(h.eligible);
  CHECK(h.rows.size() == 2);
  const auto g = iterated_bias_check(make_system(PolyFamily::Laguerre, 2.0), 3, 1, 0, 50000, rs);
  CHECK(g.mu == 3.0);
  CHECK(g.rows.size() == 4);
  CHECK(g.moments_match);
  const auto c = iterated_bias_check(make_system(PolyFamily::Charlier, 2.0), 3, 1, 1, 50000, rs);
  CHECK(c.moments_match);
  const auto k = iterated_bias_check(make_system(PolyFamily::Krawtchouk, 5, 0.3), 3, 2, 0, 50000, rs);
  CHECK(k.mu == 3.0);
  CHECK(k.moments_match);
  CHECK(code_of([&] { iterated_bias_check(make_system(PolyFamily::Hermite, 1.0), 3, 2, 2, 100, rs); }) ==
        ErrorCode::OrderViolated);
}
