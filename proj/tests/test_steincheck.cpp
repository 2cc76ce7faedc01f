#include <doctest.h>

#include <cmath>
#include <sstream>

#include "steinbias/errors.hpp"
#include "steinbias/steincheck.hpp"

using namespace steinbias;

namespace {

std::vector<double> grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
  return g;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::ConfigInvalid;
}

}  // namespace

TEST_CASE("constant expectation has zero standard error") {
  SampleBatch b;
  b.values = {0.1, -2.0, 3.5, 7.0, 1e3};
  const auto est = mc_expectation([](double) { return 7.0; }, b);
  CHECK(est.mean == 7.0);
  CHECK(est.stderr_ == 0.0);
  CHECK(est.n == 5);
}

TEST_CASE("gaussian monte carlo moments") {
  RandomStream s(31, 0);
  const auto xs = sample(make_distribution(Family::NormalMeanZero, {1.0}), 100000, s);
  const auto id = mc_expectation([](double x) { return x; }, xs);
  CHECK(std::abs(id.mean) <= 4 / std::sqrt(100000.0));
  const auto x4 = mc_expectation([](double x) { return x * x * x * x; }, xs);
  CHECK(std::abs(x4.mean - 3.0) <= 4 * x4.stderr_);
  const auto r = stein_residual(SteinOperator::Classical, monomial(1), xs);
  CHECK(std::abs(r.mean) <= 4 * r.stderr_);
}

TEST_CASE("non-finite integrand is rejected") {
  SampleBatch b;
  b.values = {1.0, 0.0};
  CHECK(code_of([&] { mc_expectation([](double x) { return 1.0 / x; }, b); }) == ErrorCode::NonFiniteValue);
}

TEST_CASE("bank derivatives agree with finite differences") {
  const auto g = grid(-5, 5, 41);
  for (const auto& f : default_bank(false)) {
    INFO(f.id());
    CHECK(derivative_self_test(f, g) <= 1e-6);
  }
  CHECK(code_of([] { indicator(2).derivative(1, 2.0); }) == ErrorCode::NotApplicable);
  CHECK(code_of([] { sine().derivative(9, 0.0); }) == ErrorCode::PreconditionViolated);
  CHECK(indicator(3)(3.0) == 1.0);
  CHECK(indicator(3)(2.0) == 0.0);
  CHECK(monomial(3).forward_difference(3, 1.7) == doctest::Approx(6.0));
}

TEST_CASE("stein operators") {
  CHECK(stein_operator(SteinOperator::Classical, monomial(1), 2.0) == doctest::Approx(-3.0));
  OperatorParams p1;
  p1.m = 1;
  for (double x : grid(-5, 5, 1001)) {
    for (const auto& f : {gaussian_bump(), sine(), monomial(3)}) {
      const double c = stein_operator(SteinOperator::Classical, f, x);
      CHECK(stein_operator(SteinOperator::H1, f, x, p1) == c);
      CHECK(stein_operator(SteinOperator::H2, f, x, p1) == c);
    }
  }
  OperatorParams bin{1, 5, 0.3};
  const auto b = make_distribution(Family::Binomial, {5, 0.3});
  CHECK(std::abs(stein_residual_exact(SteinOperator::BinomialEhm, monomial(1), b, bin)) < 1e-14);
  CHECK(std::abs(stein_residual_exact(SteinOperator::BinomialEhm, indicator(2), b, bin)) < 1e-14);

  OperatorParams bad;
  bad.m = 0;
  CHECK(code_of([&] { stein_operator(SteinOperator::H1, sine(), 0.0, bad); }) == ErrorCode::OperatorParamMismatch);
  bad = {1, 2.5, 0.3};
  CHECK(code_of([&] { stein_operator(SteinOperator::BinomialEhm, sine(), 0.0, bad); }) ==
        ErrorCode::OperatorParamMismatch);
  CHECK(code_of([&] { stein_operator(SteinOperator::Classical, indicator(0), 0.0); }) ==
        ErrorCode::OperatorParamMismatch);
  CHECK(parse_stein_operator("gamma") == SteinOperator::Gamma);
  CHECK(code_of([] { parse_stein_operator("nope"); }) == ErrorCode::OperatorParamMismatch);
}

TEST_CASE("monte carlo residuals vanish under the matching law") {
  RandomStream s(2024, 0);
  const auto xs = sample(make_distribution(Family::NormalMeanZero, {1.0}), 200000, s);
  OperatorParams p2{2, 1, 0.5};
  for (const auto& f : {sine(), gaussian_bump(), monomial(2)}) {
    const auto r = stein_residual(SteinOperator::H2, f, xs, p2);
    CHECK(std::abs(r.mean) <= kZThreshold * r.stderr_ + 1e-12);
  }
  RandomStream t(2024, 1);
  const auto gs = sample(make_distribution(Family::Gamma, {2.5}), 200000, t);
  OperatorParams pg{1, 2.5, 0.5};
  const auto r = stein_residual(SteinOperator::Gamma, gaussian_bump(), gs, pg);
  CHECK(std::abs(r.mean) <= kZThreshold * r.stderr_);
  CHECK(normal_expectation([](double x) { return x * x; }) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("characterization holds for the reference laws") {
  RandomStream s(7, 0);
  const auto normal = make_distribution(Family::NormalMeanZero, {1.0});
  const auto rep = verify_characterization(normal, make_system(PolyFamily::Hermite, 1.0), 1, {monomial(3)}, 100000, s);
  REQUIRE(rep.rows.size() == 1);
  CHECK(rep.rows[0].lhs == doctest::Approx(3.0).epsilon(0.05));
  CHECK(rep.pass());

  RandomStream t(7, 1);
  const auto poisson = make_distribution(Family::Poisson, {2.0});
  const auto prep =
      verify_characterization(poisson, make_system(PolyFamily::Charlier, 2.0), 1, default_bank(true), 10, t);
  CHECK(prep.pass());
  for (const auto& r : prep.rows) {
    INFO(r.function_id);
    CHECK(r.stderr_lhs == 0.0);
    CHECK(std::abs(r.lhs - r.rhs) < 1e-9 * std::max(1.0, std::abs(r.rhs)));
  }

  RandomStream u(7, 2);
  const auto uniform = make_distribution(Family::UniformInterval, {-1.0, 1.0});
  CHECK(code_of([&] {
          verify_characterization(uniform, make_system(PolyFamily::Hermite, 1.0), 2, {sine()}, 100, u);
        }) == ErrorCode::MembershipViolated);

  std::ostringstream os;
  write_verification_csv(os, prep);
  CHECK(os.str().rfind("check_id,family,lambda,p,m,function_id,lhs,rhs,stderr_lhs,stderr_rhs,z,pass\n", 0) == 0);
}

TEST_CASE("gamma transform matches size bias") {
  RandomStream s(11, 0);
  const auto r = gamma_sizebias_equivalence(2.0, 20000, s);
  CHECK(r.ks < r.ks_critical);
  CHECK(r.pass);
}

TEST_CASE("fixed points") {
  RandomStream s(5, 0);
  const auto laplace = make_distribution(Family::Laplace, {1.0});
  CHECK(fixed_point_test(laplace, sign_of_x(), 1, 20000, s).pass);

  RandomStream t(5, 1);
  const auto normal = make_distribution(Family::NormalMeanZero, {1.0});
  CHECK(fixed_point_test(normal, make_system(PolyFamily::Hermite, 1.0), 2, 20000, t).pass);

  RandomStream u(5, 2);
  const auto uniform = make_distribution(Family::UniformInterval, {-1.0, 1.0});
  const auto bad = fixed_point_test(uniform, Poly::x(), 1, 20000, u);
  CHECK_FALSE(bad.pass);
  CHECK(bad.metric == "ks");

  RandomStream v(5, 3);
  const auto poisson = make_distribution(Family::Poisson, {3.0});
  const auto fp = fixed_point_test(poisson, make_system(PolyFamily::Charlier, 3.0), 2, 0, v);
  CHECK(fp.metric == "tv");
  CHECK(fp.pass);
}
