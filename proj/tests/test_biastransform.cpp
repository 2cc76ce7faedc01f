#include <doctest.h>

#include <cmath>

#include "steinbias/biastransform.hpp"
#include "steinbias/errors.hpp"

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

DistributionSpec atoms(std::vector<double> x, std::vector<double> w) { return make_atoms(x, w); }

double ks_vs(const DistributionSpec& law, const std::vector<double>& xs) {
  return ks_statistic([&](double x) { return cdf(law, x); }, xs);
}

}  // namespace

TEST_CASE("validation of biasing functions") {
  const auto n2 = make_distribution(Family::NormalMeanZero, {2.0});
  const auto vb = make_biasing_function(n2, Poly::x(), 1);
  CHECK(vb.alpha == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(vb.function.roots().size() == 1);

  const auto lap = make_distribution(Family::Laplace, {1.0});
  const auto sb = make_biasing_function(lap, sign_of_x(), 1);
  CHECK(sb.alpha == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(sb.function.roots()[0] == 0.0);

  const auto n1 = make_distribution(Family::NormalMeanZero, {1.0});
  CHECK(code_of([&] { make_biasing_function(n1, Poly::x(), 2); }) == ErrorCode::SignStructureMismatch);

  const auto skew = atoms({-2, 0, 2}, {0.3, 0.2, 0.5});
  const auto band = sign_function({-1.0, 1.0}, {-1, 0, 1});
  try {
    make_biasing_function(skew, band, 1);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OrthogonalityViolated);
    CHECK(e.index() == 0);
  }

  // -x is negative on the right.
  CHECK(code_of([&] { make_biasing_function(n1, Poly::x() * -1.0, 1); }) == ErrorCode::SignStructureMismatch);
  // x^2 - 1 has the right sign structure but is not orthogonal to 1 under N(0,2).
  CHECK(code_of([&] { make_biasing_function(n2, from_roots<double>({-1.0, 1.0}), 2); }) ==
        ErrorCode::OrthogonalityViolated);
  // x^2 + 1 > 0 with m = 0 under a symmetric law: alpha is fine, but -(x^2+1) is not.
  CHECK(code_of([&] { make_biasing_function(n1, Poly::constant(-1.0), 0); }) == ErrorCode::SignStructureMismatch);
}

TEST_CASE("zero intervals use the midpoint and accept other representatives") {
  const auto bf = locate_sign_structure(sign_function({-1.0, 1.0}, {-1, 0, 1}));
  REQUIRE(bf.order() == 1);
  CHECK(bf.roots()[0] == 0.0);
  CHECK(bf.root_intervals()[0].first == -1.0);
  CHECK(bf.with_roots({0.5}).roots()[0] == 0.5);
  CHECK(code_of([&] { (void)bf.with_roots({1.5}); }) == ErrorCode::SignStructureMismatch);
}

TEST_CASE("callable with declared intervals") {
  const CallableFunction cube{[](double x) { return x * x * x; }, {{-0.5, 0.5}}, "x^3"};
  const auto bf = locate_sign_structure(cube);
  REQUIRE(bf.order() == 1);
  CHECK(std::abs(bf.roots()[0]) < 1e-12);
  const auto n1 = make_distribution(Family::NormalMeanZero, {1.0});
  const auto vb = make_biasing_function(n1, cube, 1);
  CHECK(vb.alpha == doctest::Approx(3.0).epsilon(1e-9));
  const CallableFunction wrong{[](double x) { return x * x * x; }, {}, "x^3"};
  CHECK(code_of([&] { make_biasing_function(n1, wrong, 1); }) == ErrorCode::SignStructureMismatch);
}

TEST_CASE("combine_transform") {
  const double roots[] = {1.0, -2.0};
  const double u[] = {0.5, 0.25};
  // r2 + U2 (r1 - r2) + U2 U1 (Y - r1)
  CHECK(combine_transform(3.0, roots, u) == doctest::Approx(-2.0 + 0.25 * 3.0 + 0.125 * 2.0));
  CHECK(combine_transform(3.0, {}, {}) == 3.0);
}

TEST_CASE("samplers reproduce the documented examples") {
  RandomStream rs(2024, 1);
  constexpr std::size_t n = 20000;
  const double crit = ks_critical_one_sample(n);

  SUBCASE("m = 0 size bias of a gamma law") {
    const auto g = make_distribution(Family::Gamma, {1.5});
    const CallableFunction plus{[](double x) { return std::max(x, 0.0); }, {}, "x+"};
    const auto vb = make_biasing_function(g, plus, 0);
    const auto batch = sample_transformed(g, vb.function, vb.alpha, n, rs);
    CHECK(ks_vs(make_distribution(Family::Gamma, {2.5}), batch.values) < crit);
  }
  SUBCASE("two atoms give the uniform law") {
    const auto d = atoms({-1, 1}, {0.5, 0.5});
    const auto vb = make_biasing_function(d, Poly::x(), 1);
    const auto batch = sample_transformed(d, vb.function, vb.alpha, n, rs);
    CHECK(ks_vs(make_distribution(Family::UniformInterval, {-1, 1}), batch.values) < crit);
  }
  SUBCASE("Laplace is fixed by the sign function") {
    const auto lap = make_distribution(Family::Laplace, {1.0});
    const auto vb = make_biasing_function(lap, sign_of_x(), 1);
    const TransformSampler s(lap, vb.function, vb.alpha);
    CHECK(s.y_method() == "rejection");
    CHECK(ks_vs(lap, s.sample(n, rs).values) < crit);
  }
  SUBCASE("Hermite m = 3 needs the grid sampler") {
    const auto sys = make_system(PolyFamily::Hermite, 1.0);
    const auto vb = system_bias(sys, 3);
    const TransformSampler s(reference_distribution(sys), vb.function, vb.alpha);
    CHECK(s.y_method() == "grid");
    CHECK(ks_vs(closed_form_transform(sys, 3), s.sample(n, rs).values) < crit);
  }
  SUBCASE("arcsine to semicircle") {
    const auto sys = make_system(PolyFamily::Gegenbauer, 0.0);
    const auto vb = system_bias(sys, 1);
    const auto batch = sample_transformed(reference_distribution(sys), vb.function, vb.alpha, n, rs);
    CHECK(ks_vs(make_distribution(Family::Semicircle, {}), batch.values) < crit);
  }
  SUBCASE("Laguerre m = 2 shifts the shape") {
    const auto sys = make_system(PolyFamily::Laguerre, 0.5);
    const auto vb = system_bias(sys, 2);
    const TransformSampler s(reference_distribution(sys), vb.function, vb.alpha);
    CHECK(s.y_method() == "grid");
    CHECK(ks_vs(make_distribution(Family::Gamma, {2.5}), s.sample(n, rs).values) < crit);
  }
  SUBCASE("rejection and grid agree where both are cheap") {
    const auto sys = make_system(PolyFamily::Gegenbauer, 2.0);
    const auto vb = system_bias(sys, 1);
    const auto target = closed_form_transform(sys, 1);
    for (auto mode : {YSamplerMode::Grid, YSamplerMode::Rejection}) {
      const TransformSampler s(reference_distribution(sys), vb.function, vb.alpha, mode);
      CHECK(ks_vs(target, s.sample(n, rs).values) < crit);
    }
  }
}

TEST_CASE("m = 1 density formula") {
  const auto rad = atoms({-1, 1}, {0.5, 0.5});
  const auto bf = locate_sign_structure(Poly::x());
  CHECK(density_order_one(rad, bf, 1.0, 0.0) == doctest::Approx(0.5));
  CHECK(density_order_one(rad, bf, 1.0, 1.5) == 0.0);
  CHECK(density_order_one(rad, bf, 1.0, -1.5) == 0.0);

  const auto lap = make_distribution(Family::Laplace, {1.0});
  const auto sb = locate_sign_structure(sign_of_x());
  CHECK(density_order_one(lap, sb, 1.0, 1.0) == doctest::Approx(std::exp(-1.0) / 2).epsilon(1e-10));

  const auto g = make_distribution(Family::Gamma, {2.0});
  const auto vb = make_biasing_function(g, from_roots<double>({2.0}), 1);
  const double total = expect_between(
      make_distribution(Family::UniformInterval, {0.0, 60.0}),
      [&](double x) { return 60.0 * density_order_one(g, vb.function, vb.alpha, x); }, 0.0, 60.0);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("discrete transforms") {
  for (double lam : {0.5, 3.0, 12.0}) {
    const auto sys = make_system(PolyFamily::Charlier, lam);
    for (int m = 1; m <= 3; ++m) {
      const auto vb = system_bias(sys, m);
      const auto q = discrete_transform_pmf(reference_distribution(sys), vb.function, m, vb.alpha);
      CHECK(total_variation(q, pmf_of(closed_form_transform(sys, m))) < 1e-10);
    }
  }
  const auto k3 = make_system(PolyFamily::Krawtchouk, 3, 0.5);
  const auto vb = system_bias(k3, 1);
  const auto q = discrete_transform_pmf(reference_distribution(k3), vb.function, 1, vb.alpha);
  REQUIRE(q.probs.size() == 3);
  CHECK(q.probs[0] == doctest::Approx(0.25));
  CHECK(q.probs[1] == doctest::Approx(0.5));
  CHECK(q.probs[2] == doctest::Approx(0.25));

  const auto k4 = make_system(PolyFamily::Krawtchouk, 4, 0.3);
  const auto top = system_bias(k4, 4);
  const auto point = discrete_transform_pmf(reference_distribution(k4), top.function, 4, top.alpha);
  REQUIRE(point.probs.size() == 1);
  CHECK(point.points[0] == 0);
  CHECK(point.probs[0] == doctest::Approx(1.0));

  // x - 1 under Poisson(2) is not orthogonal to constants: the solution leaks.
  const auto pois = make_distribution(Family::Poisson, {2.0});
  const auto bad = locate_sign_structure(from_roots<double>({1.0}));
  CHECK(code_of([&] { discrete_transform_pmf(pois, bad, 1, 1.0); }) == ErrorCode::SingularSystem);
}

TEST_CASE("closed-form transforms") {
  CHECK(closed_form_transform(make_system(PolyFamily::Hermite, 2.0), 5) ==
        make_distribution(Family::NormalMeanZero, {2.0}));
  CHECK(closed_form_transform(make_system(PolyFamily::Gegenbauer, 0.0), 1).family() == Family::Semicircle);
  CHECK(closed_form_transform(make_system(PolyFamily::Laguerre, 1.5), 2) == make_distribution(Family::Gamma, {3.5}));
  CHECK(closed_form_transform(make_system(PolyFamily::Krawtchouk, 5, 0.2), 2) ==
        make_distribution(Family::Binomial, {3.0, 0.2}));
  CHECK(code_of([&] { closed_form_transform(make_system(PolyFamily::Krawtchouk, 2, 0.2), 3); }) ==
        ErrorCode::DegreeTooLarge);
}

TEST_CASE("size and zero bias") {
  RandomStream rs(77, 0);
  constexpr std::size_t n = 20000;
  const auto sz = classic_bias(make_distribution(Family::Gamma, {2.0}), ClassicBias::Size, n, rs);
  CHECK(ks_vs(make_distribution(Family::Gamma, {3.0}), sz.values) < ks_critical_one_sample(n));
  const auto nl = make_distribution(Family::NormalMeanZero, {3.0});
  const auto zb = classic_bias(nl, ClassicBias::Zero, n, rs);
  CHECK(ks_vs(nl, zb.values) < ks_critical_one_sample(n));
  CHECK(code_of([&] { classic_bias(make_distribution(Family::NormalMeanZero, {1.0}), ClassicBias::Size, 10, rs); }) ==
        ErrorCode::PreconditionViolated);
  CHECK(code_of([&] { classic_bias(make_distribution(Family::Gamma, {1.0}), ClassicBias::Zero, 10, rs); }) ==
        ErrorCode::PreconditionViolated);
}
