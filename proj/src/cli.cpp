#include "steinbias/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "steinbias/biastransform.hpp"
#include "steinbias/errors.hpp"
#include "steinbias/steincheck.hpp"
#include "steinbias/sumconstruct.hpp"

namespace steinbias {

namespace {

using nlohmann::json;

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

PolyFamily poly_family_from(std::string_view name, const std::string& field) {
  for (auto f : {PolyFamily::Hermite, PolyFamily::Laguerre, PolyFamily::Charlier, PolyFamily::Krawtchouk,
                 PolyFamily::Gegenbauer}) {
    if (iequals(poly_family_name(f), name)) return f;
  }
  fail(ErrorCode::ConfigInvalid, field + ": unknown polynomial family '" + std::string(name) + "'");
}

Family family_from(std::string_view name, const std::string& field) {
  for (auto f : {Family::NormalMeanZero, Family::Gamma, Family::Poisson, Family::Binomial, Family::GegenbauerBeta,
                 Family::Laplace, Family::UniformInterval, Family::Arcsine, Family::Semicircle,
                 Family::EmpiricalAtoms}) {
    if (iequals(family_name(f), name)) return f;
  }
  fail(ErrorCode::ConfigInvalid, field + ": unknown distribution family '" + std::string(name) + "'");
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string short_fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

[[noreturn]] void invalid(const std::string& field, const std::string& why) {
  fail(ErrorCode::ConfigInvalid, "field '" + field + "': " + why);
}

void check_keys(const json& j, const std::string& where, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) invalid(where, "expected an object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) invalid(where + "." + key, "unknown key");
  }
}

template <class T>
T get(const json& j, const std::string& field) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    invalid(field, e.what());
  }
}

PolySystemId system_from(PolyFamily f, double lambda, double p, const std::string& field) {
  try {
    return make_system(f, lambda, p);
  } catch (const Error& e) {
    invalid(field, e.message());
  }
}

DistributionSpec distribution_from(const json& j, const std::string& field) {
  check_keys(j, field, {"family", "params"});
  if (!j.contains("family")) invalid(field + ".family", "missing");
  const auto fam = family_from(get<std::string>(j["family"], field + ".family"), field + ".family");
  std::vector<double> params;
  if (j.contains("params")) params = get<std::vector<double>>(j["params"], field + ".params");
  try {
    return make_distribution(fam, params);
  } catch (const Error& e) {
    invalid(field, e.message());
  }
}

std::string system_inputs(const PolySystemId& s) {
  std::string out = "family=" + std::string(poly_family_name(s.family)) + " lambda=" + short_fmt(s.lambda);
  if (s.family == PolyFamily::Krawtchouk) out += " p=" + short_fmt(s.p);
  return out;
}

std::string system_tag(const PolySystemId& s) {
  std::string out = std::string(poly_family_name(s.family)) + "/lambda=" + short_fmt(s.lambda);
  if (s.family == PolyFamily::Krawtchouk) out += "/p=" + short_fmt(s.p);
  return out;
}

// Krawtchouk polynomials stop at degree lambda.
bool order_available(const PolySystemId& s, int m) { return s.family != PolyFamily::Krawtchouk || m <= s.lambda; }

struct SuiteOutput {
  std::vector<ReportRow> rows;
  std::vector<std::pair<std::string, std::string>> extra_files;
};

// Checks draw from streams numbered in configuration order, so a check's
// randomness does not depend on which other suites run.
class Context {
 public:
  Context(Suite suite, const ExperimentConfig& cfg)
      : suite_(suite), cfg_(cfg), base_(static_cast<std::uint32_t>(suite) * 100000u) {}

  const ExperimentConfig& cfg() const { return cfg_; }
  std::uint32_t next_check() { return base_ + counter_++; }

  void add(std::string id, std::string inputs, std::string metric, double value, double threshold) {
    out.rows.push_back(make_row(suite_, std::move(id), std::move(inputs), std::move(metric), value, threshold));
  }

  // One row per check: fraction of seeds whose KS statistic reaches the
  // critical value. `run` returns {ks, critical}.
  template <class F>
  void ks_over_seeds(const std::string& id, const std::string& inputs, F run) {
    const std::uint32_t stream = next_check();
    int fails = 0;
    double worst = 0.0;
    for (auto seed : cfg_.seeds) {
      RandomStream rs(seed, stream);
      const auto [ks, crit] = run(rs);
      if (!(ks < crit)) ++fails;
      worst = std::max(worst, ks / crit);
    }
    add(id, inputs + " n=" + std::to_string(cfg_.n) + " seeds=" + std::to_string(cfg_.seeds.size()) +
                " max_ks_over_critical=" + short_fmt(worst),
        "ks_fail_fraction", static_cast<double>(fails) / cfg_.seeds.size(), cfg_.tol.ks_fail_fraction);
  }

  SuiteOutput out;

 private:
  Suite suite_;
  const ExperimentConfig& cfg_;
  std::uint32_t base_;
  std::uint32_t counter_ = 0;
};

std::pair<double, double> two_sample(const std::vector<double>& a, const std::vector<double>& b) {
  return {ks_statistic(a, b), ks_critical_two_sample(a.size(), b.size())};
}

void run_alpha_table(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const auto rows = alpha_table(cfg.systems, cfg.m_max);
  for (const auto& r : rows) {
    ctx.add("alpha/" + system_tag(r.system) + "/m=" + std::to_string(r.m),
            system_inputs(r.system) + " m=" + std::to_string(r.m) + " closed=" + short_fmt(r.alpha_closed),
            "rel_err", r.abs_err / std::max(1.0, std::abs(r.alpha_closed)), cfg.tol.alpha);
  }
  std::ostringstream os;
  write_alpha_table_csv(os, rows);
  ctx.out.extra_files.emplace_back("alpha_values.csv", os.str());
}

void run_orthogonality(Context& ctx) {
  const auto& cfg = ctx.cfg();
  for (const auto& s : cfg.systems) {
    const auto ref = reference_distribution(s);
    int top = 0;
    for (int m = 0; m <= cfg.m_max && order_available(s, m); ++m) {
      top = m;
      const Poly a = poly_coeffs(s, m);
      const Poly b = orthopoly_from_moments(ref, m);
      double worst = 0.0;
      for (int i = 0; i <= std::max(a.degree(), b.degree()); ++i) {
        const double x = i <= a.degree() ? a[i] : 0.0;
        const double y = i <= b.degree() ? b[i] : 0.0;
        worst = std::max(worst, std::abs(x - y) / std::max(1.0, std::abs(x)));
      }
      ctx.add("coeffs/" + system_tag(s) + "/m=" + std::to_string(m), system_inputs(s) + " m=" + std::to_string(m),
              "coeff_max_rel_diff", worst, cfg.tol.coeff);
    }
    ctx.add("orthogonality/" + system_tag(s), system_inputs(s) + " m_max=" + std::to_string(top),
            "max_rel_residual", orthogonality_residuals(s, top).max_relative(), cfg.tol.orthogonality);
  }
}

void run_gen_fn(Context& ctx) {
  const auto& cfg = ctx.cfg();
  for (const auto& s : cfg.systems) {
    const auto rep = gen_fn_checks(s, cfg.gen_fn_xs, cfg.gen_fn_ts, cfg.gen_fn_summands);
    std::size_t i = 0;
    for (const auto& r : rep.rows) {
      const std::string id = "gen_fn/" + system_tag(s) + "/" + std::string(1, r.check) + "/" + std::to_string(i++);
      const std::string inputs = system_inputs(s) + " x=" + short_fmt(r.x) + " t=" + short_fmt(r.t) +
                                 " order=" + std::to_string(rep.order);
      if (r.status == CheckStatus::NotApplicable) {
        ctx.add(id, inputs, "not_applicable", 0.0, 0.0);
      } else {
        ctx.add(id, inputs, "rel_residual", std::abs(r.residual) / std::max(1.0, std::abs(r.rhs)), cfg.tol.gen_fn);
      }
    }
  }
}

void run_characterize(Context& ctx) {
  const auto& cfg = ctx.cfg();
  VerificationReport all;
  for (const auto& s : cfg.systems) {
    const auto ref = reference_distribution(s);
    const auto bank = default_bank(uses_differences(s.family));
    for (int m = 1; m <= std::min(cfg.m_max, 3) && order_available(s, m); ++m) {
      const std::uint32_t stream = ctx.next_check();
      for (auto seed : cfg.seeds) {
        RandomStream rs(seed, stream);
        auto rep = verify_characterization(ref, s, m, bank, cfg.n, rs);
        all.rows.insert(all.rows.end(), rep.rows.begin(), rep.rows.end());
      }
    }
  }
  ctx.add("characterize/all", "checks=" + std::to_string(all.rows.size()) + " n=" + std::to_string(cfg.n) +
                                  " z_bound=" + short_fmt(kZThreshold),
          "fail_fraction", 1.0 - all.pass_fraction(), cfg.tol.char_fail_fraction);
  std::ostringstream os;
  write_verification_csv(os, all);
  ctx.out.extra_files.emplace_back("characterize_verification.csv", os.str());
}

void run_fixed_point_case(Context& ctx, const FixedPointCase& c, std::size_t index) {
  const auto& cfg = ctx.cfg();
  const std::string id = "fixed_point/case" + std::to_string(index);
  const std::string inputs = c.dist.description() + " bias=" + c.bias;
  if (c.bias == "system") {
    if (uses_differences(c.system->family)) {
      RandomStream rs(cfg.seeds.front(), ctx.next_check());
      const auto r = fixed_point_test(c.dist, *c.system, c.m, cfg.n, rs);
      ctx.add(id, inputs + " " + system_inputs(*c.system) + " m=" + std::to_string(c.m), r.metric, r.value,
              r.threshold);
      return;
    }
    ctx.ks_over_seeds(id, inputs + " " + system_inputs(*c.system) + " m=" + std::to_string(c.m), [&](RandomStream& rs) {
      const auto r = fixed_point_test(c.dist, *c.system, c.m, cfg.n, rs);
      return std::pair{r.value, r.threshold};
    });
    return;
  }
  const BiasRepresentation rep = c.bias == "zero" ? BiasRepresentation(Poly::x()) : BiasRepresentation(sign_of_x());
  ctx.ks_over_seeds(id, inputs + " m=1", [&](RandomStream& rs) {
    const auto r = fixed_point_test(c.dist, rep, 1, cfg.n, rs);
    return std::pair{r.value, r.threshold};
  });
}

// Transform of each reference law against its closed-form image: a fixed
// point for Hermite and Charlier, a parameter shift for the others.
void run_fixed_point(Context& ctx) {
  const auto& cfg = ctx.cfg();
  if (!cfg.fixed_point_cases.empty()) {
    for (std::size_t i = 0; i < cfg.fixed_point_cases.size(); ++i) run_fixed_point_case(ctx, cfg.fixed_point_cases[i], i);
    return;
  }
  for (const auto& s : cfg.systems) {
    const auto ref = reference_distribution(s);
    for (int m = 1; m <= std::min(cfg.m_max, 3) && order_available(s, m); ++m) {
      const auto vb = system_bias(s, m);
      const auto target = closed_form_transform(s, m);
      const std::string id = "transform/" + system_tag(s) + "/m=" + std::to_string(m);
      const std::string inputs = system_inputs(s) + " m=" + std::to_string(m) + " target=" + target.description();
      if (uses_differences(s.family)) {
        const auto q = discrete_transform_pmf(ref, vb.function, m, vb.alpha);
        ctx.next_check();
        ctx.add(id, inputs, "tv", total_variation(q, pmf_of(target)), cfg.tol.tv);
        continue;
      }
      ctx.ks_over_seeds(id, inputs, [&](RandomStream& rs) {
        RandomStream sa = rs.split(0);
        RandomStream sb = rs.split(1);
        const auto a = TransformSampler(ref, vb.function, vb.alpha).sample(cfg.n, sa).values;
        const auto b = sample(target, cfg.n, sb).values;
        return two_sample(a, b);
      });
    }
  }
}

void run_sum_replace(Context& ctx) {
  const auto& cfg = ctx.cfg();
  for (std::size_t si = 0; si < cfg.sum_scenarios.size(); ++si) {
    const auto& sc = cfg.sum_scenarios[si];
    std::vector<DistributionSpec> dists;
    std::string lambdas;
    for (double l : sc.lambdas) {
      const auto sys = make_system(sc.family, l, sc.p);
      dists.push_back(sc.summands == "gauss" ? gauss_atoms(sys, sc.m) : reference_distribution(sys));
      lambdas += (lambdas.empty() ? "" : ";") + short_fmt(l);
    }
    const std::string tag = "sum/" + std::string(poly_family_name(sc.family)) + "/" + std::to_string(si);
    const std::string inputs = "family=" + std::string(poly_family_name(sc.family)) + " lambdas=" + lambdas +
                               " m=" + std::to_string(sc.m) + " p=" + short_fmt(sc.p) + " summands=" + sc.summands;
    const auto set = make_summand_set(sc.family, dists, sc.lambdas, sc.m, sc.p);
    ctx.ks_over_seeds(tag + "/replacement_vs_direct", inputs, [&](RandomStream& rs) {
      RandomStream sa = rs.split(0);
      RandomStream sb = rs.split(1);
      return two_sample(sample_sum_transformed(set, cfg.n, sa).values, sample_direct_transform(set, cfg.n, sb).values);
    });

    const auto law = index_distribution(sc.family, sc.lambdas, sc.m, sc.p);
    RandomStream rs(cfg.seeds.front(), ctx.next_check());
    const auto picks = sample_indices(law, cfg.index_draws, rs);
    std::vector<double> counts(law.probs.size(), 0.0);
    for (auto i : picks) counts[i] += 1.0;
    double worst = 0.0;
    const double total = static_cast<double>(cfg.index_draws);
    for (std::size_t i = 0; i < counts.size(); ++i) {
      const double p = law.probs[i];
      const double freq = counts[i] / total;
      if (p <= 0.0 || p >= 1.0) {
        worst = std::max(worst, freq == p ? 0.0 : std::numeric_limits<double>::infinity());
      } else {
        worst = std::max(worst, std::abs(freq - p) / std::sqrt(p * (1 - p) / total));
      }
    }
    ctx.add(tag + "/index_frequencies", inputs + " draws=" + std::to_string(cfg.index_draws), "index_max_abs_z", worst,
            cfg.tol.z);
    ctx.add(tag + "/index_closed_form", inputs, "closed_form_mismatch", law.closed_form_agrees ? 0.0 : 1.0, 0.0);

    const auto id = verify_alpha_identity(sc.family, sc.lambdas, sc.m, sc.p);
    const double thr = id.exact ? 0.0 : 1e-12;
    ctx.add(tag + "/alpha_linear", inputs + (id.exact ? " exact" : " floating"), "rel_residual", id.linear, thr);
    ctx.add(tag + "/alpha_squared", inputs + (id.exact ? " exact" : " floating"), "rel_residual", id.squared, thr);
  }
}

void run_iterated(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const int m = std::min(cfg.m_max, 3);
  for (const auto& s : cfg.systems) {
    if (!order_available(s, m)) continue;
    for (int k = 1; k < m; ++k) {
      const std::uint32_t stream = ctx.next_check();
      for (auto seed : cfg.seeds) {
        RandomStream rs(seed, stream);
        const auto rep = iterated_bias_check(s, m, k, m - k, cfg.n, rs);
        double worst = 0.0;
        for (const auto& r : rep.rows) worst = std::max(worst, std::abs(r.z));
        ctx.add("iterated/" + system_tag(s) + "/m=" + std::to_string(m) + "/k=" + std::to_string(k) + "/seed=" +
                    std::to_string(seed),
                system_inputs(s) + " mu=" + short_fmt(rep.mu) + " moments=" + std::to_string(rep.rows.size()) +
                    " n=" + std::to_string(cfg.n),
                "max_abs_z", worst, cfg.tol.z);
      }
    }
  }
}

double histogram_l1(const std::vector<double>& xs, const std::function<double(double)>& density, double lo, double hi,
                    int bins) {
  std::vector<double> counts(bins, 0.0);
  double outside = 0.0;
  const double w = (hi - lo) / bins;
  for (double x : xs) {
    if (x < lo || x >= hi) {
      outside += 1.0;
      continue;
    }
    counts[std::min(bins - 1, static_cast<int>((x - lo) / w))] += 1.0;
  }
  const double n = static_cast<double>(xs.size());
  double l1 = outside / n;
  for (int b = 0; b < bins; ++b) {
    const double mid = lo + (b + 0.5) * w;
    l1 += std::abs(counts[b] / n - density(mid) * w);
  }
  return l1;
}

void run_example21(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const auto laplace = make_distribution(Family::Laplace, {1.0});
  ctx.ks_over_seeds("example21/laplace_fixed_point", laplace.description() + " bias=sign m=1", [&](RandomStream& rs) {
    const auto r = fixed_point_test(laplace, sign_of_x(), 1, cfg.n, rs);
    return std::pair{r.value, r.threshold};
  });

  const auto sign = make_biasing_function(laplace, sign_of_x(), 1);
  ctx.add("example21/density_at_1", laplace.description() + " x=1", "abs_err",
          std::abs(density_order_one(laplace, sign.function, sign.alpha, 1.0) - std::exp(-1.0) / 2), 1e-12);

  const auto uniform = make_distribution(Family::UniformInterval, {-1.0, 1.0});
  const auto zero = make_biasing_function(uniform, Poly::x(), 1);
  struct DensityCase {
    std::string name;
    const DistributionSpec* dist;
    const ValidatedBias* vb;
    double lo, hi;
  };
  for (const auto& c : {DensityCase{"laplace_sign", &laplace, &sign, -8.0, 8.0},
                        DensityCase{"uniform_zero", &uniform, &zero, -1.0, 1.0}}) {
    RandomStream rs(cfg.seeds.front(), ctx.next_check());
    const auto xs = TransformSampler(*c.dist, c.vb->function, c.vb->alpha).sample(cfg.density_draws, rs).values;
    const double l1 = histogram_l1(
        xs, [&](double x) { return density_order_one(*c.dist, c.vb->function, c.vb->alpha, x); }, c.lo, c.hi, 100);
    ctx.add("example21/density_l1/" + c.name, c.dist->description() + " bins=100 n=" + std::to_string(cfg.density_draws),
            "l1_histogram", l1, cfg.tol.l1);
  }

  // P = 1(x>1) - 1(x<-1) vanishes on [-1,1]; any root in there gives one law.
  const auto gap = make_biasing_function(laplace, sign_function({-1.0, 1.0}, {-1, 0, 1}, {0, 0}), 1);
  const std::vector<double> roots{-0.5, 0.0, 0.5};
  for (std::size_t i = 0; i < roots.size(); ++i) {
    for (std::size_t j = i + 1; j < roots.size(); ++j) {
      ctx.ks_over_seeds("example21/root_invariance/" + short_fmt(roots[i]) + "_vs_" + short_fmt(roots[j]),
                        laplace.description() + " P=1(x>1)-1(x<-1)", [&](RandomStream& rs) {
                          RandomStream sa = rs.split(0);
                          RandomStream sb = rs.split(1);
                          const auto fa = gap.function.with_roots({roots[i]});
                          const auto fb = gap.function.with_roots({roots[j]});
                          return two_sample(TransformSampler(laplace, fa, gap.alpha).sample(cfg.n, sa).values,
                                            TransformSampler(laplace, fb, gap.alpha).sample(cfg.n, sb).values);
                        });
    }
  }
}

SuiteOutput run_suite_output(Suite suite, const ExperimentConfig& cfg) {
  if (cfg.seeds.empty()) fail(ErrorCode::ConfigInvalid, "field 'seeds': must be nonempty");
  Context ctx(suite, cfg);
  switch (suite) {
    case Suite::AlphaTable: run_alpha_table(ctx); break;
    case Suite::Orthogonality: run_orthogonality(ctx); break;
    case Suite::GenFn: run_gen_fn(ctx); break;
    case Suite::Characterize: run_characterize(ctx); break;
    case Suite::FixedPoint: run_fixed_point(ctx); break;
    case Suite::SumReplace: run_sum_replace(ctx); break;
    case Suite::Iterated: run_iterated(ctx); break;
    case Suite::Example21: run_example21(ctx); break;
    case Suite::Full: fail(ErrorCode::PreconditionViolated, "full is a set of suites");
  }
  return std::move(ctx.out);
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
  f << text;
  f.close();
  if (!f) fail(ErrorCode::IoFailure, "failed writing " + path.string());
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

std::string_view to_string(Suite s) {
  switch (s) {
    case Suite::AlphaTable: return "alpha_table";
    case Suite::Orthogonality: return "orthogonality";
    case Suite::GenFn: return "gen_fn";
    case Suite::Characterize: return "characterize";
    case Suite::FixedPoint: return "fixed_point";
    case Suite::SumReplace: return "sum_replace";
    case Suite::Iterated: return "iterated";
    case Suite::Example21: return "example21";
    case Suite::Full: return "full";
  }
  return "unknown";
}

const std::vector<Suite>& all_suites() {
  static const std::vector<Suite> suites{Suite::AlphaTable,   Suite::Orthogonality, Suite::GenFn,
                                         Suite::Characterize, Suite::FixedPoint,    Suite::SumReplace,
                                         Suite::Iterated,     Suite::Example21};
  return suites;
}

Suite parse_suite(std::string_view name) {
  for (auto s : all_suites()) {
    if (to_string(s) == name) return s;
  }
  if (name == "full") return Suite::Full;
  fail(ErrorCode::ConfigInvalid, "unknown suite '" + std::string(name) + "'");
}

std::vector<PolySystemId> default_systems() {
  return {make_system(PolyFamily::Hermite, 1.0),        make_system(PolyFamily::Hermite, 2.0),
          make_system(PolyFamily::Laguerre, 1.0),       make_system(PolyFamily::Laguerre, 2.5),
          make_system(PolyFamily::Charlier, 1.0),       make_system(PolyFamily::Charlier, 4.0),
          make_system(PolyFamily::Krawtchouk, 6.0, 0.3), make_system(PolyFamily::Krawtchouk, 6.0, 0.5),
          make_system(PolyFamily::Gegenbauer, 0.0),     make_system(PolyFamily::Gegenbauer, 1.0)};
}

std::vector<SumScenario> default_sum_scenarios() {
  return {{PolyFamily::Hermite, {1.0, 2.0, 3.0}, 2, 0.5, "gauss"},
          {PolyFamily::Charlier, {0.5, 1.0, 1.5}, 2, 0.5, "reference"},
          {PolyFamily::Laguerre, {1.0, 2.0}, 2, 0.5, "gauss"},
          {PolyFamily::Krawtchouk, {1.0, 3.0}, 2, 0.4, "reference"}};
}

ExperimentConfig parse_config(const json& j) {
  check_keys(j, "config",
             {"suite", "systems", "families", "lambdas", "ps", "m_max", "n", "seeds", "out", "tolerances", "gen_fn",
              "fixed_point_cases", "sum_scenarios", "index_draws", "density_draws"});
  ExperimentConfig cfg;
  if (j.contains("suite")) {
    try {
      cfg.suite = parse_suite(get<std::string>(j["suite"], "suite"));
    } catch (const Error& e) {
      invalid("suite", e.message());
    }
  }

  if (j.contains("systems")) {
    if (j.contains("families") || j.contains("lambdas") || j.contains("ps")) {
      invalid("systems", "give either systems or families/lambdas/ps, not both");
    }
    const auto& arr = j["systems"];
    if (!arr.is_array()) invalid("systems", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string f = "systems[" + std::to_string(i) + "]";
      check_keys(arr[i], f, {"family", "lambda", "p"});
      if (!arr[i].contains("family") || !arr[i].contains("lambda")) invalid(f, "needs family and lambda");
      const auto fam = poly_family_from(get<std::string>(arr[i]["family"], f + ".family"), f + ".family");
      const double p = arr[i].contains("p") ? get<double>(arr[i]["p"], f + ".p") : 0.5;
      cfg.systems.push_back(system_from(fam, get<double>(arr[i]["lambda"], f + ".lambda"), p, f));
    }
  } else if (j.contains("families")) {
    if (!j.contains("lambdas")) invalid("lambdas", "required with families");
    const auto names = get<std::vector<std::string>>(j["families"], "families");
    const auto lambdas = get<std::vector<double>>(j["lambdas"], "lambdas");
    const auto ps = j.contains("ps") ? get<std::vector<double>>(j["ps"], "ps") : std::vector<double>{0.5};
    if (names.empty() || lambdas.empty() || ps.empty()) invalid("families", "grids must be nonempty");
    for (std::size_t i = 0; i < names.size(); ++i) {
      const auto fam = poly_family_from(names[i], "families[" + std::to_string(i) + "]");
      for (std::size_t k = 0; k < lambdas.size(); ++k) {
        const std::string f = "lambdas[" + std::to_string(k) + "] for " + names[i];
        if (fam == PolyFamily::Krawtchouk) {
          for (double p : ps) cfg.systems.push_back(system_from(fam, lambdas[k], p, f));
        } else {
          cfg.systems.push_back(system_from(fam, lambdas[k], 0.5, f));
        }
      }
    }
  } else {
    if (j.contains("lambdas") || j.contains("ps")) invalid("families", "required with lambdas/ps");
    cfg.systems = default_systems();
  }

  if (j.contains("m_max")) {
    cfg.m_max = get<int>(j["m_max"], "m_max");
    if (cfg.m_max < 0 || cfg.m_max > 8) invalid("m_max", "must lie in [0, 8]");
  }
  if (j.contains("n")) {
    const auto n = get<long long>(j["n"], "n");
    if (n < 10) invalid("n", "must be at least 10");
    cfg.n = static_cast<std::size_t>(n);
  }
  if (!j.contains("seeds")) invalid("seeds", "missing");
  cfg.seeds = get<std::vector<std::uint64_t>>(j["seeds"], "seeds");
  if (cfg.seeds.empty()) invalid("seeds", "must be nonempty");
  if (j.contains("out")) cfg.out = get<std::string>(j["out"], "out");
  if (j.contains("index_draws")) {
    const auto n = get<long long>(j["index_draws"], "index_draws");
    if (n < 1) invalid("index_draws", "must be positive");
    cfg.index_draws = static_cast<std::size_t>(n);
  }
  if (j.contains("density_draws")) {
    const auto n = get<long long>(j["density_draws"], "density_draws");
    if (n < 1000) invalid("density_draws", "must be at least 1000");
    cfg.density_draws = static_cast<std::size_t>(n);
  }

  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    check_keys(t, "tolerances",
               {"alpha", "coeff", "orthogonality", "gen_fn", "z", "tv", "l1", "char_fail_fraction",
                "ks_fail_fraction"});
    const auto set = [&](const char* key, double& dst) {
      if (!t.contains(key)) return;
      dst = get<double>(t[key], std::string("tolerances.") + key);
      if (!(dst >= 0) || !std::isfinite(dst)) invalid(std::string("tolerances.") + key, "must be finite and >= 0");
    };
    set("alpha", cfg.tol.alpha);
    set("coeff", cfg.tol.coeff);
    set("orthogonality", cfg.tol.orthogonality);
    set("gen_fn", cfg.tol.gen_fn);
    set("z", cfg.tol.z);
    set("tv", cfg.tol.tv);
    set("l1", cfg.tol.l1);
    set("char_fail_fraction", cfg.tol.char_fail_fraction);
    set("ks_fail_fraction", cfg.tol.ks_fail_fraction);
  }

  if (j.contains("gen_fn")) {
    const auto& g = j["gen_fn"];
    check_keys(g, "gen_fn", {"xs", "ts", "summands"});
    if (g.contains("xs")) cfg.gen_fn_xs = get<std::vector<double>>(g["xs"], "gen_fn.xs");
    if (g.contains("ts")) cfg.gen_fn_ts = get<std::vector<double>>(g["ts"], "gen_fn.ts");
    if (g.contains("summands")) cfg.gen_fn_summands = get<int>(g["summands"], "gen_fn.summands");
    for (double t : cfg.gen_fn_ts) {
      if (std::abs(t) > kGenFnMaxT) invalid("gen_fn.ts", "|t| must not exceed " + short_fmt(kGenFnMaxT));
    }
    if (cfg.gen_fn_summands < 1) invalid("gen_fn.summands", "must be positive");
  }

  if (j.contains("fixed_point_cases")) {
    const auto& arr = j["fixed_point_cases"];
    if (!arr.is_array()) invalid("fixed_point_cases", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string f = "fixed_point_cases[" + std::to_string(i) + "]";
      check_keys(arr[i], f, {"distribution", "bias", "system", "m"});
      if (!arr[i].contains("distribution")) invalid(f + ".distribution", "missing");
      FixedPointCase c{distribution_from(arr[i]["distribution"], f + ".distribution"),
                       arr[i].contains("bias") ? get<std::string>(arr[i]["bias"], f + ".bias") : "zero",
                       std::nullopt, 1};
      if (c.bias == "system") {
        if (!arr[i].contains("system")) invalid(f + ".system", "required when bias is system");
        const auto& s = arr[i]["system"];
        check_keys(s, f + ".system", {"family", "lambda", "p"});
        if (!s.contains("family") || !s.contains("lambda")) invalid(f + ".system", "needs family and lambda");
        c.system = system_from(poly_family_from(get<std::string>(s["family"], f + ".system.family"), f + ".system"),
                               get<double>(s["lambda"], f + ".system.lambda"),
                               s.contains("p") ? get<double>(s["p"], f + ".system.p") : 0.5, f + ".system");
        if (arr[i].contains("m")) c.m = get<int>(arr[i]["m"], f + ".m");
        if (c.m < 0 || c.m > 8) invalid(f + ".m", "must lie in [0, 8]");
      } else if (c.bias != "zero" && c.bias != "sign") {
        invalid(f + ".bias", "must be zero, sign or system");
      } else if (arr[i].contains("system") || arr[i].contains("m")) {
        invalid(f, "system and m apply only when bias is system");
      }
      cfg.fixed_point_cases.push_back(std::move(c));
    }
  }

  if (j.contains("sum_scenarios")) {
    const auto& arr = j["sum_scenarios"];
    if (!arr.is_array()) invalid("sum_scenarios", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string f = "sum_scenarios[" + std::to_string(i) + "]";
      check_keys(arr[i], f, {"family", "lambdas", "m", "p", "summands"});
      if (!arr[i].contains("family") || !arr[i].contains("lambdas") || !arr[i].contains("m")) {
        invalid(f, "needs family, lambdas and m");
      }
      SumScenario sc{poly_family_from(get<std::string>(arr[i]["family"], f + ".family"), f + ".family"),
                     get<std::vector<double>>(arr[i]["lambdas"], f + ".lambdas"), get<int>(arr[i]["m"], f + ".m"),
                     arr[i].contains("p") ? get<double>(arr[i]["p"], f + ".p") : 0.5,
                     arr[i].contains("summands") ? get<std::string>(arr[i]["summands"], f + ".summands")
                                                 : "reference"};
      if (!closed_under_addition(sc.family)) invalid(f + ".family", "family is not closed under addition");
      if (sc.lambdas.empty()) invalid(f + ".lambdas", "must be nonempty");
      if (sc.m < 0 || sc.m > 8) invalid(f + ".m", "must lie in [0, 8]");
      if (sc.summands != "reference" && sc.summands != "gauss") invalid(f + ".summands", "must be reference or gauss");
      if (sc.summands == "gauss" && uses_differences(sc.family)) {
        invalid(f + ".summands", "Gauss atoms are not lattice laws; use reference for difference families");
      }
      for (std::size_t k = 0; k < sc.lambdas.size(); ++k) {
        system_from(sc.family, sc.lambdas[k], sc.p, f + ".lambdas[" + std::to_string(k) + "]");
      }
      cfg.sum_scenarios.push_back(std::move(sc));
    }
  } else {
    cfg.sum_scenarios = default_sum_scenarios();
  }
  return cfg;
}

ExperimentConfig parse_config_text(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::ConfigInvalid, std::string("malformed JSON: ") + e.what());
  }
  return parse_config(j);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::ConfigInvalid, "cannot read config " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  try {
    return parse_config_text(ss.str());
  } catch (const Error& e) {
    fail(ErrorCode::ConfigInvalid, path.string() + ": " + e.message());
  }
}

void apply_overrides(ExperimentConfig& cfg, std::optional<Suite> suite, std::optional<std::uint64_t> seed,
                     std::optional<std::size_t> n, std::optional<std::filesystem::path> out) {
  if (suite) cfg.suite = *suite;
  if (seed) cfg.seeds = {*seed};
  if (n) {
    if (*n < 10) fail(ErrorCode::ConfigInvalid, "--n must be at least 10");
    cfg.n = *n;
  }
  if (out) cfg.out = *out;
}

ReportRow make_row(Suite suite, std::string check_id, std::string inputs, std::string metric, double value,
                   double threshold) {
  return {std::string(to_string(suite)), std::move(check_id), std::move(inputs), std::move(metric), value, threshold,
          value <= threshold};
}

std::string format_report(const std::vector<ReportRow>& rows) {
  std::string out = "suite,check_id,inputs,metric,value,threshold,pass\n";
  for (const auto& r : rows) {
    out += csv_field(r.suite) + ',' + csv_field(r.check_id) + ',' + csv_field(r.inputs) + ',' + csv_field(r.metric) +
           ',' + fmt(r.value) + ',' + fmt(r.threshold) + ',' + (r.pass ? "true" : "false") + '\n';
  }
  return out;
}

void emit_report(const std::vector<ReportRow>& rows, const std::filesystem::path& path) {
  write_file(path, format_report(rows));
}

std::vector<ReportRow> run_suite(Suite suite, const ExperimentConfig& cfg) {
  return run_suite_output(suite, cfg).rows;
}

bool SuiteResult::pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.pass; });
}

bool RunResult::pass() const {
  return std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.pass(); });
}

RunResult run_experiment(const ExperimentConfig& cfg) {
  if (cfg.seeds.empty()) fail(ErrorCode::ConfigInvalid, "field 'seeds': must be nonempty");
  std::error_code ec;
  std::filesystem::create_directories(cfg.out, ec);
  if (ec) fail(ErrorCode::IoFailure, "cannot create " + cfg.out.string() + ": " + ec.message());

  const std::vector<Suite> suites = cfg.suite == Suite::Full ? all_suites() : std::vector<Suite>{cfg.suite};
  RunResult result;
  std::string summary = "suite,rows,passed,pass\n";
  for (auto s : suites) {
    auto output = run_suite_output(s, cfg);
    emit_report(output.rows, cfg.out / (std::string(to_string(s)) + ".csv"));
    for (const auto& [name, text] : output.extra_files) write_file(cfg.out / name, text);
    SuiteResult sr{s, std::move(output.rows)};
    const auto passed = std::count_if(sr.rows.begin(), sr.rows.end(), [](const ReportRow& r) { return r.pass; });
    summary += std::string(to_string(s)) + ',' + std::to_string(sr.rows.size()) + ',' + std::to_string(passed) + ',' +
               (sr.pass() ? "true" : "false") + '\n';
    result.suites.push_back(std::move(sr));
  }
  write_file(cfg.out / "summary.csv", summary);
  return result;
}

std::string suites_help() {
  const Tolerances t;
  std::ostringstream os;
  os << "Suites:\n"
     << "  alpha_table    closed-form alpha vs (1/m!) E[P^m(Z)]^2, m = 0..m_max\n"
     << "  orthogonality  coefficient formulas vs Gram-Schmidt on moments; orthogonality residuals\n"
     << "  gen_fn         generating function, multiplicativity and alpha series\n"
     << "  characterize   E P(X)F(X) = alpha E F^(m)(X^(m)) over the default test-function bank, m <= 3\n"
     << "  fixed_point    transform of each reference law vs its closed-form image (or fixed_point_cases)\n"
     << "  sum_replace    replace-random-summands construction, index law, alpha identities\n"
     << "  iterated       moments of X^(k) vs the shifted reference law\n"
     << "  example21      Laplace sign-function fixed point, order-one density, root-choice invariance\n"
     << "  full           all of the above in this order\n"
     << "Default tolerances (config key tolerances.<name>):\n"
     << "  alpha " << t.alpha << "  coeff " << t.coeff << "  orthogonality " << t.orthogonality << "  gen_fn "
     << t.gen_fn << "\n"
     << "  z " << t.z << "  tv " << t.tv << "  l1 " << t.l1 << "  char_fail_fraction " << t.char_fail_fraction
     << "  ks_fail_fraction " << t.ks_fail_fraction << "\n"
     << "KS checks use the 1% critical value 1.628*sqrt((n1+n2)/(n1*n2)).\n"
     << "Exit status: 0 all checks pass, 1 a check failed, 2 config error, 3 runtime error.\n";
  return os.str();
}

}  // namespace steinbias
