#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "steinbias/biastransform.hpp"
#include "steinbias/cli.hpp"
#include "steinbias/errors.hpp"

using namespace steinbias;

namespace {

int report_error(const Error& e) {
  std::cerr << "steinbias: " << e.what() << '\n';
  return e.code() == ErrorCode::ConfigInvalid ? kExitConfigError : kExitRuntimeError;
}

PolyFamily family_arg(const std::string& name) {
  for (auto f : {PolyFamily::Hermite, PolyFamily::Laguerre, PolyFamily::Charlier, PolyFamily::Krawtchouk,
                 PolyFamily::Gegenbauer}) {
    std::string a(poly_family_name(f)), b(name);
    for (auto& c : a) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    for (auto& c : b) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (a == b) return f;
  }
  fail(ErrorCode::ConfigInvalid, "unknown polynomial family '" + name + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Biased distributional transformations and Stein characterization checks"};
  app.footer(suites_help());
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a verification suite from a JSON config");
  std::string config_path;
  std::optional<std::string> suite_name;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n;
  std::optional<std::string> out;
  run->add_option("--config", config_path, "JSON experiment config")->required();
  run->add_option("--suite", suite_name,
                  "alpha_table|orthogonality|gen_fn|characterize|fixed_point|sum_replace|iterated|example21|full");
  run->add_option("--seed", seed, "Replace the config's seed list with this seed");
  run->add_option("--n", n, "Samples per Monte Carlo check (default 100000)");
  run->add_option("--out", out, "Report directory (default reports)");
  run->footer(suites_help());

  auto* table = app.add_subcommand("alpha-table", "Print closed-form and numerical alpha values as CSV");
  std::string family = "hermite";
  std::vector<double> lambdas{1.0};
  double p = 0.5;
  int m_max = 3;
  std::string table_out;
  table->add_option("--family", family, "hermite|laguerre|charlier|krawtchouk|gegenbauer")->capture_default_str();
  table->add_option("--lambda", lambdas, "Parameter values (repeatable)")->capture_default_str();
  table->add_option("--p", p, "Krawtchouk success probability")->capture_default_str();
  table->add_option("--m-max", m_max, "Largest order")->capture_default_str()->check(CLI::Range(0, 8));
  table->add_option("--out", table_out, "Output file (default stdout)");

  auto* draw = app.add_subcommand("sample", "Draw the order-m transform of a reference law as CSV");
  std::string s_family = "hermite";
  double s_lambda = 1.0, s_p = 0.5;
  int s_m = 1;
  std::size_t s_n = 1000;
  std::uint64_t s_seed = 1;
  draw->add_option("--family", s_family, "Polynomial family")->capture_default_str();
  draw->add_option("--lambda", s_lambda, "Family parameter")->capture_default_str();
  draw->add_option("--p", s_p, "Krawtchouk success probability")->capture_default_str();
  draw->add_option("--m", s_m, "Order")->capture_default_str()->check(CLI::Range(0, 8));
  draw->add_option("--n", s_n, "Number of draws")->capture_default_str();
  draw->add_option("--seed", s_seed, "Seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfigError;
  }

  try {
    if (*run) {
      auto cfg = load_config(config_path);
      std::optional<Suite> suite;
      if (suite_name) suite = parse_suite(*suite_name);
      std::optional<std::filesystem::path> out_dir;
      if (out) out_dir = *out;
      apply_overrides(cfg, suite, seed, n, out_dir);
      const auto result = run_experiment(cfg);
      for (const auto& s : result.suites) {
        const auto passed = std::count_if(s.rows.begin(), s.rows.end(), [](const ReportRow& r) { return r.pass; });
        std::cout << to_string(s.suite) << ": " << passed << '/' << s.rows.size() << (s.pass() ? " PASS" : " FAIL")
                  << '\n';
      }
      std::cout << "reports written to " << cfg.out.string() << '\n';
      return result.exit_code();
    }
    if (*table) {
      std::vector<PolySystemId> systems;
      for (double l : lambdas) {
        try {
          systems.push_back(make_system(family_arg(family), l, p));
        } catch (const Error& e) {
          fail(ErrorCode::ConfigInvalid, e.message());
        }
      }
      const auto rows = alpha_table(systems, m_max);
      if (table_out.empty()) {
        write_alpha_table_csv(std::cout, rows);
      } else {
        std::ofstream f(table_out, std::ios::binary);
        if (!f) fail(ErrorCode::IoFailure, "cannot open " + table_out);
        write_alpha_table_csv(f, rows);
      }
      return kExitPass;
    }
    if (*draw) {
      PolySystemId sys;
      try {
        sys = make_system(family_arg(s_family), s_lambda, s_p);
      } catch (const Error& e) {
        fail(ErrorCode::ConfigInvalid, e.message());
      }
      const auto vb = system_bias(sys, s_m);
      RandomStream rs(s_seed, 0);
      const auto ref = reference_distribution(sys);
      SampleBatch batch;
      if (uses_differences(sys.family)) {
        const auto pmf = discrete_transform_pmf(ref, vb.function, s_m, vb.alpha);
        batch = sample(make_atoms(std::vector<double>(pmf.points.begin(), pmf.points.end()), pmf.probs), s_n, rs);
      } else {
        batch = TransformSampler(ref, vb.function, vb.alpha).sample(s_n, rs);
      }
      write_sample_csv(std::cout, batch);
      return kExitPass;
    }
  } catch (const Error& e) {
    return report_error(e);
  } catch (const std::exception& e) {
    std::cerr << "steinbias: " << e.what() << '\n';
    return kExitRuntimeError;
  }
  return kExitPass;
}
