#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "steinbias/distributions.hpp"
#include "steinbias/orthopoly.hpp"

namespace steinbias {

enum class Suite { AlphaTable, Orthogonality, GenFn, Characterize, FixedPoint, SumReplace, Iterated, Example21, Full };

std::string_view to_string(Suite s);
Suite parse_suite(std::string_view name);
// Every runnable suite in execution order (Full expanded).
const std::vector<Suite>& all_suites();

// Exit statuses of `steinbias run`.
inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailure = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitRuntimeError = 3;

struct Tolerances {
  double alpha = 1e-8;             // relative error of closed-form alpha
  double coeff = 1e-8;             // coefficient oracle agreement
  double orthogonality = 1e-8;     // relative orthogonality residual
  double gen_fn = 1e-8;            // generating-function residual
  double z = 4.0;                  // |z| bound for moment and frequency checks
  double tv = 1e-10;               // exact lattice total variation
  double l1 = 0.02;                // density vs histogram
  double char_fail_fraction = 0.05;  // characterization checks allowed over |z| = 4
  double ks_fail_fraction = 0.1;     // seeds allowed over the 1% KS critical value
};

// Test law plus biasing function for the fixed_point suite.
struct FixedPointCase {
  DistributionSpec dist;
  std::string bias;  // "zero", "sign" or "system"
  std::optional<PolySystemId> system;
  int m = 1;
};

struct SumScenario {
  PolyFamily family;
  std::vector<double> lambdas;
  int m;
  double p = 0.5;
  std::string summands;  // "reference" or "gauss"
};

struct ExperimentConfig {
  Suite suite = Suite::Full;
  std::vector<PolySystemId> systems;
  int m_max = 3;
  std::size_t n = 100000;
  std::vector<std::uint64_t> seeds;
  std::filesystem::path out = "reports";
  Tolerances tol;
  std::vector<double> gen_fn_xs{0.0, 1.0, 2.0, 0.5, -1.0};
  std::vector<double> gen_fn_ts{-0.05, 0.02, 0.05};
  int gen_fn_summands = 3;
  std::vector<FixedPointCase> fixed_point_cases;
  std::vector<SumScenario> sum_scenarios;
  std::size_t index_draws = 1000000;
  std::size_t density_draws = 1000000;
};

std::vector<PolySystemId> default_systems();
std::vector<SumScenario> default_sum_scenarios();

// Throws ConfigInvalid naming the offending field; JSON syntax errors carry
// line and column.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig parse_config_text(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

// Flag overrides: a seed replaces the seed list.
void apply_overrides(ExperimentConfig& cfg, std::optional<Suite> suite, std::optional<std::uint64_t> seed,
                     std::optional<std::size_t> n, std::optional<std::filesystem::path> out);

// pass <=> value <= threshold (false for NaN).
struct ReportRow {
  std::string suite;
  std::string check_id;
  std::string inputs;
  std::string metric;
  double value;
  double threshold;
  bool pass;
};

ReportRow make_row(Suite suite, std::string check_id, std::string inputs, std::string metric, double value,
                   double threshold);

// Columns: suite,check_id,inputs,metric,value,threshold,pass. LF endings,
// %.17g numbers.
void emit_report(const std::vector<ReportRow>& rows, const std::filesystem::path& path);
std::string format_report(const std::vector<ReportRow>& rows);

std::vector<ReportRow> run_suite(Suite suite, const ExperimentConfig& cfg);

struct SuiteResult {
  Suite suite;
  std::vector<ReportRow> rows;
  bool pass() const;
};

struct RunResult {
  std::vector<SuiteResult> suites;
  bool pass() const;
  int exit_code() const { return pass() ? kExitPass : kExitCheckFailure; }
};

// Runs the configured suite(s) and writes <suite>.csv for each plus
// summary.csv into cfg.out. Throws IoFailure when the directory or a file
// cannot be written.
RunResult run_experiment(const ExperimentConfig& cfg);

// Text for --help: suites and default tolerances.
std::string suites_help();

}  // namespace steinbias
