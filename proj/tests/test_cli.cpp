#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "steinbias/cli.hpp"
#include "steinbias/errors.hpp"

using namespace steinbias;
namespace fs = std::filesystem;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::IoFailure;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("steinbias_test_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto cfg = parse_config_text(R"({"suite":"alpha_table","families":["hermite"],"lambdas":[1,2],"m_max":3,
                                         "seeds":[4,5],"n":500,"tolerances":{"z":3.5}})");
  CHECK(cfg.suite == Suite::AlphaTable);
  REQUIRE(cfg.systems.size() == 2);
  CHECK(cfg.systems[1].lambda == 2.0);
  CHECK(cfg.seeds == std::vector<std::uint64_t>{4, 5});
  CHECK(cfg.n == 500);
  CHECK(cfg.tol.z == 3.5);
  CHECK(cfg.tol.alpha == 1e-8);

  const auto defaults = parse_config_text(R"({"seeds":[1]})");
  CHECK(defaults.suite == Suite::Full);
  CHECK(defaults.systems.size() == default_systems().size());
  CHECK(defaults.sum_scenarios.size() == 4);

  const auto krawtchouk = parse_config_text(R"({"families":["Krawtchouk"],"lambdas":[4,6],"ps":[0.3,0.5],"seeds":[1]})");
  CHECK(krawtchouk.systems.size() == 4);
}

TEST_CASE("config errors") {
  CHECK(code_of([] { parse_config_text(R"({"seeds":[]})"); }) == ErrorCode::ConfigInvalid);
  CHECK(code_of([] { parse_config_text(R"({"suite":"full"})"); }) == ErrorCode::ConfigInvalid);
  CHECK(code_of([] { parse_config_text(R"({"seeds":[1],"sede":2})"); }) == ErrorCode::ConfigInvalid);
  CHECK(code_of([] { parse_config_text(R"({"seeds":[1],"suite":"nope"})"); }) == ErrorCode::ConfigInvalid);
  CHECK(code_of([] { parse_config_text(R"({"seeds":[1],"families":["hermite"],"lambdas":[-1]})"); }) ==
        ErrorCode::ConfigInvalid);
  CHECK(code_of([] { parse_config_text(R"({"seeds":[1],"families":["krawtchouk"],"lambdas":[2.5]})"); }) ==
        ErrorCode::ConfigInvalid);
  CHECK(code_of([] { parse_config_text(R"({"seeds":[1],"m_max":9})"); }) == ErrorCode::ConfigInvalid);
  CHECK(code_of([] { parse_config_text(R"({"seeds":["a"]})"); }) == ErrorCode::ConfigInvalid);
  CHECK(code_of([] {
          parse_config_text(R"({"seeds":[1],"sum_scenarios":[{"family":"gegenbauer","lambdas":[1],"m":1}]})");
        }) == ErrorCode::ConfigInvalid);
  try {
    parse_config_text("{\"seeds\":[1],\n \"n\": 10,,}");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigInvalid);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  try {
    parse_config_text(R"({"seeds":[1],"tolerances":{"z":"four"}})");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("tolerances.z") != std::string::npos);
  }
}

TEST_CASE("overrides") {
  auto cfg = parse_config_text(R"({"seeds":[1,2,3]})");
  apply_overrides(cfg, Suite::GenFn, 9, 1234, fs::path("elsewhere"));
  CHECK(cfg.suite == Suite::GenFn);
  CHECK(cfg.seeds == std::vector<std::uint64_t>{9});
  CHECK(cfg.n == 1234);
  CHECK(cfg.out == fs::path("elsewhere"));
  CHECK(parse_suite("example21") == Suite::Example21);
  for (auto s : all_suites()) CHECK(parse_suite(to_string(s)) == s);
}

TEST_CASE("report rows and files") {
  CHECK(make_row(Suite::GenFn, "a", "", "m", 1.0, 1.0).pass);
  CHECK_FALSE(make_row(Suite::GenFn, "a", "", "m", 1.5, 1.0).pass);
  CHECK_FALSE(make_row(Suite::GenFn, "a", "", "m", std::nan(""), 1.0).pass);

  const auto dir = scratch("rows");
  fs::create_directories(dir);
  emit_report({}, dir / "empty.csv");
  CHECK(slurp(dir / "empty.csv") == "suite,check_id,inputs,metric,value,threshold,pass\n");

  std::vector<ReportRow> rows;
  for (int i = 0; i < 10000; ++i) rows.push_back(make_row(Suite::AlphaTable, "id" + std::to_string(i), "x=1", "err", i * 0.1, 1.0));
  rows.push_back(make_row(Suite::AlphaTable, "quoted", "a,b \"c\"", "err", 0.1, 1.0));
  emit_report(rows, dir / "a.csv");
  emit_report(rows, dir / "b.csv");
  const auto a = slurp(dir / "a.csv");
  CHECK(a == slurp(dir / "b.csv"));
  CHECK(std::count(a.begin(), a.end(), '\n') == 10002);
  CHECK(a.find('\r') == std::string::npos);
  CHECK(a.find("\"a,b \"\"c\"\"\"") != std::string::npos);
  CHECK(a.find("alpha_table,id1,x=1,err,0.10000000000000001,1,true\n") != std::string::npos);

  CHECK(code_of([&] { emit_report(rows, dir / "missing" / "x.csv"); }) == ErrorCode::IoFailure);
}

TEST_CASE("alpha_table suite") {
  auto cfg = parse_config_text(R"({"suite":"alpha_table","families":["hermite"],"lambdas":[1,2],"m_max":3,"seeds":[1]})");
  cfg.out = scratch("alpha");
  const auto result = run_experiment(cfg);
  REQUIRE(result.suites.size() == 1);
  CHECK(result.suites[0].rows.size() == 8);
  for (const auto& r : result.suites[0].rows) CHECK(r.value < 1e-8);
  CHECK(result.exit_code() == kExitPass);
  CHECK(slurp(cfg.out / "summary.csv") == "suite,rows,passed,pass\nalpha_table,8,8,true\n");
  CHECK(fs::exists(cfg.out / "alpha_values.csv"));
}

TEST_CASE("uniform is not a zero-bias fixed point") {
  auto cfg = parse_config_text(R"({"suite":"fixed_point","seeds":[1,2],"n":5000,
      "fixed_point_cases":[{"distribution":{"family":"UniformInterval","params":[-1,1]},"bias":"zero"}]})");
  cfg.out = scratch("uniform");
  const auto result = run_experiment(cfg);
  CHECK_FALSE(result.pass());
  CHECK(result.exit_code() == kExitCheckFailure);
  CHECK(slurp(cfg.out / "summary.csv").find("fixed_point,1,0,false") != std::string::npos);
}

TEST_CASE("runs are byte-identical") {
  const std::string text = R"({"suite":"fixed_point","seeds":[3,4],"n":3000,"m_max":2,
      "systems":[{"family":"hermite","lambda":1},{"family":"charlier","lambda":2},{"family":"laguerre","lambda":1.5}]})";
  auto a = parse_config_text(text);
  auto b = parse_config_text(text);
  a.out = scratch("det_a");
  b.out = scratch("det_b");
  const auto ra = run_experiment(a);
  run_experiment(b);
  CHECK(ra.pass());
  for (const char* f : {"fixed_point.csv", "summary.csv"}) CHECK(slurp(a.out / f) == slurp(b.out / f));
  CHECK(ra.suites[0].rows.size() == 6);
}

TEST_CASE("help text lists suites and tolerances") {
  const auto h = suites_help();
  for (auto s : all_suites()) CHECK(h.find(std::string(to_string(s))) != std::string::npos);
  CHECK(h.find("full") != std::string::npos);
  for (const char* t : {"alpha", "coeff", "orthogonality", "gen_fn", "tv", "l1", "char_fail_fraction",
                        "ks_fail_fraction"}) {
    CHECK(h.find(t) != std::string::npos);
  }
}
