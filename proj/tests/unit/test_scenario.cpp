#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "nld/errors.hpp"
#include "nld/scenario.hpp"

using namespace nld;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

const Check* find_check(const ScenarioReport& r, std::string_view name) {
  for (const auto& c : r.checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

}  // namespace

TEST(Schedule, GeometricOffsets) {
  const auto m = make_const_circle(1.0 / (2 * std::numbers::pi), 0.5, 32);
  const auto disc = discretize(m.kernel, m.death_rate, m.default_grid());
  LambdaSchedule s;
  const auto values = expand_schedule(s, disc);
  ASSERT_EQ(values.size(), 50u);
  EXPECT_NEAR(values.front(), -0.5 + 1e-4, 1e-15);
  EXPECT_NEAR(values.back(), 1.0 - 0.5 + 1.0, 1e-12);
  for (std::size_t k = 1; k < values.size(); ++k) EXPECT_GT(values[k], values[k - 1]);
  s.values = {0.1, 0.2};
  EXPECT_EQ(expand_schedule(s, disc), s.values);
}

TEST(Scenario, ConstCircleReproduced) {
  const auto root = fresh_dir("nld_scenario_a");
  RunOptions opts;
  opts.output_root = root;
  const auto cfg = parse_config("model: const_circle\n");
  const auto r = run_scenario(cfg, opts);
  EXPECT_EQ(r.verdict, ScenarioVerdict::reproduced);
  ASSERT_TRUE(r.eigen);
  EXPECT_NEAR(r.eigen->lambda0, 0.5, 1e-10);
  ASSERT_TRUE(r.dynamics);
  EXPECT_NEAR(r.dynamics->rate, 0.5, 1e-4);
  for (const char* name : {"validation", "curve_monotone", "condition", "eigen_converged",
                           "rate_matches_lambda0", "resolvent_lambda0", "maximum_principle"}) {
    const auto* c = find_check(r, name);
    ASSERT_NE(c, nullptr) << name;
    EXPECT_EQ(c->status, CheckStatus::passed) << name << ": " << c->detail;
  }
  for (const char* file : {"curve.csv", "left_limit.csv", "eigenfunction.csv", "eigen.json",
                           "trajectory.csv", "verify.json", "report.json"}) {
    EXPECT_TRUE(fs::exists(root / "const_circle" / file)) << file;
  }
  EXPECT_FALSE(fs::exists(root / "const_circle" / "jump_matrix.csv"));
  EXPECT_EQ(exit_code_for(r), exit_ok);
  fs::remove_all(root);
}

TEST(Scenario, Deterministic) {
  const auto a = fresh_dir("nld_scenario_det_a");
  const auto b = fresh_dir("nld_scenario_det_b");
  const auto cfg = parse_config("model: const_circle\ngrid: {n: 40}\n");
  RunOptions opts;
  opts.output_root = a;
  run_scenario(cfg, opts);
  opts.output_root = b;
  run_scenario(cfg, opts);
  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(a / "const_circle")) {
    const auto other = b / "const_circle" / entry.path().filename();
    ASSERT_TRUE(fs::exists(other));
    EXPECT_EQ(slurp(entry.path()), slurp(other)) << entry.path().filename();
    ++compared;
  }
  EXPECT_GE(compared, 7u);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Scenario, FormatsAndMatrixDump) {
  const auto root = fresh_dir("nld_scenario_fmt");
  RunOptions opts;
  opts.output_root = root;
  opts.dump_matrix = true;
  const auto cfg = parse_config("model: const_circle\ngrid: {n: 20}\noutputs: {formats: [csv]}\n");
  run_scenario(cfg, opts);
  EXPECT_TRUE(fs::exists(root / "const_circle" / "curve.csv"));
  EXPECT_TRUE(fs::exists(root / "const_circle" / "jump_matrix.csv"));
  EXPECT_FALSE(fs::exists(root / "const_circle" / "report.json"));
  fs::remove_all(root);
}

TEST(Scenario, UnknownExpectationIsInconclusive) {
  const auto cfg = parse_config(R"yaml(model:
  kernel_expr: "1"
  a_expr: "2"
  domain: {type: interval, lo: 0, hi: 1}
  declared: {symmetric: true, inf_a: 2, sup_a: 2, inf_location: 0.5}
grid: {n: 21}
)yaml");
  RunOptions opts;
  opts.write_outputs = false;
  const auto r = run_scenario(cfg, opts);
  EXPECT_EQ(r.verdict, ScenarioVerdict::inconclusive);
  EXPECT_EQ(exit_code_for(r), exit_numerical_failure);
  ASSERT_TRUE(r.eigen);
  EXPECT_NEAR(r.eigen->lambda0, -1.0, 1e-9);
}

TEST(Suite, CorruptedConfigAbortsBeforeRunning) {
  const auto dir = fresh_dir("nld_suite_bad");
  const auto out = fresh_dir("nld_suite_bad_out");
  std::ofstream(dir / "a.yaml") << "model: const_circle\n";
  std::ofstream(dir / "b.yaml") << "model: const_circle\nname: other\ngrid:\n  n: 4\n";
  RunOptions opts;
  opts.output_root = out;
  std::ostringstream table;
  try {
    run_suite(list_configs(dir), opts, table);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "grid.n");
    EXPECT_EQ(e.line(), 4);
    EXPECT_NE(std::string(e.what()).find("b.yaml"), std::string::npos);
  }
  EXPECT_TRUE(fs::is_empty(out));
  EXPECT_TRUE(table.str().empty());
  fs::remove_all(dir);
  fs::remove_all(out);
}

TEST(Suite, DuplicateNamesAndEmptyList) {
  const auto dir = fresh_dir("nld_suite_dup");
  std::ofstream(dir / "a.yaml") << "model: const_circle\n";
  std::ofstream(dir / "b.yaml") << "model: const_circle\n";
  std::ostringstream table;
  EXPECT_THROW(run_suite(list_configs(dir), {}, table), ConfigError);
  EXPECT_THROW(run_suite({}, {}, table), ConfigError);
  fs::remove_all(dir);
}

TEST(Suite, TableAndExitCode) {
  const auto dir = fresh_dir("nld_suite_ok");
  const auto out = fresh_dir("nld_suite_ok_out");
  std::ofstream(dir / "a.yaml") << "model: const_circle\nname: first\ngrid: {n: 24}\n";
  std::ofstream(dir / "b.yaml") << "model: const_circle\nname: second\ngrid: {n: 32}\n";
  RunOptions opts;
  opts.output_root = out;
  std::ostringstream table;
  const auto result = run_suite(list_configs(dir), opts, table, 2);
  EXPECT_EQ(result.exit_code, exit_ok);
  ASSERT_EQ(result.entries.size(), 2u);
  const auto text = table.str();
  EXPECT_LT(text.find("first"), text.find("second"));
  EXPECT_NE(text.find("reproduced"), std::string::npos);
  EXPECT_TRUE(fs::exists(out / "first" / "report.json"));
  EXPECT_TRUE(fs::exists(out / "second" / "report.json"));
  fs::remove_all(dir);
  fs::remove_all(out);
}
