#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "nld/config.hpp"
#include "nld/errors.hpp"

using namespace nld;
namespace fs = std::filesystem;

namespace {

ConfigError config_error(std::string_view text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e;
  }
  ADD_FAILURE() << "parsed:\n" << text;
  return ConfigError("", 0, "");
}

constexpr const char* inline_gauss = R"yaml(name: gauss_inline
model:
  name: gauss
  kernel_expr: "exp(-(x - y)^2) / sqrt(pi)"
  a_expr: "1 + x^2"
  domain: {type: truncated_line, half_width: 10}
  declared:
    symmetric: true
    inf_a: 1
    sup_a: 101
    inf_location: 0
    lower_bound: {epsilon: 0.2, delta: 1, region: band}
    regularity: {lipschitz: 20}
  expected: eigenvalue_exists
grid: {n: 201}
)yaml";

}  // namespace

TEST(Config, CatalogDefaults) {
  const auto cfg = parse_config("model: const_circle\n");
  EXPECT_EQ(cfg.name, "const_circle");
  EXPECT_EQ(std::get<std::string>(cfg.model), "const_circle");
  EXPECT_EQ(cfg.lambda_schedule.count, 50u);
  EXPECT_DOUBLE_EQ(cfg.solver.tol_lambda, 1e-10);
  EXPECT_EQ(cfg.seed, 20240501u);
  EXPECT_TRUE(cfg.outputs.wants("csv"));
  EXPECT_TRUE(cfg.outputs.wants("json"));
  EXPECT_FALSE(cfg.truncation_sweep.enabled);
}

TEST(Config, InlineModel) {
  const auto cfg = parse_config(inline_gauss);
  const auto& m = std::get<InlineModel>(cfg.model);
  EXPECT_TRUE(m.symmetric);
  EXPECT_DOUBLE_EQ(m.inf_a, 1.0);
  ASSERT_TRUE(m.lower_bound);
  EXPECT_EQ(m.expected, Expectation::eigenvalue_exists);
  const auto model = resolve_model(cfg);
  EXPECT_EQ(model.default_nodes, 201u);
  const auto grid = model.default_grid();
  EXPECT_NEAR(model.kernel(0.0, 0.0), 1.0 / std::sqrt(std::numbers::pi), 1e-14);
  EXPECT_DOUBLE_EQ(model.death_rate(2.0), 5.0);
  EXPECT_TRUE(validate_model(model.kernel, model.death_rate, grid).valid());
}

TEST(Config, ExplicitSchedule) {
  const auto cfg = parse_config("model: const_circle\nlambda_schedule: [0.1, 0.5, 2]\n");
  EXPECT_EQ(cfg.lambda_schedule.values, (std::vector<double>{0.1, 0.5, 2.0}));
  EXPECT_EQ(config_error("model: const_circle\nlambda_schedule: [0.5, 0.1]\n").key(),
            "lambda_schedule");
  EXPECT_EQ(config_error("model: const_circle\nlambda_schedule: [-2, 0.1]\n").key(),
            "lambda_schedule");
}

TEST(Config, ErrorsNameKeyAndLine) {
  auto e = config_error("model: const_circle\ngrid:\n  n: 8\n");
  EXPECT_EQ(e.key(), "grid.n");
  EXPECT_EQ(e.line(), 3);

  e = config_error("model: const_circle\nsolver:\n  tol_lambda: -1\n");
  EXPECT_EQ(e.key(), "solver.tol_lambda");
  EXPECT_EQ(e.line(), 3);

  e = config_error("model: const_circle\nsolver:\n  tolerance: 1\n");
  EXPECT_EQ(e.key(), "solver.tolerance");
  EXPECT_EQ(e.line(), 3);

  e = config_error("model: nonexistent\n");
  EXPECT_EQ(e.key(), "model");
  EXPECT_EQ(e.line(), 1);

  e = config_error("model: const_circle\nbogus: 1\n");
  EXPECT_EQ(e.key(), "bogus");

  e = config_error("model: const_circle\noutputs: {formats: [xml]}\n");
  EXPECT_EQ(e.key(), "outputs.formats");

  e = config_error("model: [unclosed\n");
  EXPECT_EQ(e.kind(), ErrorKind::config_error);
  EXPECT_GT(e.line(), 0);

  e = config_error("grid: {n: 100}\n");
  EXPECT_EQ(e.key(), "model");

  e = config_error("model: const_circle\ngrid: {truncation: 5}\n");
  EXPECT_EQ(e.key(), "grid.truncation");

  e = config_error("model: const_circle\ntruncation_sweep: {enabled: true}\n");
  EXPECT_EQ(e.key(), "truncation_sweep");
}

TEST(Config, InlineErrors) {
  std::string bad = inline_gauss;
  bad.replace(bad.find("exp(-(x - y)^2)"), 15, "exp(-(x - y)^2");
  auto e = config_error(bad);
  EXPECT_EQ(e.key(), "model.kernel_expr");
  EXPECT_EQ(e.line(), 4);

  bad = inline_gauss;
  bad.replace(bad.find("1 + x^2"), 7, "1 + y^2");
  EXPECT_EQ(config_error(bad).key(), "model.a_expr");

  bad = inline_gauss;
  bad.replace(bad.find("sup_a: 101"), 10, "sup_a: 0.5");
  EXPECT_EQ(config_error(bad).key(), "model.declared.sup_a");
}

TEST(Config, GaussLegendreDivisorIsConfigError) {
  const auto e = config_error("model: rank_one_log\ngrid: {n: 601, rule: gauss_legendre_composite}\n");
  EXPECT_EQ(e.key(), "grid");
}

TEST(Config, LoadAndList) {
  const auto dir = fs::temp_directory_path() / "nld_config_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ofstream(dir / "b.yaml") << "model: const_circle\n";
  std::ofstream(dir / "a.yml") << "model: const_circle\nname: first\n";
  std::ofstream(dir / "notes.txt") << "ignored";
  const auto files = list_configs(dir);
  ASSERT_EQ(files.size(), 2u);
  EXPECT_EQ(files[0].filename(), "a.yml");
  const auto cfg = load_config(files[0]);
  EXPECT_EQ(cfg.name, "first");
  EXPECT_EQ(cfg.source, files[0].string());
  EXPECT_THROW(list_configs(dir / "missing"), ConfigError);
  EXPECT_THROW(load_config(dir / "missing.yaml"), ConfigError);
  fs::remove_all(dir);
}
