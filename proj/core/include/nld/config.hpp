#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nld/model.hpp"

namespace nld {

/// A model written as expressions over x (and y for the kernel), with every
/// hypothesis declared explicitly.
struct InlineModel {
  std::string name;
  std::string kernel_expr;
  std::string a_expr;
  DomainSpec domain;
  bool symmetric = false;
  std::optional<LowerBoundMeta> lower_bound;
  double inf_a = 0.0;
  double sup_a = 0.0;
  InfimumLocation inf_location = AtInfinity{};
  std::optional<Regularity> regularity;
  Expectation expected = Expectation::unknown;
};

struct GridConfig {
  std::optional<std::size_t> n;
  std::optional<QuadratureRule> rule;
  std::optional<double> truncation;  ///< half width R, line models only
};

/// Either an explicit increasing list, or `count` samples spaced
/// geometrically in the offset from -inf a, from left_offset_floor up to
/// lambda_max (default |J|_1 - inf a + 1).
struct LambdaSchedule {
  std::vector<double> values;
  std::size_t count = 50;
  double left_offset_floor = 1e-4;
  std::optional<double> lambda_max;
};

struct SolverConfig {
  double tol_lambda = 1e-10;
  double tol_spr = 1e-9;
};

struct DynamicsConfig {
  bool enabled = true;
  std::optional<double> t_end;
  std::optional<double> dt;
  /// "constant" or an expression in x.
  std::string u0 = "constant";
};

struct OutputConfig {
  std::string directory = "out";
  std::vector<std::string> formats{"csv", "json"};

  bool wants(std::string_view format) const;
};

/// Solve again on twice the truncation half width. Without a tolerance the
/// difference is only reported.
struct TruncationSweepConfig {
  bool enabled = false;
  std::optional<std::size_t> n;  ///< nodes on the base half width
  std::optional<double> tolerance;
};

struct ScenarioConfig {
  std::string name;
  std::variant<std::string, InlineModel> model;
  GridConfig grid;
  LambdaSchedule lambda_schedule;
  SolverConfig solver;
  DynamicsConfig dynamics;
  OutputConfig outputs;
  TruncationSweepConfig truncation_sweep;
  std::uint64_t seed = 20240501;
  std::string source;  ///< file name, or "<string>"
};

/// Parses YAML text. Every problem raises ConfigError naming the key and line.
ScenarioConfig parse_config(std::string_view text, std::string_view source = "<string>");
ScenarioConfig load_config(const std::filesystem::path& path);

/// Sorted *.yaml / *.yml files of a directory.
std::vector<std::filesystem::path> list_configs(const std::filesystem::path& directory);

/// Catalog model or compiled inline model, with grid overrides applied.
NamedModel resolve_model(const ScenarioConfig& config);

/// Inline expressions compiled into a model.
NamedModel compile_inline(const InlineModel& def);

}  // namespace nld
