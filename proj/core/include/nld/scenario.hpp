#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nld/config.hpp"
#include "nld/dynamics.hpp"
#include "nld/eigensolve.hpp"

namespace nld {

enum class ScenarioVerdict { reproduced, mismatch, inconclusive };

std::string_view to_string(ScenarioVerdict v) noexcept;

enum class CheckStatus { passed, failed, info };

std::string_view to_string(CheckStatus s) noexcept;

struct Check {
  std::string name;
  CheckStatus status = CheckStatus::info;
  std::string detail;
};

struct CurveSummary {
  std::size_t samples = 0;
  double supremum = 0.0;
  bool monotone = false;
  bool within_norm_bound = false;
  bool all_converged = false;
  double max_residual = 0.0;
};

/// A certificate together with the spectral radius measured at its lambda.
struct CertificateCheck {
  Certificate certificate;
  double measured_spr = 0.0;
};

struct TruncationSweepResult {
  double half_width = 0.0;
  std::size_t nodes = 0;
  double lambda0 = 0.0;
  double lambda0_doubled = 0.0;
  double delta = 0.0;
};

struct ScenarioReport {
  std::string name;
  std::string model;
  Expectation expected = Expectation::unknown;
  std::size_t nodes = 0;
  ValidationReport validation;
  SprCurve curve;
  CurveSummary curve_summary;
  ConditionReport condition;
  std::optional<EigenResult> eigen;
  /// "converged", or the error kind the solver stopped with.
  std::string solver_outcome;
  std::vector<CertificateCheck> certificates;
  std::optional<RateEstimate> dynamics;
  double min_state = 0.0;
  std::optional<ResolventReport> resolvent;
  std::optional<double> nussbaum_lambda0;
  std::optional<MaximumPrincipleReport> maximum_principle;
  std::optional<TruncationSweepResult> truncation_sweep;
  std::vector<Check> checks;
  ScenarioVerdict verdict = ScenarioVerdict::inconclusive;
  std::filesystem::path output_directory;

  /// Largest residual among the curve samples and the eigen solve.
  double max_residual() const;
};

struct RunOptions {
  /// Replaces outputs.directory with <output_root>/<scenario name>.
  std::optional<std::filesystem::path> output_root;
  std::optional<std::uint64_t> seed;
  bool dump_matrix = false;
  bool write_outputs = true;
};

/// Lambda values of a schedule: the explicit list, or `count` points whose
/// offsets from -inf a grow geometrically from the floor to lambda_max.
std::vector<double> expand_schedule(const LambdaSchedule& schedule, const Discretization& disc);

/// Integrates from the configured initial data. Defaults: t_end 50 and
/// dt = 0.25 / row_sum_norm(L); about 400 states are recorded.
Trajectory simulate_config(const DynamicsConfig& dynamics, const Discretization& disc);

/// Runs validate, curve, condition, solve, certificates, simulate, verify and
/// the optional truncation sweep, then writes the enabled exports. Unexpected
/// library errors are rethrown with the stage name prefixed to the message.
ScenarioReport run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

std::string report_json(const ScenarioReport& report);

struct SuiteEntry {
  std::string source;
  std::optional<ScenarioReport> report;
  std::string error;  ///< set when the scenario threw
};

struct SuiteResult {
  std::vector<SuiteEntry> entries;
  int exit_code = 0;
};

/// Exit codes shared by the suite and the command line tool.
inline constexpr int exit_ok = 0;
inline constexpr int exit_config_error = 2;
inline constexpr int exit_mismatch = 3;
inline constexpr int exit_numerical_failure = 4;

/// Parses every file first (a ConfigError naming the file aborts before any
/// work), runs the scenarios on worker threads, then prints one row per
/// scenario in input order. Throws ConfigError on an empty list.
SuiteResult run_suite(const std::vector<std::filesystem::path>& configs,
                      const RunOptions& options, std::ostream& table,
                      unsigned max_threads = 0);

/// Exit code for a single report.
int exit_code_for(const ScenarioReport& report);

}  // namespace nld
