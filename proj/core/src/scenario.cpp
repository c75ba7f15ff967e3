#include "nld/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "nld/errors.hpp"
#include "nld/expression.hpp"
#include "nld/export.hpp"

namespace nld {

namespace {

constexpr double monotone_tol = 1e-9;
constexpr double norm_bound_slack = 1e-10;
constexpr double certificate_slack = 1e-8;
constexpr double positivity_floor = -1e-10;
constexpr double nussbaum_tol = 1e-6;
constexpr double neumann_tol = 1e-8;
constexpr std::size_t verify_trials = 10;
constexpr double default_t_end = 50.0;

template <typename F>
auto stage(std::string_view name, F&& body) {
  try {
    return body();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw Error(e.kind(), fmt::format("[{}] {}", name, e.detail()));
  }
}

void add(ScenarioReport& r, std::string name, bool ok, std::string detail) {
  r.checks.push_back({std::move(name), ok ? CheckStatus::passed : CheckStatus::failed,
                      std::move(detail)});
}

void info(ScenarioReport& r, std::string name, std::string detail) {
  r.checks.push_back({std::move(name), CheckStatus::info, std::move(detail)});
}

CurveSummary summarize(const SprCurve& curve) {
  CurveSummary s;
  s.samples = curve.samples.size();
  s.supremum = curve.supremum();
  s.monotone = check_monotone(curve, monotone_tol).ok;
  s.within_norm_bound = true;
  s.all_converged = true;
  for (const auto& c : curve.samples) {
    if (c.radius > c.upper_bound * (1.0 + norm_bound_slack)) s.within_norm_bound = false;
    if (!c.converged) s.all_converged = false;
    s.max_residual = std::max(s.max_residual, c.residual);
  }
  return s;
}

void certify(ScenarioReport& r, const NamedModel& model, const Discretization& disc,
             const PowerOptions& power) {
  auto measured = [&](double lambda) { return spectral_radius(disc.auxiliary(lambda), power).radius; };
  if (r.eigen) {
    const double lambda = r.eigen->lambda0;
    const double spr = r.eigen->spr_at_lambda0;
    r.certificates.push_back({drnovsek_bound(disc.auxiliary(lambda), r.eigen->eigenfunction), spr});
    if (model.kernel.symmetric) {
      r.certificates.push_back(
          {rayleigh_certificate(model.kernel, disc, lambda, r.eigen->eigenfunction), spr});
    }
  } else if (!r.curve.samples.empty()) {
    const auto& left = r.curve.samples.front();
    const Vector ones = Vector::Ones(disc.a_values.size());
    r.certificates.push_back({drnovsek_bound(disc.auxiliary(left.lambda), ones), left.radius});
    if (model.kernel.symmetric) {
      r.certificates.push_back(
          {rayleigh_certificate(model.kernel, disc, left.lambda, ones), left.radius});
    }
  }
  if (model.kernel.lower_bound && model.kernel.symmetric) {
    const auto& lb = *model.kernel.lower_bound;
    const double center = std::visit(
        [](const auto& region) -> double {
          if constexpr (requires { region.center; }) {
            return region.center;
          } else {
            return 0.0;
          }
        },
        lb.region);
    const double lambda = r.eigen ? r.eigen->lambda0 : r.curve.samples.front().lambda;
    const Vector v = rayleigh_test_function(disc, lambda, center, lb.delta, center - lb.delta,
                                         center + lb.delta);
    if (v.maxCoeff() > 0.0) {
      r.certificates.push_back(
          {rayleigh_certificate(model.kernel, disc, lambda, v), measured(lambda)});
    }
  }
  try {
    const auto cert = log_bound_certificate(model.kernel, model.death_rate);
    r.certificates.push_back({cert, measured(cert.lambda)});
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::wrong_infimum_kind && e.kind() != ErrorKind::invalid_argument) {
      throw;
    }
  }
}

void simulate(ScenarioReport& r, const ScenarioConfig& config, const Discretization& disc) {
  const auto traj = simulate_config(config.dynamics, disc);
  r.min_state = traj.min_entry();
  r.dynamics = estimate_rate(traj);
  if (config.outputs.wants("csv") && !r.output_directory.empty()) {
    std::ostringstream out;
    write_trajectory_csv(traj, out);
    write_text_file(r.output_directory / "trajectory.csv", out.str());
  }
}

void evaluate(ScenarioReport& r, const ScenarioConfig& config) {
  add(r, "validation", r.validation.valid(),
      r.validation.valid() ? fmt::format("{} pairs", r.validation.pairs_checked)
                           : r.validation.violations.front().what);
  add(r, "curve_monotone", r.curve_summary.monotone, fmt::format("tol {}", monotone_tol));
  add(r, "curve_norm_bound", r.curve_summary.within_norm_bound,
      fmt::format("spr <= |J|/(lambda + inf a) * (1 + {})", norm_bound_slack));
  add(r, "curve_converged", r.curve_summary.all_converged,
      fmt::format("max residual {:.3g}", r.curve_summary.max_residual));

  for (const auto& c : r.certificates) {
    add(r, fmt::format("certificate_{}", to_string(c.certificate.kind)),
        c.certificate.lower_bound <= c.measured_spr + certificate_slack,
        fmt::format("bound {:.12g} vs spr {:.12g} at lambda {:.6g}", c.certificate.lower_bound,
                    c.measured_spr, c.certificate.lambda));
  }
  if (r.dynamics) {
    add(r, "positivity", r.min_state >= positivity_floor,
        fmt::format("min state {:.3g}", r.min_state));
  }
  if (r.maximum_principle) {
    const auto& m = *r.maximum_principle;
    add(r, "maximum_principle",
        m.equivalence_holds && m.solutions_nonnegative && m.max_neumann_error <= neumann_tol,
        fmt::format("spr(A0) {:.6g}, inverse positive {}, Neumann error {:.3g}", m.spr_a0,
                    m.inverse_positive, m.max_neumann_error));
  }
  if (r.resolvent) {
    const auto& s = *r.resolvent;
    add(r, "resolvent_positive",
        s.is_positive && (!s.neumann_applicable || s.neumann_consistent),
        fmt::format("mu {:.6g}, min entry {:.3g}", s.mu, s.min_inverse_entry));
  }

  if (r.expected == Expectation::eigenvalue_exists) {
    add(r, "condition", r.condition.verdict == Verdict::condition_holds,
        fmt::format("{} (estimate {:.6g})", to_string(r.condition.verdict),
                    r.condition.limit_lower_estimate));
    add(r, "eigen_converged", r.eigen && r.eigen->converged, r.solver_outcome);
    if (r.eigen && r.dynamics) {
      const double tol = std::max(1e-2, 1e-2 * std::abs(r.eigen->lambda0));
      add(r, "rate_matches_lambda0", std::abs(r.dynamics->rate - r.eigen->lambda0) <= tol,
          fmt::format("rate {:.8g} vs {:.8g}", r.dynamics->rate, r.eigen->lambda0));
    }
    if (r.eigen && r.nussbaum_lambda0) {
      add(r, "resolvent_lambda0", std::abs(*r.nussbaum_lambda0 - r.eigen->lambda0) <= nussbaum_tol,
          fmt::format("{:.12g} vs {:.12g}", *r.nussbaum_lambda0, r.eigen->lambda0));
    }
  } else if (r.expected == Expectation::no_eigenvalue) {
    const double plateau = r.condition.limit_lower_estimate;
    add(r, "plateau_below_one", !r.condition.diverged && plateau < 1.0,
        fmt::format("left-endpoint supremum {:.8g}", plateau));
    add(r, "condition", r.condition.verdict == Verdict::no_evidence,
        std::string(to_string(r.condition.verdict)));
    add(r, "solver_refuses",
        r.solver_outcome == to_string(ErrorKind::condition_not_certified) ||
            r.solver_outcome == to_string(ErrorKind::bracket_failure),
        r.solver_outcome);
  } else if (r.dynamics) {
    info(r, "rate", fmt::format("{:.8g}", r.dynamics->rate));
  }

  if (r.truncation_sweep) {
    const auto& t = *r.truncation_sweep;
    const auto detail = fmt::format("R {} -> {}: lambda0 {:.10g} -> {:.10g}, delta {:.3g}",
                                    t.half_width, 2.0 * t.half_width, t.lambda0,
                                    t.lambda0_doubled, t.delta);
    if (config.truncation_sweep.tolerance) {
      add(r, "truncation_sweep", t.delta <= *config.truncation_sweep.tolerance, detail);
    } else {
      info(r, "truncation_sweep", detail);
    }
  }

  if (r.expected == Expectation::unknown) {
    r.verdict = ScenarioVerdict::inconclusive;
    return;
  }
  const bool failed = std::any_of(r.checks.begin(), r.checks.end(),
                                  [](const Check& c) { return c.status == CheckStatus::failed; });
  r.verdict = failed ? ScenarioVerdict::mismatch : ScenarioVerdict::reproduced;
}

nlohmann::json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

}  // namespace

std::vector<double> expand_schedule(const LambdaSchedule& s, const Discretization& disc) {
  if (!s.values.empty()) return s.values;
  const double hi = s.lambda_max.value_or(disc.j_norm - disc.inf_a + 1.0);
  const double span = hi + disc.inf_a;
  const double floor = std::min(s.left_offset_floor, 0.5 * span);
  std::vector<double> out(s.count);
  const double ratio = std::log(span / floor);
  for (std::size_t k = 0; k < s.count; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(s.count - 1);
    out[k] = -disc.inf_a + floor * std::exp(ratio * t);
  }
  out.back() = hi;
  return out;
}

static Vector initial_state(const DynamicsConfig& d, const Grid& grid) {
  if (d.u0 == "constant") return Vector::Ones(static_cast<Eigen::Index>(grid.size()));
  const auto e = Expression::parse(d.u0);
  return grid.sample([&](double x) { return e(x); });
}

Trajectory simulate_config(const DynamicsConfig& dynamics, const Discretization& disc) {
  const auto gen = disc.generator();
  const double norm = row_sum_norm(gen);
  const double t_end = dynamics.t_end.value_or(default_t_end);
  const double dt = dynamics.dt.value_or(norm > 0.0 ? 0.25 / norm : 0.1);
  IntegrateOptions opts;
  const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt));
  opts.stride = std::max<std::size_t>(1, steps / 400);
  return integrate(gen, initial_state(dynamics, disc.grid()), t_end, dt, opts);
}

std::string_view to_string(ScenarioVerdict v) noexcept {
  switch (v) {
    case ScenarioVerdict::reproduced: return "reproduced";
    case ScenarioVerdict::mismatch: return "mismatch";
    case ScenarioVerdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

std::string_view to_string(CheckStatus s) noexcept {
  switch (s) {
    case CheckStatus::passed: return "passed";
    case CheckStatus::failed: return "failed";
    case CheckStatus::info: return "info";
  }
  return "info";
}

double ScenarioReport::max_residual() const {
  double m = curve_summary.max_residual;
  if (eigen) m = std::max(m, eigen->residual);
  return m;
}

ScenarioReport run_scenario(const ScenarioConfig& config, const RunOptions& options) {
  const auto model = stage("model", [&] { return resolve_model(config); });
  const std::uint64_t seed = options.seed.value_or(config.seed);

  ScenarioReport r;
  r.name = config.name;
  r.model = model.name;
  r.expected = model.expected;
  if (options.write_outputs) {
    r.output_directory = options.output_root ? *options.output_root / config.name
                                             : std::filesystem::path(config.outputs.directory);
    std::filesystem::create_directories(r.output_directory);
  }
  const bool csv = options.write_outputs && config.outputs.wants("csv");
  const bool json = options.write_outputs && config.outputs.wants("json");

  const auto grid = stage("grid", [&] { return model.default_grid(); });
  r.nodes = grid.size();
  ValidationOptions vopts;
  vopts.seed = seed;
  r.validation = stage("validate", [&] { return validate_model(model.kernel, model.death_rate, grid, vopts); });
  const auto disc = stage("assemble", [&] { return discretize(model.kernel, model.death_rate, grid); });
  if (options.dump_matrix && csv) {
    std::ostringstream out;
    write_matrix_csv(disc.jump, out);
    write_text_file(r.output_directory / "jump_matrix.csv", out.str());
  }

  SolverOptions solver;
  solver.tol_lambda = config.solver.tol_lambda;
  solver.tol_spr = config.solver.tol_spr;

  r.curve = stage("curve", [&] {
    const auto lambdas = expand_schedule(config.lambda_schedule, disc);
    return spr_curve(disc, lambdas, solver.power);
  });
  r.curve_summary = summarize(r.curve);
  if (csv) {
    std::ostringstream out;
    write_curve_csv(r.curve, out);
    write_text_file(r.output_directory / "curve.csv", out.str());
  }

  r.condition = stage("condition", [&] { return check_condition(disc, solver.condition); });
  if (csv) {
    SprCurve left{r.condition.samples, disc.inf_a};
    std::reverse(left.samples.begin(), left.samples.end());
    std::ostringstream out;
    write_curve_csv(left, out);
    write_text_file(r.output_directory / "left_limit.csv", out.str());
  }

  try {
    r.eigen = solve_principal(disc, r.condition, solver);
    r.solver_outcome = r.eigen->converged ? "converged" : "not_converged";
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::condition_not_certified && e.kind() != ErrorKind::bracket_failure) {
      throw Error(e.kind(), fmt::format("[solve] {}", e.detail()));
    }
    r.solver_outcome = std::string(to_string(e.kind()));
  }
  if (r.eigen) {
    if (csv) {
      std::ostringstream out;
      write_eigenfunction_csv(*r.eigen, grid, out);
      write_text_file(r.output_directory / "eigenfunction.csv", out.str());
    }
    if (json) {
      std::ostringstream out;
      write_eigen_json(*r.eigen, "eigenfunction.csv", out);
      write_text_file(r.output_directory / "eigen.json", out.str());
    }
  }

  stage("certify", [&] { certify(r, model, disc, solver.power); });

  if (config.dynamics.enabled) {
    stage("simulate", [&] { simulate(r, config, disc); });
  }

  stage("verify", [&] {
    const double mu = r.eigen ? r.eigen->lambda0 + 1.0 : disc.j_norm - disc.inf_a + 1.0;
    r.resolvent = check_resolvent_positive(disc, mu, verify_trials, seed);
    if (r.eigen) r.nussbaum_lambda0 = lambda0_from_resolvent(disc, mu);
    r.maximum_principle = check_maximum_principle(disc, verify_trials, seed);
  });
  if (json) {
    std::ostringstream out;
    write_verify_json(*r.resolvent, r.nussbaum_lambda0.value_or(std::nan("")),
                      *r.maximum_principle, out);
    write_text_file(r.output_directory / "verify.json", out.str());
  }

  if (config.truncation_sweep.enabled) {
    r.truncation_sweep = stage("truncation_sweep", [&] {
      const double half = std::get<TruncatedLine>(model.domain).half_width;
      const std::size_t n = config.truncation_sweep.n.value_or(model.default_nodes);
      TruncationSweepResult t;
      t.half_width = half;
      t.nodes = n;
      if (n == model.default_nodes && r.eigen) {
        t.lambda0 = r.eigen->lambda0;
      } else {
        const auto base = *rescale_truncation(model, half, n);
        t.lambda0 = solve_principal(base.kernel, base.death_rate, base.default_grid(), solver).lambda0;
      }
      const auto doubled = *rescale_truncation(model, 2.0 * half, 2 * n - 1);
      t.lambda0_doubled =
          solve_principal(doubled.kernel, doubled.death_rate, doubled.default_grid(), solver).lambda0;
      t.delta = std::abs(t.lambda0_doubled - t.lambda0);
      return t;
    });
  }

  evaluate(r, config);
  if (json) write_text_file(r.output_directory / "report.json", report_json(r));
  return r;
}

std::string report_json(const ScenarioReport& r) {
  nlohmann::ordered_json j;
  j["name"] = r.name;
  j["model"] = r.model;
  j["expected"] = to_string(r.expected);
  j["nodes"] = r.nodes;
  j["verdict"] = to_string(r.verdict);

  auto& v = j["validation"];
  v["valid"] = r.validation.valid();
  v["pairs_checked"] = r.validation.pairs_checked;
  v["violations"] = nlohmann::json::array();
  for (std::size_t k = 0; k < std::min<std::size_t>(r.validation.violations.size(), 20); ++k) {
    const auto& w = r.validation.violations[k];
    v["violations"].push_back({{"what", w.what}, {"x", num(w.x)}, {"y", num(w.y)}});
  }

  auto& c = j["curve"];
  c["samples"] = r.curve_summary.samples;
  c["supremum"] = num(r.curve_summary.supremum);
  c["monotone"] = r.curve_summary.monotone;
  c["within_norm_bound"] = r.curve_summary.within_norm_bound;
  c["all_converged"] = r.curve_summary.all_converged;
  c["max_residual"] = num(r.curve_summary.max_residual);

  auto& cond = j["condition"];
  cond["verdict"] = to_string(r.condition.verdict);
  cond["limit_lower_estimate"] = num(r.condition.limit_lower_estimate);
  cond["diverged"] = r.condition.diverged;

  j["solver_outcome"] = r.solver_outcome;
  if (r.eigen) {
    auto& e = j["eigen"];
    e["lambda0"] = num(r.eigen->lambda0);
    e["residual"] = num(r.eigen->residual);
    e["generator_residual"] = num(r.eigen->generator_residual);
    e["spr_at_lambda0"] = num(r.eigen->spr_at_lambda0);
    e["bracket_lo"] = num(r.eigen->bracket_lo);
    e["bracket_hi"] = num(r.eigen->bracket_hi);
    e["iterations"] = r.eigen->iterations;
  } else {
    j["eigen"] = nullptr;
  }

  j["certificates"] = nlohmann::json::array();
  for (const auto& cc : r.certificates) {
    j["certificates"].push_back({{"kind", to_string(cc.certificate.kind)},
                                 {"lambda", num(cc.certificate.lambda)},
                                 {"lower_bound", num(cc.certificate.lower_bound)},
                                 {"measured_spr", num(cc.measured_spr)},
                                 {"witness", cc.certificate.witness}});
  }

  if (r.dynamics) {
    j["dynamics"] = {{"rate", num(r.dynamics->rate)},
                     {"t_start", num(r.dynamics->t_start)},
                     {"t_end", num(r.dynamics->t_end)},
                     {"fit_residual", num(r.dynamics->fit_residual)},
                     {"min_state", num(r.min_state)}};
  } else {
    j["dynamics"] = nullptr;
  }
  if (r.resolvent) {
    j["resolvent"] = {{"mu", num(r.resolvent->mu)},
                      {"is_positive", r.resolvent->is_positive},
                      {"neumann_consistent", r.resolvent->neumann_consistent},
                      {"lambda0_from_resolvent",
                       r.nussbaum_lambda0 ? num(*r.nussbaum_lambda0) : nlohmann::json(nullptr)}};
  }
  if (r.maximum_principle) {
    j["maximum_principle"] = {{"spr_a0", num(r.maximum_principle->spr_a0)},
                              {"inverse_positive", r.maximum_principle->inverse_positive},
                              {"equivalence_holds", r.maximum_principle->equivalence_holds}};
  }
  if (r.truncation_sweep) {
    j["truncation_sweep"] = {{"half_width", num(r.truncation_sweep->half_width)},
                             {"nodes", r.truncation_sweep->nodes},
                             {"lambda0", num(r.truncation_sweep->lambda0)},
                             {"lambda0_doubled", num(r.truncation_sweep->lambda0_doubled)},
                             {"delta", num(r.truncation_sweep->delta)}};
  }
  j["checks"] = nlohmann::json::array();
  for (const auto& ch : r.checks) {
    j["checks"].push_back(
        {{"name", ch.name}, {"status", to_string(ch.status)}, {"detail", ch.detail}});
  }
  return j.dump(2) + "\n";
}

int exit_code_for(const ScenarioReport& report) {
  switch (report.verdict) {
    case ScenarioVerdict::reproduced: return exit_ok;
    case ScenarioVerdict::mismatch: return exit_mismatch;
    case ScenarioVerdict::inconclusive: return exit_numerical_failure;
  }
  return exit_numerical_failure;
}

SuiteResult run_suite(const std::vector<std::filesystem::path>& configs,
                      const RunOptions& options, std::ostream& table, unsigned max_threads) {
  if (configs.empty()) throw ConfigError("", 0, "no scenario configs given");
  std::vector<ScenarioConfig> parsed;
  parsed.reserve(configs.size());
  std::set<std::string> names;
  for (const auto& path : configs) {
    try {
      parsed.push_back(load_config(path));
    } catch (const ConfigError& e) {
      throw ConfigError(e.key(), e.line(), fmt::format("{}: {}", path.string(), e.detail()));
    }
    if (!names.insert(parsed.back().name).second) {
      throw ConfigError("name", 0,
                        fmt::format("{}: duplicate scenario name '{}'", path.string(),
                                    parsed.back().name));
    }
  }

  SuiteResult result;
  result.entries.resize(parsed.size());
  unsigned threads = max_threads != 0 ? max_threads : std::thread::hardware_concurrency();
  threads = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(parsed.size()));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < parsed.size(); k = next++) {
      auto& entry = result.entries[k];
      entry.source = parsed[k].source;
      try {
        entry.report = run_scenario(parsed[k], options);
      } catch (const std::exception& e) {
        entry.error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  table << fmt::format("{:<28} {:<13} {:>20} {:>14} {:>12}\n", "scenario", "verdict",
                       "lambda0/plateau", "rate", "max_resid");
  int code = exit_ok;
  for (std::size_t k = 0; k < parsed.size(); ++k) {
    const auto& entry = result.entries[k];
    if (!entry.report) {
      table << fmt::format("{:<28} {:<13} {}\n", parsed[k].name, "error", entry.error);
      code = std::max(code, exit_numerical_failure);
      continue;
    }
    const auto& r = *entry.report;
    const double value = r.eigen ? r.eigen->lambda0 : r.condition.limit_lower_estimate;
    const std::string rate = r.dynamics ? fmt::format("{:.6g}", r.dynamics->rate) : "-";
    table << fmt::format("{:<28} {:<13} {:>20.12g} {:>14} {:>12.3g}\n", r.name,
                         to_string(r.verdict), value, rate, r.max_residual());
    code = std::max(code, exit_code_for(r));
  }
  result.exit_code = code;
  return result;
}

}  // namespace nld
