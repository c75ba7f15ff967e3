// nldiff: command line front end for the nonlocal diffusion eigenvalue library.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "nld/config.hpp"
#include "nld/errors.hpp"
#include "nld/export.hpp"
#include "nld/scenario.hpp"

namespace fs = std::filesystem;

namespace {

struct Globals {
  std::string out;
  std::uint64_t seed = 0;
  bool seed_given = false;
  bool dump_matrix = false;
  bool json = false;
};

fs::path output_dir(const Globals& g, const nld::ScenarioConfig& cfg) {
  fs::path dir = g.out.empty() ? fs::path(cfg.outputs.directory) : fs::path(g.out);
  fs::create_directories(dir);
  return dir;
}

std::uint64_t seed_of(const Globals& g, const nld::ScenarioConfig& cfg) {
  return g.seed_given ? g.seed : cfg.seed;
}

void maybe_dump(const Globals& g, const nld::Discretization& disc, const fs::path& dir) {
  if (!g.dump_matrix) return;
  std::ostringstream out;
  nld::write_matrix_csv(disc.jump, out);
  nld::write_text_file(dir / "jump_matrix.csv", out.str());
}

int cmd_validate(const Globals& g, const std::string& path) {
  const auto cfg = nld::load_config(path);
  const auto model = nld::resolve_model(cfg);
  nld::ValidationOptions opts;
  opts.seed = seed_of(g, cfg);
  const auto report = nld::validate_model(model.kernel, model.death_rate, model.default_grid(), opts);
  if (g.json) {
    nlohmann::ordered_json j;
    j["model"] = model.name;
    j["valid"] = report.valid();
    j["pairs_checked"] = report.pairs_checked;
    j["violations"] = nlohmann::json::array();
    for (const auto& v : report.violations) {
      j["violations"].push_back({{"what", v.what}, {"x", v.x}, {"y", v.y}});
    }
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << fmt::format("{}: {} ({} pairs checked, {} violations)\n", model.name,
                             report.valid() ? "valid" : "INVALID", report.pairs_checked,
                             report.violations.size());
    for (const auto& v : report.violations) {
      std::cout << fmt::format("  {} at ({}, {})\n", v.what, v.x, v.y);
    }
  }
  return report.valid() ? nld::exit_ok : nld::exit_mismatch;
}

int cmd_sweep(const Globals& g, const std::string& path) {
  const auto cfg = nld::load_config(path);
  const auto model = nld::resolve_model(cfg);
  const auto disc = nld::discretize(model.kernel, model.death_rate, model.default_grid());
  const auto dir = output_dir(g, cfg);
  maybe_dump(g, disc, dir);

  const auto lambdas = nld::expand_schedule(cfg.lambda_schedule, disc);
  const auto curve = nld::spr_curve(disc, lambdas);
  std::ostringstream out;
  nld::write_curve_csv(curve, out);
  nld::write_text_file(dir / "curve.csv", out.str());
  const auto mono = nld::check_monotone(curve, 1e-9);
  if (g.json) {
    nlohmann::ordered_json j;
    j["model"] = model.name;
    j["samples"] = curve.samples.size();
    j["supremum"] = curve.supremum();
    j["monotone"] = mono.ok;
    j["curve_csv"] = (dir / "curve.csv").string();
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << fmt::format("{}: {} samples, supremum {:.12g}, monotone {}\nwrote {}\n",
                             model.name, curve.samples.size(), curve.supremum(), mono.ok,
                             (dir / "curve.csv").string());
  }
  return mono.ok ? nld::exit_ok : nld::exit_mismatch;
}

int cmd_solve(const Globals& g, const std::string& path) {
  const auto cfg = nld::load_config(path);
  const auto model = nld::resolve_model(cfg);
  const auto grid = model.default_grid();
  const auto disc = nld::discretize(model.kernel, model.death_rate, grid);
  const auto dir = output_dir(g, cfg);
  maybe_dump(g, disc, dir);
  nld::SolverOptions opts;
  opts.tol_lambda = cfg.solver.tol_lambda;
  opts.tol_spr = cfg.solver.tol_spr;
  const auto result = nld::solve_principal(disc, opts);

  std::ostringstream csv;
  nld::write_eigenfunction_csv(result, grid, csv);
  nld::write_text_file(dir / "eigenfunction.csv", csv.str());
  std::ostringstream js;
  nld::write_eigen_json(result, "eigenfunction.csv", js);
  nld::write_text_file(dir / "eigen.json", js.str());
  if (g.json) {
    std::cout << js.str();
  } else {
    std::cout << fmt::format("{}: lambda0 = {:.12g} (residual {:.3g}, {} bisections)\nwrote {}\n",
                             model.name, result.lambda0, result.residual, result.iterations,
                             (dir / "eigen.json").string());
  }
  return result.converged ? nld::exit_ok : nld::exit_numerical_failure;
}

int cmd_simulate(const Globals& g, const std::string& path) {
  const auto cfg = nld::load_config(path);
  const auto model = nld::resolve_model(cfg);
  const auto grid = model.default_grid();
  const auto disc = nld::discretize(model.kernel, model.death_rate, grid);
  const auto dir = output_dir(g, cfg);
  maybe_dump(g, disc, dir);
  const auto traj = nld::simulate_config(cfg.dynamics, disc);
  const auto rate = nld::estimate_rate(traj);

  std::ostringstream out;
  nld::write_trajectory_csv(traj, out);
  nld::write_text_file(dir / "trajectory.csv", out.str());
  std::ostringstream states;
  nld::write_states_csv(traj, grid, states);
  nld::write_text_file(dir / "states.csv", states.str());
  if (g.json) {
    nlohmann::ordered_json j;
    j["model"] = model.name;
    j["rate"] = rate.rate;
    j["t_start"] = rate.t_start;
    j["t_end"] = rate.t_end;
    j["fit_residual"] = rate.fit_residual;
    j["min_state"] = traj.min_entry();
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << fmt::format("{}: rate {:.8g} over [{:.4g}, {:.4g}], min state {:.3g}\nwrote {}\n",
                             model.name, rate.rate, rate.t_start, rate.t_end, traj.min_entry(),
                             (dir / "trajectory.csv").string());
  }
  return nld::exit_ok;
}

int cmd_verify(const Globals& g, const std::string& path) {
  const auto cfg = nld::load_config(path);
  const auto model = nld::resolve_model(cfg);
  const auto disc = nld::discretize(model.kernel, model.death_rate, model.default_grid());
  const auto dir = output_dir(g, cfg);
  maybe_dump(g, disc, dir);
  const auto seed = seed_of(g, cfg);

  double mu = disc.j_norm - disc.inf_a + 1.0;
  double nussbaum = std::nan("");
  std::optional<nld::EigenResult> eigen;
  try {
    eigen = nld::solve_principal(disc);
    mu = eigen->lambda0 + 1.0;
  } catch (const nld::Error& e) {
    if (e.kind() != nld::ErrorKind::condition_not_certified &&
        e.kind() != nld::ErrorKind::bracket_failure) {
      throw;
    }
  }
  const auto resolvent = nld::check_resolvent_positive(disc, mu, 10, seed);
  if (eigen) nussbaum = nld::lambda0_from_resolvent(disc, mu);
  const auto mp = nld::check_maximum_principle(disc, 10, seed);
  std::ostringstream js;
  nld::write_verify_json(resolvent, nussbaum, mp, js);
  nld::write_text_file(dir / "verify.json", js.str());
  if (g.json) {
    std::cout << js.str();
  } else {
    std::cout << fmt::format(
        "{}: resolvent at mu={:.6g} positive {}; maximum principle equivalence {} "
        "(spr(A0) = {:.6g})\n",
        model.name, mu, resolvent.is_positive, mp.equivalence_holds, mp.spr_a0);
    if (eigen) {
      std::cout << fmt::format("  lambda0 from resolvent {:.12g}, from bisection {:.12g}\n",
                               nussbaum, eigen->lambda0);
    }
  }
  const bool ok = resolvent.is_positive && mp.equivalence_holds && mp.solutions_nonnegative;
  return ok ? nld::exit_ok : nld::exit_mismatch;
}

nld::RunOptions run_options(const Globals& g) {
  nld::RunOptions o;
  if (!g.out.empty()) o.output_root = g.out;
  if (g.seed_given) o.seed = g.seed;
  o.dump_matrix = g.dump_matrix;
  return o;
}

int cmd_scenario(const Globals& g, const std::string& path) {
  const auto cfg = nld::load_config(path);
  const auto report = nld::run_scenario(cfg, run_options(g));
  if (g.json) {
    std::cout << nld::report_json(report);
  } else {
    std::cout << fmt::format("{} [{}]: {}\n", report.name, report.model, to_string(report.verdict));
    for (const auto& c : report.checks) {
      std::cout << fmt::format("  {:<7} {:<28} {}\n", to_string(c.status), c.name, c.detail);
    }
  }
  return nld::exit_code_for(report);
}

int cmd_suite(const Globals& g, const std::string& dir) {
  const auto files = nld::list_configs(dir);
  const auto result = nld::run_suite(files, run_options(g), std::cout);
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Principal eigenvalues of nonlocal diffusion operators"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--out", g.out, "output directory");
  auto* seed_opt = app.add_option("--seed", g.seed, "random seed (u64)");
  app.add_flag("--dump-matrix", g.dump_matrix, "also write the assembled jump matrix");
  app.add_flag("--json", g.json, "print machine-readable JSON");

  std::string target;
  struct Sub {
    const char* name;
    const char* help;
    int (*run)(const Globals&, const std::string&);
  };
  const Sub subs[] = {
      {"validate", "check the declared hypotheses of a model", cmd_validate},
      {"sweep", "spectral radius curve (curve.csv)", cmd_sweep},
      {"solve", "principal eigenvalue (eigen.json, eigenfunction.csv)", cmd_solve},
      {"simulate", "integrate the evolution equation (trajectory.csv)", cmd_simulate},
      {"verify", "maximum principle and resolvent checks (verify.json)", cmd_verify},
      {"scenario", "full pipeline for one config", cmd_scenario},
      {"suite", "every config in a directory", cmd_suite},
  };
  std::vector<std::pair<CLI::App*, const Sub*>> commands;
  for (const auto& s : subs) {
    auto* sub = app.add_subcommand(s.name, s.help);
    sub->add_option(std::string(s.name) == "suite" ? "dir" : "config", target)->required();
    // Global flags are also accepted after the subcommand.
    sub->fallthrough();
    commands.emplace_back(sub, &s);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : nld::exit_config_error;
  }
  g.seed_given = seed_opt->count() > 0;

  try {
    for (const auto& [sub, s] : commands) {
      if (sub->parsed()) return s->run(g, target);
    }
  } catch (const nld::ConfigError& e) {
    std::cerr << "config error";
    if (!e.key().empty()) std::cerr << " at '" << e.key() << "'";
    if (e.line() > 0) std::cerr << " (line " << e.line() << ")";
    std::cerr << ": " << e.detail() << '\n';
    return nld::exit_config_error;
  } catch (const nld::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return nld::exit_numerical_failure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return nld::exit_numerical_failure;
  }
  return nld::exit_config_error;
}
