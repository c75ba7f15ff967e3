#include "nld/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "nld/errors.hpp"

namespace nld {

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::condition_holds: return "condition_holds";
    case Verdict::no_evidence: return "no_evidence";
    case Verdict::out_of_scope: return "out_of_scope";
  }
  return "unknown";
}

std::string_view to_string(CertificateKind k) noexcept {
  switch (k) {
    case CertificateKind::drnovsek: return "drnovsek";
    case CertificateKind::log_bound: return "log_bound";
    case CertificateKind::rayleigh: return "rayleigh";
  }
  return "unknown";
}

ConditionReport check_condition(const Discretization& disc, const ConditionOptions& options) {
  ConditionReport report;
  if (disc.j_norm == 0.0) {
    report.verdict = Verdict::out_of_scope;
    return report;
  }
  auto limit = left_endpoint_limit(disc, options.left);
  report.limit_lower_estimate = limit.supremum;
  report.diverged = limit.diverged;
  report.samples = std::move(limit.samples);
  const bool all_converged = std::all_of(report.samples.begin(), report.samples.end(),
                                         [](const CurveSample& s) { return s.converged; });
  if (report.diverged || report.limit_lower_estimate > 1.0 + options.margin) {
    report.verdict = Verdict::condition_holds;
  } else if (!all_converged) {
    report.verdict = Verdict::out_of_scope;
  } else {
    report.verdict = Verdict::no_evidence;
  }
  return report;
}

ConditionReport check_condition(const Kernel& kernel, const DeathRate& a, const Grid& grid,
                                const ConditionOptions& options) {
  return check_condition(discretize(kernel, a, grid), options);
}

EigenResult solve_principal(const Discretization& disc, const ConditionReport& condition,
                            const SolverOptions& options) {
  if (condition.verdict != Verdict::condition_holds) {
    throw Error(ErrorKind::condition_not_certified,
                fmt::format("left-endpoint verdict is {} (lower estimate {})",
                            to_string(condition.verdict), condition.limit_lower_estimate));
  }
  // Samples run towards -inf a, so the first one above 1 is the largest.
  double lo = 0.0;
  bool found = false;
  for (const auto& s : condition.samples) {
    if (s.radius > 1.0) {
      lo = s.lambda;
      found = true;
      break;
    }
  }
  if (!found) {
    throw Error(ErrorKind::bracket_failure, "no left-endpoint sample has spr > 1");
  }
  double hi = disc.j_norm - disc.inf_a + 1.0;
  if (!(hi > lo)) {
    throw Error(ErrorKind::bracket_failure,
                fmt::format("upper bracket {} does not exceed lower bracket {}", hi, lo));
  }
  PowerOptions power = options.power;
  auto g = [&](double lambda) {
    const auto power_result = spectral_radius(disc.auxiliary(lambda), power);
    power.start = warm_start(power_result.perron_vector);
    return power_result.radius - 1.0;
  };
  if (g(hi) >= 0.0) {
    throw Error(ErrorKind::bracket_failure,
                fmt::format("spr(A) >= 1 at the norm-bound endpoint {}", hi));
  }
  if (g(lo) <= 0.0) {
    throw Error(ErrorKind::bracket_failure,
                fmt::format("spr(A) <= 1 at the left endpoint {}", lo));
  }

  EigenResult result;
  std::size_t it = 0;
  while (it < options.max_bisections) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= options.tol_lambda * (1.0 + std::abs(mid))) break;
    ++it;
    if (g(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  result.iterations = it;
  result.bracket_lo = lo;
  result.bracket_hi = hi;
  result.lambda0 = 0.5 * (lo + hi);

  const auto aux = disc.auxiliary(result.lambda0);
  const auto power_result = spectral_radius(aux, power);
  const auto& grid = disc.grid();
  result.spr_at_lambda0 = power_result.radius;
  result.eigenfunction = power_result.perron_vector.cwiseMax(0.0);
  result.eigenfunction /= grid.l1_norm(result.eigenfunction);
  const Vector& u = result.eigenfunction;
  result.residual = grid.l1_norm(aux.matrix * u - u);
  const auto gen = disc.generator();
  result.generator_residual = grid.l1_norm(gen.matrix * u - result.lambda0 * u);
  result.converged = power_result.converged && std::abs(power_result.radius - 1.0) <= options.tol_spr &&
                     hi - lo <= options.tol_lambda * (1.0 + std::abs(result.lambda0));
  return result;
}

EigenResult solve_principal(const Discretization& disc, const SolverOptions& options) {
  return solve_principal(disc, check_condition(disc, options.condition), options);
}

EigenResult solve_principal(const Kernel& kernel, const DeathRate& a, const Grid& grid,
                            const SolverOptions& options) {
  return solve_principal(discretize(kernel, a, grid), options);
}

Certificate drnovsek_bound(const DiscreteOperator& auxiliary, const Eigen::Ref<const Vector>& u,
                           double support_threshold) {
  if (u.size() != auxiliary.size()) {
    throw Error(ErrorKind::dimension_mismatch, "test function does not match operator");
  }
  if (u.minCoeff() < 0.0) {
    throw Error(ErrorKind::invalid_argument, "test function must be nonnegative");
  }
  const Vector au = auxiliary.matrix * u;
  double bound = std::numeric_limits<double>::infinity();
  std::size_t support = 0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (u[i] > support_threshold) {
      bound = std::min(bound, au[i] / u[i]);
      ++support;
    }
  }
  if (support == 0) {
    throw Error(ErrorKind::empty_test_function, "test function vanishes on the grid");
  }
  return {CertificateKind::drnovsek, auxiliary.lambda, bound,
          fmt::format("min (Au)_i/u_i over {} support nodes", support)};
}

Vector log_bound_test_function(const DeathRate& a, double gamma, double delta, const Grid& grid) {
  const auto* at = std::get_if<AttainedAt>(&a.inf_location);
  if (at == nullptr) {
    throw Error(ErrorKind::wrong_infimum_kind,
                "the log-bound test function needs an attained infimum");
  }
  if (!(gamma > 0.0) || !(delta > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "gamma and delta must be positive");
  }
  const double a_star = a(at->x);
  const auto& x = grid.nodes();
  Vector u = Vector::Zero(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (distance(grid.domain(), x[i], at->x) < delta) u[i] = 1.0 / (gamma + a(x[i]) - a_star);
  }
  return u;
}

double log_bound(double epsilon, double lipschitz, double delta, double gamma) {
  if (!(epsilon > 0.0 && lipschitz > 0.0 && delta > 0.0 && gamma > 0.0)) {
    throw Error(ErrorKind::invalid_argument,
                fmt::format("log bound needs positive arguments (eps={}, C={}, delta={}, "
                            "gamma={})",
                            epsilon, lipschitz, delta, gamma));
  }
  return epsilon / lipschitz * std::log((lipschitz * delta + gamma) / gamma);
}

double log_bound_gamma(double epsilon, double lipschitz, double delta, double target) {
  if (!(epsilon > 0.0 && lipschitz > 0.0 && delta > 0.0 && target > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "gamma selection needs positive arguments");
  }
  return lipschitz * delta / std::expm1(lipschitz * target / epsilon);
}

Certificate log_bound_certificate(const Kernel& kernel, const DeathRate& a, double target) {
  const auto* at = std::get_if<AttainedAt>(&a.inf_location);
  if (at == nullptr) {
    throw Error(ErrorKind::wrong_infimum_kind, "log-bound certificate needs x*");
  }
  if (!kernel.lower_bound || !std::holds_alternative<SquareRegion>(kernel.lower_bound->region)) {
    throw Error(ErrorKind::invalid_argument,
                "log-bound certificate needs a square-region kernel lower bound");
  }
  const Lipschitz* lip = a.regularity ? std::get_if<Lipschitz>(&*a.regularity) : nullptr;
  if (lip == nullptr) {
    throw Error(ErrorKind::invalid_argument, "log-bound certificate needs a Lipschitz a");
  }
  const auto& meta = *kernel.lower_bound;
  const double gamma = log_bound_gamma(meta.epsilon, lip->constant, meta.delta, target);
  const double a_star = a(at->x);
  const double lambda = -a_star + 0.5 * gamma;
  const double bound = log_bound(meta.epsilon, lip->constant, meta.delta, gamma);
  return {CertificateKind::log_bound, lambda, bound,
          fmt::format("u_gamma with gamma={:.6g}, delta={}, eps={}, C={}, x*={}", gamma,
                      meta.delta, meta.epsilon, lip->constant, at->x)};
}

double weighted_inner_product(const Eigen::Ref<const Vector>& f,
                              const Eigen::Ref<const Vector>& g, double lambda,
                              const Discretization& disc) {
  check_lambda(lambda, disc.inf_a);
  if (f.size() != disc.a_values.size() || g.size() != disc.a_values.size()) {
    throw Error(ErrorKind::dimension_mismatch, "grid functions do not match the grid");
  }
  const auto& w = disc.grid().weights();
  return (f.array() * g.array() * (disc.a_values.array() + lambda) * w.array()).sum();
}

double weighted_inner_product(const Eigen::Ref<const Vector>& f,
                              const Eigen::Ref<const Vector>& g, double lambda,
                              const DeathRate& a, const Grid& grid) {
  check_lambda(lambda, a.inf_value);
  if (f.size() != static_cast<Eigen::Index>(grid.size()) ||
      g.size() != static_cast<Eigen::Index>(grid.size())) {
    throw Error(ErrorKind::dimension_mismatch, "grid functions do not match the grid");
  }
  const Vector av = grid.sample(a.eval);
  return (f.array() * g.array() * (av.array() + lambda) * grid.weights().array()).sum();
}

Certificate rayleigh_certificate(const Kernel& kernel, const Discretization& disc,
                                 double lambda, const Eigen::Ref<const Vector>& v) {
  if (!kernel.symmetric) {
    throw Error(ErrorKind::symmetry_required,
                fmt::format("kernel '{}' is not declared symmetric", kernel.description));
  }
  check_lambda(lambda, disc.inf_a);
  if (v.size() != disc.a_values.size()) {
    throw Error(ErrorKind::dimension_mismatch, "test function does not match the grid");
  }
  if (v.cwiseAbs().maxCoeff() == 0.0) {
    throw Error(ErrorKind::empty_test_function, "test function vanishes on the grid");
  }
  const auto aux = disc.auxiliary(lambda);
  const Vector av = aux.matrix * v;
  const double num = weighted_inner_product(av, v, lambda, disc);
  const double den = weighted_inner_product(v, v, lambda, disc);
  return {CertificateKind::rayleigh, lambda, num / den, "<A v, v> / <v, v> in (lambda + a)"};
}

Certificate rayleigh_certificate(const Kernel& kernel, const DeathRate& a, const Grid& grid,
                                 double lambda, const Eigen::Ref<const Vector>& v) {
  if (!kernel.symmetric) {
    throw Error(ErrorKind::symmetry_required,
                fmt::format("kernel '{}' is not declared symmetric", kernel.description));
  }
  return rayleigh_certificate(kernel, discretize(kernel, a, grid), lambda, v);
}

Vector indicator(const Grid& grid, double lo, double hi) {
  return grid.sample([lo, hi](double x) { return (lo < x && x < hi) ? 1.0 : 0.0; });
}

Vector rayleigh_test_function(const Discretization& disc, double lambda, double center,
                           double delta, double u_lo, double u_hi) {
  check_lambda(lambda, disc.inf_a);
  const auto& grid = disc.grid();
  const auto& x = grid.nodes();
  Vector v = indicator(grid, u_lo, u_hi);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (distance(grid.domain(), x[i], center) < delta) {
      v[i] += 1.0 / (lambda + disc.a_values[i]);
    }
  }
  return v;
}

std::vector<std::complex<double>> dense_spectrum(const DiscreteOperator& op) {
  Eigen::EigenSolver<Matrix> solver(op.matrix, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::invalid_argument, "dense eigensolver did not converge");
  }
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

Vector symmetric_generator_spectrum(const Discretization& disc) {
  const Vector sqrt_w = disc.grid().weights().cwiseSqrt();
  Matrix s = sqrt_w.asDiagonal() * disc.jump.matrix * sqrt_w.cwiseInverse().asDiagonal();
  const double asym = (s - s.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * std::max(1.0, s.cwiseAbs().maxCoeff())) {
    throw Error(ErrorKind::symmetry_required,
                fmt::format("symmetrised jump matrix has asymmetry {}", asym));
  }
  s = 0.5 * (s + s.transpose());
  s.diagonal() -= disc.a_values;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(s, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::invalid_argument, "symmetric eigensolver did not converge");
  }
  return solver.eigenvalues();
}

}  // namespace nld
