#include "nld/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>

#include <Eigen/LU>
#include <fmt/format.h>

#include "nld/errors.hpp"
#include "nld/spectral.hpp"

namespace nld {
namespace {

constexpr double kInverseSignTol = 1e-12;

Vector random_nonnegative(Eigen::Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = uniform(rng);
  return v;
}

double relative_difference(const Vector& a, const Vector& b) {
  const double scale = std::max(b.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

}  // namespace

double Trajectory::min_entry() const {
  double lowest = std::numeric_limits<double>::infinity();
  for (const auto& s : states) lowest = std::min(lowest, s.minCoeff());
  return lowest;
}

double row_sum_norm(const DiscreteOperator& op) {
  return op.matrix.cwiseAbs().rowwise().sum().maxCoeff();
}

Trajectory integrate(const DiscreteOperator& generator, const Eigen::Ref<const Vector>& u0,
                     double t_end, double dt, const IntegrateOptions& options) {
  if (u0.size() != generator.size()) {
    throw Error(ErrorKind::dimension_mismatch, "initial state does not match operator");
  }
  if (!(dt > 0.0) || !(t_end >= dt)) {
    throw Error(ErrorKind::invalid_argument,
                fmt::format("need dt > 0 and t_end >= dt (dt = {}, t_end = {})", dt, t_end));
  }
  const double norm = row_sum_norm(generator);
  if (dt * norm > options.stability_guard) {
    throw UnstableStepError(dt, options.stability_guard / norm);
  }
  const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
  const double h = t_end / static_cast<double>(steps);
  const std::size_t stride = std::max<std::size_t>(1, options.stride);
  const auto& m = generator.matrix;
  const auto& grid = generator.grid;

  Trajectory traj;
  Vector u = u0;
  auto record = [&](double t) {
    traj.times.push_back(t);
    traj.norms_l1.push_back(grid.l1_norm(u));
    traj.states.push_back(u);
  };
  record(0.0);

  Vector k1(u.size()), k2(u.size()), k3(u.size()), k4(u.size()), tmp(u.size());
  for (std::size_t step = 1; step <= steps; ++step) {
    k1.noalias() = m * u;
    tmp = u + 0.5 * h * k1;
    k2.noalias() = m * tmp;
    tmp = u + 0.5 * h * k2;
    k3.noalias() = m * tmp;
    tmp = u + h * k3;
    k4.noalias() = m * tmp;
    u += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (step % stride == 0 || step == steps) {
      record(step == steps ? t_end : static_cast<double>(step) * h);
    }
  }
  return traj;
}

RateEstimate estimate_rate(const Trajectory& trajectory, double tail_fraction) {
  if (!(tail_fraction > 0.0 && tail_fraction < 1.0)) {
    throw Error(ErrorKind::invalid_argument, "tail fraction must lie in (0, 1)");
  }
  const std::size_t n = trajectory.size();
  const auto count = std::max<std::size_t>(
      2, static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(n))));
  if (n < 2 || count > n) {
    throw Error(ErrorKind::degenerate_trajectory, "too few samples to fit a rate");
  }
  const std::size_t first = n - count;
  double st = 0.0, sy = 0.0;
  std::vector<double> logs(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double norm = trajectory.norms_l1[first + k];
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw Error(ErrorKind::degenerate_trajectory,
                  fmt::format("norm {} at t = {}", norm, trajectory.times[first + k]));
    }
    logs[k] = std::log(norm);
    st += trajectory.times[first + k];
    sy += logs[k];
  }
  const double mean_t = st / static_cast<double>(count);
  const double mean_y = sy / static_cast<double>(count);
  double stt = 0.0, sty = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const double dt = trajectory.times[first + k] - mean_t;
    stt += dt * dt;
    sty += dt * (logs[k] - mean_y);
  }
  RateEstimate est;
  est.rate = sty / stt;
  est.t_start = trajectory.times[first];
  est.t_end = trajectory.times.back();
  double ss = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const double r = logs[k] - (mean_y + est.rate * (trajectory.times[first + k] - mean_t));
    ss += r * r;
  }
  est.fit_residual = std::sqrt(ss / static_cast<double>(count));
  return est;
}

NeumannSum neumann_series(const Matrix& a, const Eigen::Ref<const Vector>& rhs,
                          double term_tol, std::size_t max_terms) {
  NeumannSum out;
  Vector term = rhs;
  out.value = rhs;
  out.terms = 1;
  while (out.terms < max_terms) {
    term = a * term;
    out.value += term;
    ++out.terms;
    if (term.cwiseAbs().maxCoeff() <= term_tol * out.value.cwiseAbs().maxCoeff()) {
      out.converged = true;
      break;
    }
  }
  return out;
}

ResolventReport check_resolvent_positive(const Discretization& disc, double mu,
                                         std::size_t trials, std::uint64_t seed) {
  ResolventReport report;
  report.mu = mu;
  const auto n = disc.jump.size();
  Matrix system = -disc.generator().matrix;
  system.diagonal().array() += mu;
  Eigen::PartialPivLU<Matrix> lu(system);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-14)) {
    throw Error(ErrorKind::singular_resolvent,
                fmt::format("mu I - L is numerically singular at mu = {} (rcond {})", mu,
                            rcond));
  }
  const Matrix inverse = lu.inverse();
  Eigen::Index ri = 0, ci = 0;
  report.min_inverse_entry = inverse.minCoeff(&ri, &ci);
  report.is_positive = report.min_inverse_entry >= -kInverseSignTol;
  if (!report.is_positive) {
    report.witnesses.push_back(fmt::format("inverse({}, {}) = {:.6g}", ri, ci,
                                           report.min_inverse_entry));
  }

  report.spr_auxiliary = std::numeric_limits<double>::quiet_NaN();
  if (mu > -disc.inf_a) {
    const auto aux = disc.auxiliary(mu);
    report.spr_auxiliary = spectral_radius(aux).radius;
    if (report.spr_auxiliary < 1.0) {
      report.neumann_applicable = true;
      report.neumann_consistent = true;
      std::mt19937_64 rng(seed);
      const Vector scale = (disc.a_values.array() + mu).inverse().matrix();
      for (std::size_t t = 0; t < trials; ++t) {
        const Vector f = random_nonnegative(n, rng);
        const Vector direct = lu.solve(f);
        const auto series = neumann_series(aux.matrix, f.cwiseProduct(scale));
        const double err = relative_difference(series.value, direct);
        report.max_neumann_error = std::max(report.max_neumann_error, err);
        if (!series.converged || err > 1e-8 || series.value.minCoeff() < 0.0) {
          report.neumann_consistent = false;
          report.witnesses.push_back(fmt::format(
              "trial {}: series/direct difference {:.3g} after {} terms", t, err,
              series.terms));
        }
      }
    }
  }
  return report;
}

double lambda0_from_resolvent(const Discretization& disc, double mu) {
  Matrix system = -disc.generator().matrix;
  system.diagonal().array() += mu;
  Eigen::PartialPivLU<Matrix> lu(system);
  if (!(lu.rcond() > 1e-14)) {
    throw Error(ErrorKind::singular_resolvent,
                fmt::format("mu I - L is numerically singular at mu = {}", mu));
  }
  Matrix inverse = lu.inverse();
  const double scale = inverse.cwiseAbs().maxCoeff();
  if (inverse.minCoeff() < -kInverseSignTol * std::max(1.0, scale)) {
    throw Error(ErrorKind::invalid_argument,
                fmt::format("resolvent at mu = {} is not positive; mu must exceed the "
                            "principal eigenvalue",
                            mu));
  }
  inverse = inverse.cwiseMax(0.0);
  PowerOptions opts;
  opts.tol = 1e-12;
  const auto power_result = spectral_radius(inverse, opts);
  if (!(power_result.radius > std::numeric_limits<double>::epsilon() * scale)) {
    throw Error(ErrorKind::resolvent_degenerate,
                fmt::format("spr of the resolvent vanishes at mu = {}", mu));
  }
  return mu - 1.0 / power_result.radius;
}

MaximumPrincipleReport check_maximum_principle(const Matrix& a0, std::size_t trials,
                                               std::uint64_t seed) {
  MaximumPrincipleReport report;
  report.spr_a0 = spectral_radius(a0).radius;
  if (std::abs(report.spr_a0 - 1.0) <= 1e-12) {
    throw Error(ErrorKind::singular_system, "spr(A0) = 1: I - A0 is singular");
  }
  const auto n = a0.rows();
  Matrix system = -a0;
  system.diagonal().array() += 1.0;
  Eigen::PartialPivLU<Matrix> lu(system);
  if (!(lu.rcond() > 1e-14)) {
    throw Error(ErrorKind::singular_system, "I - A0 is numerically singular");
  }
  const Matrix inverse = lu.inverse();
  report.min_inverse_entry = inverse.minCoeff();
  report.inverse_positive = report.min_inverse_entry >= -kInverseSignTol;
  report.equivalence_holds = (report.spr_a0 < 1.0) == report.inverse_positive;

  if (report.inverse_positive) {
    std::mt19937_64 rng(seed);
    for (std::size_t t = 0; t < trials; ++t) {
      const Vector g = random_nonnegative(n, rng);
      const Vector u = lu.solve(g);
      if (u.minCoeff() < -1e-10) report.solutions_nonnegative = false;
      if (report.spr_a0 < 1.0) {
        const auto series = neumann_series(a0, g);
        const double err = series.converged ? relative_difference(series.value, u)
                                            : std::numeric_limits<double>::infinity();
        report.max_neumann_error = std::max(report.max_neumann_error, err);
      }
    }
  }
  return report;
}

MaximumPrincipleReport check_maximum_principle(const Discretization& disc, std::size_t trials,
                                               std::uint64_t seed) {
  return check_maximum_principle(disc.auxiliary(0.0).matrix, trials, seed);
}

void write_trajectory_csv(const Trajectory& trajectory, std::ostream& out) {
  out << "t,norm_l1\n";
  for (std::size_t k = 0; k < trajectory.size(); ++k) {
    out << fmt::format("{:.17g},{:.17g}\n", trajectory.times[k], trajectory.norms_l1[k]);
  }
}

void write_states_csv(const Trajectory& trajectory, const Grid& grid, std::ostream& out) {
  out << "t,x,u\n";
  const auto& x = grid.nodes();
  for (std::size_t k = 0; k < trajectory.size(); ++k) {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      out << fmt::format("{:.17g},{:.17g},{:.17g}\n", trajectory.times[k], x[i],
                         trajectory.states[k][i]);
    }
  }
}

}  // namespace nld
