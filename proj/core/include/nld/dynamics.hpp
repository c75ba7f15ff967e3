#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nld/operators.hpp"

namespace nld {

struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<double> norms_l1;  ///< weighted L1 norm of each state

  std::size_t size() const noexcept { return times.size(); }
  /// Smallest entry over every recorded state.
  double min_entry() const;
};

struct IntegrateOptions {
  std::size_t stride = 10;
  /// dt * |L|_inf must not exceed this.
  double stability_guard = 0.5;
};

/// max_i sum_j |L(i, j)|, the step-size guard's norm estimate.
double row_sum_norm(const DiscreteOperator& op);

/// Classical fourth-order Runge-Kutta for du/dt = L u. The step is shrunk so
/// that a whole number of steps lands on t_end. Throws UnstableStepError when
/// dt * row_sum_norm(L) exceeds the guard.
Trajectory integrate(const DiscreteOperator& generator, const Eigen::Ref<const Vector>& u0,
                     double t_end, double dt, const IntegrateOptions& options = {});

struct RateEstimate {
  double rate = 0.0;
  double t_start = 0.0;
  double t_end = 0.0;
  double fit_residual = 0.0;  ///< RMS misfit of log-norm about the fitted line
};

/// Least-squares slope of log |u(t)|_1 over the final tail_fraction of samples.
RateEstimate estimate_rate(const Trajectory& trajectory, double tail_fraction = 0.5);

struct NeumannSum {
  Vector value;
  std::size_t terms = 0;
  bool converged = false;
};

/// sum_j A^j rhs, stopped when the newest term is below term_tol relative to
/// the partial sum.
NeumannSum neumann_series(const Matrix& a, const Eigen::Ref<const Vector>& rhs,
                          double term_tol = 1e-14, std::size_t max_terms = 200000);

struct ResolventReport {
  double mu = 0.0;
  bool is_positive = false;
  double min_inverse_entry = 0.0;
  double spr_auxiliary = 0.0;  ///< spr(A_mu), NaN when mu <= -inf a
  bool neumann_applicable = false;
  bool neumann_consistent = false;
  double max_neumann_error = 0.0;
  std::vector<std::string> witnesses;
};

/// Entrywise sign test of (mu I - L)^{-1}, and, when spr(A_mu) < 1, agreement
/// of the Neumann series in A_mu with the direct solve on seeded nonnegative
/// right-hand sides. Throws SingularResolvent for a numerically singular system.
ResolventReport check_resolvent_positive(const Discretization& disc, double mu,
                                         std::size_t trials, std::uint64_t seed);

/// mu - 1 / spr((mu I - L)^{-1}). Throws InvalidArgument when the resolvent
/// is not positive (mu below the principal eigenvalue) and ResolventDegenerate
/// when its spectral radius vanishes.
double lambda0_from_resolvent(const Discretization& disc, double mu);

struct MaximumPrincipleReport {
  double spr_a0 = 0.0;
  bool inverse_positive = false;
  double min_inverse_entry = 0.0;
  bool equivalence_holds = false;
  bool solutions_nonnegative = true;
  double max_neumann_error = 0.0;
};

/// Compares positivity of (I - A0)^{-1} with spr(A0) < 1. When the inverse is
/// positive, also solves against `trials` seeded nonnegative right-hand sides
/// and checks them against the Neumann series. Throws SingularSystem when
/// spr(A0) is within 1e-12 of one.
MaximumPrincipleReport check_maximum_principle(const Matrix& a0, std::size_t trials,
                                               std::uint64_t seed);
MaximumPrincipleReport check_maximum_principle(const Discretization& disc, std::size_t trials,
                                               std::uint64_t seed);

/// CSV "t,norm_l1".
void write_trajectory_csv(const Trajectory& trajectory, std::ostream& out);
/// CSV "t,x,u", one row per recorded time and node.
void write_states_csv(const Trajectory& trajectory, const Grid& grid, std::ostream& out);

}  // namespace nld
