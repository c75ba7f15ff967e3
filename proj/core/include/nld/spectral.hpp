#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "nld/operators.hpp"

namespace nld {

struct PowerOptions {
  double tol = 1e-10;
  std::size_t max_iter = 50000;
  /// Additive shift; defaults to 1e-3 times the infinity norm of the matrix.
  std::optional<double> shift;
  /// Strictly positive start vector; empty selects the constant vector.
  Vector start;
};

struct SpectralResult {
  double radius = 0.0;
  Vector perron_vector;  ///< nonnegative, unit (weighted) L1 norm
  std::size_t iterations = 0;
  double residual = 0.0;  ///< |M v - radius v|_1 / |v|_1
  bool converged = false;
};

/// Perron root of an entrywise nonnegative matrix by shifted power iteration
/// from the constant vector (or options.start). Converged means the relative change of the
/// ratio estimate is below tol and the residual is below tol * max(1, radius).
/// Throws NotNonnegative on any negative entry.
SpectralResult spectral_radius(const Matrix& m, const PowerOptions& options = {});

/// Start vector for a nearby problem: the previous Perron vector floored at
/// 1e-3 of its maximum. Empty if the vector is empty or zero.
Vector warm_start(const Vector& perron_vector);

/// As above, with norms weighted by the operator's quadrature weights.
SpectralResult spectral_radius(const DiscreteOperator& op, const PowerOptions& options = {});

struct CurveSample {
  double lambda = 0.0;
  double radius = 0.0;
  bool converged = false;
  double residual = 0.0;
  double upper_bound = 0.0;
};

struct SprCurve {
  std::vector<CurveSample> samples;
  double inf_a = 0.0;

  double supremum() const;
};

/// spr(A_lambda) at each lambda; lambdas must be strictly increasing and all
/// exceed -inf a (LambdaOutOfRange names the offending sample otherwise).
SprCurve spr_curve(const Discretization& disc, std::span<const double> lambdas,
                   const PowerOptions& options = {});
SprCurve spr_curve(const Kernel& kernel, const DeathRate& a, const Grid& grid,
                   std::span<const double> lambdas, const PowerOptions& options = {});

struct MonotoneCheck {
  bool ok = true;
  std::optional<std::size_t> violation;  ///< index k with r[k+1] > r[k] + tol
};

MonotoneCheck check_monotone(const SprCurve& curve, double tol);

/// j_norm / (lambda + inf_a), the operator-norm bound on spr(A_lambda).
double upper_bound(double lambda, double j_norm, double inf_a);

struct LeftLimitOptions {
  std::vector<double> offsets;  ///< empty selects 10^-k, k = 1..8
  double floor = 1e-8;
  double cap = 1e6;
  PowerOptions power;
};

std::vector<double> default_left_offsets();

struct LeftLimit {
  double last = 0.0;
  /// The curve is nonincreasing, so this is a lower estimate of the limit.
  double supremum = 0.0;
  bool diverged = false;
  std::vector<CurveSample> samples;
};

/// Samples spr(A_lambda) at lambda = -inf a + offset for decreasing offsets.
LeftLimit left_endpoint_limit(const Discretization& disc,
                              const LeftLimitOptions& options = {});
LeftLimit left_endpoint_limit(const Kernel& kernel, const DeathRate& a, const Grid& grid,
                              const LeftLimitOptions& options = {});

/// CSV with header "lambda,spr,converged,residual,upper_bound".
void write_curve_csv(const SprCurve& curve, std::ostream& out);

}  // namespace nld
