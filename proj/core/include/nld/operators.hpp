#pragma once

#include <iosfwd>

#include "nld/grid.hpp"
#include "nld/model.hpp"

namespace nld {

enum class OperatorKind {
  jump,        ///< J u = integral of J(x, y) u(y) dy
  generator,   ///< L u = J u - a u
  auxiliary,   ///< A_lambda u = J u / (lambda + a)
};

/// Dense Nystrom matrix acting on point values. Quadrature weights are folded
/// into the columns: M(i, j) = J(x_i, x_j) w_j.
struct DiscreteOperator {
  Matrix matrix;
  Grid grid;
  OperatorKind kind = OperatorKind::jump;
  double lambda = 0.0;  ///< only meaningful for OperatorKind::auxiliary

  Eigen::Index size() const noexcept { return matrix.rows(); }
};

/// Throws DomainMismatch when the kernel declares a domain incompatible with
/// the grid.
void check_domain(const Kernel& kernel, const Grid& grid);

DiscreteOperator assemble_J(const Kernel& kernel, const Grid& grid);
DiscreteOperator assemble_L(const Kernel& kernel, const DeathRate& a, const Grid& grid);
DiscreteOperator assemble_A(const Kernel& kernel, const DeathRate& a, const Grid& grid,
                            double lambda);

/// Builds A_lambda from an already assembled J, sampling a on J's grid.
/// `inf_a` is the declared infimum used for the range check.
DiscreteOperator assemble_A(const DiscreteOperator& jump, const Vector& a_values,
                            double inf_a, double lambda);

/// L = J - diag(a_values) from an assembled J.
DiscreteOperator assemble_L(const DiscreteOperator& jump, const Vector& a_values);

/// Throws LambdaOutOfRange unless lambda > -inf_a.
void check_lambda(double lambda, double inf_a);

Vector apply(const DiscreteOperator& op, const Eigen::Ref<const Vector>& u);

/// Discrete L1 -> L1 norm with respect to the grid weights:
/// max_j sum_i |M(i, j)| w_i / w_j.
double l1_operator_norm(const DiscreteOperator& op);

/// Max over nodes of (lambda + a) / (lambda_prime + a); A(lambda_prime) is
/// dominated entrywise by this constant times A(lambda).
double scaling_constant(const Vector& a_values, double lambda, double lambda_prime);

/// J assembled once together with the death rate sampled on the same grid;
/// every lambda-dependent quantity is derived from it without reassembly.
struct Discretization {
  DiscreteOperator jump;
  Vector a_values;
  double inf_a = 0.0;   ///< declared infimum of a
  double j_norm = 0.0;  ///< l1_operator_norm(jump)

  const Grid& grid() const noexcept { return jump.grid; }
  DiscreteOperator auxiliary(double lambda) const {
    return assemble_A(jump, a_values, inf_a, lambda);
  }
  DiscreteOperator generator() const { return assemble_L(jump, a_values); }
};

Discretization discretize(const Kernel& kernel, const DeathRate& a, const Grid& grid);

/// Row-major CSV dump of the matrix entries, one row per line.
void write_matrix_csv(const DiscreteOperator& op, std::ostream& out);

}  // namespace nld
