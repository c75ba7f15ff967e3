#include "nld/operators.hpp"

#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "nld/errors.hpp"

namespace nld {

void check_domain(const Kernel& kernel, const Grid& grid) {
  if (!kernel.domain) return;
  const auto& kd = *kernel.domain;
  const auto& gd = grid.domain();
  bool ok = false;
  if (const auto* kc = std::get_if<Circle>(&kd)) {
    const auto* gc = std::get_if<Circle>(&gd);
    ok = gc != nullptr && std::abs(gc->circumference - kc->circumference) <=
                              1e-12 * kc->circumference;
  } else if (const auto* ki = std::get_if<Interval>(&kd)) {
    const auto* gi = std::get_if<Interval>(&gd);
    ok = gi != nullptr && gi->lo >= ki->lo && gi->hi <= ki->hi;
  } else {
    ok = !std::holds_alternative<Circle>(gd);
  }
  if (!ok) {
    throw Error(ErrorKind::domain_mismatch,
                fmt::format("kernel '{}' is defined on {}, grid covers {}",
                            kernel.description, describe(kd), describe(gd)));
  }
}

void check_lambda(double lambda, double inf_a) {
  if (!(lambda > -inf_a)) {
    throw Error(ErrorKind::lambda_out_of_range,
                fmt::format("lambda = {} must exceed -inf a = {}", lambda, -inf_a));
  }
}

DiscreteOperator assemble_J(const Kernel& kernel, const Grid& grid) {
  check_domain(kernel, grid);
  const auto& x = grid.nodes();
  const auto& w = grid.weights();
  const auto n = x.size();
  Matrix m(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) m(i, j) = kernel(x[i], x[j]) * w[j];
  }
  return {std::move(m), grid, OperatorKind::jump, 0.0};
}

DiscreteOperator assemble_L(const DiscreteOperator& jump, const Vector& a_values) {
  if (a_values.size() != jump.size()) {
    throw Error(ErrorKind::dimension_mismatch, "death rate samples do not match operator");
  }
  DiscreteOperator out{jump.matrix, jump.grid, OperatorKind::generator, 0.0};
  out.matrix.diagonal() -= a_values;
  return out;
}

DiscreteOperator assemble_L(const Kernel& kernel, const DeathRate& a, const Grid& grid) {
  return assemble_L(assemble_J(kernel, grid), grid.sample(a.eval));
}

DiscreteOperator assemble_A(const DiscreteOperator& jump, const Vector& a_values,
                            double inf_a, double lambda) {
  check_lambda(lambda, inf_a);
  if (a_values.size() != jump.size()) {
    throw Error(ErrorKind::dimension_mismatch, "death rate samples do not match operator");
  }
  const Vector scale = (a_values.array() + lambda).inverse().matrix();
  DiscreteOperator out{scale.asDiagonal() * jump.matrix, jump.grid, OperatorKind::auxiliary,
                       lambda};
  return out;
}

DiscreteOperator assemble_A(const Kernel& kernel, const DeathRate& a, const Grid& grid,
                            double lambda) {
  check_lambda(lambda, a.inf_value);
  return assemble_A(assemble_J(kernel, grid), grid.sample(a.eval), a.inf_value, lambda);
}

Vector apply(const DiscreteOperator& op, const Eigen::Ref<const Vector>& u) {
  if (u.size() != op.size()) {
    throw Error(ErrorKind::dimension_mismatch,
                fmt::format("operator has {} rows, vector has {} entries", op.size(),
                            u.size()));
  }
  return op.matrix * u;
}

double l1_operator_norm(const DiscreteOperator& op) {
  const auto& w = op.grid.weights();
  const Vector col = op.matrix.cwiseAbs().transpose() * w;
  return col.cwiseQuotient(w).maxCoeff();
}

double scaling_constant(const Vector& a_values, double lambda, double lambda_prime) {
  return ((a_values.array() + lambda) / (a_values.array() + lambda_prime)).maxCoeff();
}

Discretization discretize(const Kernel& kernel, const DeathRate& a, const Grid& grid) {
  Discretization d;
  d.jump = assemble_J(kernel, grid);
  d.a_values = grid.sample(a.eval);
  d.inf_a = a.inf_value;
  d.j_norm = l1_operator_norm(d.jump);
  return d;
}

void write_matrix_csv(const DiscreteOperator& op, std::ostream& out) {
  for (Eigen::Index i = 0; i < op.matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < op.matrix.cols(); ++j) {
      if (j > 0) out << ',';
      out << fmt::format("{:.17g}", op.matrix(i, j));
    }
    out << '\n';
  }
}

}  // namespace nld
