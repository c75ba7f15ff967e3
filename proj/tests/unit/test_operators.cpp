#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "nld/errors.hpp"
#include "nld/operators.hpp"
#include "oracles.hpp"

using namespace nld;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

Grid circle4() { return build_grid(Circle{}, 4, QuadratureRule::trapezoid); }
Grid unit3() { return build_grid(Interval{0, 1}, 3, QuadratureRule::trapezoid); }

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error";
  return ErrorKind::config_error;
}

}  // namespace

TEST(Operators, ConstantKernelRowSums) {
  const auto op = assemble_J(Kernel::constant(1.0 / two_pi), circle4());
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) EXPECT_NEAR(op.matrix(i, j), 0.25, 1e-15);
    EXPECT_NEAR(op.matrix.row(i).sum(), 1.0, 1e-15);
  }
  EXPECT_EQ(op.kind, OperatorKind::jump);
}

TEST(Operators, RankOneColumnsAreWeights) {
  auto one = [](double) { return 1.0; };
  const auto op = assemble_J(Kernel::rank_one(one, one), unit3());
  for (int i = 0; i < 3; ++i) {
    EXPECT_DOUBLE_EQ(op.matrix(i, 0), 0.25);
    EXPECT_DOUBLE_EQ(op.matrix(i, 1), 0.5);
    EXPECT_DOUBLE_EQ(op.matrix(i, 2), 0.25);
  }
}

TEST(Operators, GaussianSymmetricAfterUnscaling) {
  const auto m = make_prop1_gauss();
  const auto grid = m.default_grid();
  const auto op = assemble_J(m.kernel, grid);
  EXPECT_GE(op.matrix.minCoeff(), 0.0);
  const Matrix unscaled = op.matrix * grid.weights().cwiseInverse().asDiagonal();
  EXPECT_LE((unscaled - unscaled.transpose()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Operators, DomainMismatch) {
  auto k = Kernel::constant(1.0);
  k.domain = Circle{};
  EXPECT_EQ(kind_of([&] { assemble_J(k, unit3()); }), ErrorKind::domain_mismatch);
  EXPECT_EQ(kind_of([&] { check_domain(make_rank_one_log().kernel, circle4()); }),
            ErrorKind::domain_mismatch);
}

TEST(Operators, GeneratorExamples) {
  const auto cc = make_const_circle();
  const auto grid = build_grid(Circle{}, 16, QuadratureRule::trapezoid);
  const auto L = assemble_L(cc.kernel, cc.death_rate, grid);
  EXPECT_EQ(L.kind, OperatorKind::generator);
  const Vector Lu = apply(L, Vector::Ones(16));
  EXPECT_LE((Lu.array() - 0.5).abs().maxCoeff(), 1e-14);

  const auto zero = assemble_L(Kernel::zero(), DeathRate::constant(1.0), unit3());
  EXPECT_LE((zero.matrix + Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 0.0);

  const auto rl = make_rank_one_log();
  const auto L3 = assemble_L(rl.kernel, rl.death_rate, unit3());
  const double w[3] = {0.25, 0.5, 0.25};
  const double x[3] = {0.0, 0.5, 1.0};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      EXPECT_DOUBLE_EQ(L3.matrix(i, j), w[j] - (i == j ? 2.0 + x[i] : 0.0));
}

TEST(Operators, AuxiliaryExamples) {
  const auto cc = make_const_circle();
  const auto grid = build_grid(Circle{}, 32, QuadratureRule::trapezoid);
  const auto A = assemble_A(cc.kernel, cc.death_rate, grid, 0.5);
  EXPECT_EQ(A.kind, OperatorKind::auxiliary);
  EXPECT_EQ(A.lambda, 0.5);
  for (int i = 0; i < 32; ++i) EXPECT_NEAR(A.matrix.row(i).sum(), 1.0, 1e-14);
  EXPECT_EQ(kind_of([&] { assemble_A(cc.kernel, cc.death_rate, grid, -0.5); }),
            ErrorKind::lambda_out_of_range);
  EXPECT_EQ(kind_of([&] { assemble_A(cc.kernel, cc.death_rate, grid, -0.7); }),
            ErrorKind::lambda_out_of_range);

  const auto rl = make_rank_one_log();
  const auto g = build_grid(Interval{0, 1}, 11, QuadratureRule::trapezoid);
  const auto A0 = assemble_A(rl.kernel, rl.death_rate, g, 0.0);
  for (int i = 0; i < 11; ++i)
    for (int j = 0; j < 11; ++j)
      EXPECT_NEAR(A0.matrix(i, j), g.weights()[j] / (2.0 + g.nodes()[i]), 1e-16);
  Eigen::JacobiSVD<Matrix> svd(A0.matrix);
  EXPECT_LT(svd.singularValues()[1], 1e-14 * svd.singularValues()[0]);
}

TEST(Operators, ApplyExamples) {
  const auto grid = circle4();
  const Vector u = oracle::random_vector(4, 3);
  EXPECT_EQ(apply(assemble_J(Kernel::zero(), grid), u).cwiseAbs().maxCoeff(), 0.0);
  const auto J = assemble_J(make_const_circle().kernel, grid);
  EXPECT_LE((apply(J, Vector::Ones(4)).array() - 1.0).abs().maxCoeff(), 1e-15);
  EXPECT_EQ(kind_of([&] { apply(J, Vector::Ones(3)); }), ErrorKind::dimension_mismatch);
}

TEST(Operators, L1NormExamples) {
  EXPECT_NEAR(l1_operator_norm(assemble_J(make_const_circle().kernel, circle4())), 1.0, 1e-15);
  EXPECT_EQ(l1_operator_norm(assemble_J(Kernel::zero(), circle4())), 0.0);
  auto one = [](double) { return 1.0; };
  EXPECT_NEAR(l1_operator_norm(assemble_J(Kernel::rank_one(one, one), unit3())), 1.0, 1e-15);
}

TEST(Operators, L1NormMatchesWeightedColumnSums) {
  const auto m = make_prop1_gauss(10.0, 201);
  const auto grid = m.default_grid();
  const auto J = assemble_J(m.kernel, grid);
  // Brute force: sup over unit-mass point masses of |J delta_j|_1.
  double best = 0.0;
  for (Eigen::Index j = 0; j < J.size(); ++j) {
    Vector e = Vector::Zero(J.size());
    e[j] = 1.0 / grid.weights()[j];
    best = std::max(best, grid.l1_norm(J.matrix * e));
  }
  EXPECT_NEAR(l1_operator_norm(J), best, 1e-12 * best);
}

TEST(Operators, AuxiliaryFamilyIsMonotone) {
  const auto m = make_prop1_gauss(5.0, 101);
  const auto disc = discretize(m.kernel, m.death_rate, m.default_grid());
  for (double mu : {-0.9, -0.5, 0.0, 2.0}) {
    for (double lambda : {mu + 0.01, mu + 0.5, mu + 3.0}) {
      const Matrix diff = disc.auxiliary(lambda).matrix - disc.auxiliary(mu).matrix;
      EXPECT_LE(diff.maxCoeff(), 0.0);
    }
  }
}

TEST(Operators, ScalingIdentity) {
  const auto m = make_prop1_gauss(5.0, 101);
  const auto disc = discretize(m.kernel, m.death_rate, m.default_grid());
  for (double lambda : {-0.8, 0.0, 1.5}) {
    for (double lp : {-0.95, -0.3, 4.0}) {
      const double c = scaling_constant(disc.a_values, lambda, lp);
      const Matrix gap = c * disc.auxiliary(lambda).matrix - disc.auxiliary(lp).matrix;
      EXPECT_GE(gap.minCoeff(), -1e-15);
    }
  }
}

TEST(Operators, EigenvalueCorrespondence) {
  // For const_circle the constant vector is a fixed point of A(0.5) and an
  // eigenvector of L with eigenvalue 0.5.
  const auto cc = make_const_circle();
  const auto disc = discretize(cc.kernel, cc.death_rate, build_grid(Circle{}, 40, QuadratureRule::trapezoid));
  const Vector u = Vector::Ones(40);
  EXPECT_LE((apply(disc.auxiliary(0.5), u) - u).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LE((apply(disc.generator(), u) - 0.5 * u).cwiseAbs().maxCoeff(), 1e-14);
  // And a generic eigenpair of L above -inf a is a fixed point of A.
  const auto m = make_prop1_gauss(4.0, 81);
  const auto d2 = discretize(m.kernel, m.death_rate, m.default_grid());
  Eigen::EigenSolver<Matrix> es(d2.generator().matrix);
  Eigen::Index top = 0;
  es.eigenvalues().real().maxCoeff(&top);
  const double lambda = es.eigenvalues()[top].real();
  ASSERT_GT(lambda, -d2.inf_a);
  const Vector v = es.eigenvectors().col(top).real();
  EXPECT_LE((apply(d2.auxiliary(lambda), v) - v).cwiseAbs().maxCoeff(), 1e-10 * v.cwiseAbs().maxCoeff());
}

TEST(Operators, MatrixDump) {
  const auto op = assemble_J(Kernel::constant(2.0), unit3());
  std::ostringstream out;
  write_matrix_csv(op, out);
  EXPECT_EQ(out.str(), "0.5,1,0.5\n0.5,1,0.5\n0.5,1,0.5\n");
}

TEST(Operators, DiscretizationCarriesNorm) {
  const auto cc = make_const_circle();
  const auto disc = discretize(cc.kernel, cc.death_rate, circle4());
  EXPECT_NEAR(disc.j_norm, 1.0, 1e-15);
  EXPECT_EQ(disc.inf_a, 0.5);
  EXPECT_EQ(disc.grid().size(), 4u);
}
