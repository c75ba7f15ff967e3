#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "nld/errors.hpp"
#include "nld/expression.hpp"

using nld::Expression;

TEST(Expression, ArithmeticAndPrecedence) {
  EXPECT_DOUBLE_EQ(Expression::parse("1 + 2 * 3")(0), 7.0);
  EXPECT_DOUBLE_EQ(Expression::parse("(1 + 2) * 3")(0), 9.0);
  EXPECT_DOUBLE_EQ(Expression::parse("8 / 4 / 2")(0), 1.0);
  EXPECT_DOUBLE_EQ(Expression::parse("2 ^ 3 ^ 2")(0), 512.0);
  EXPECT_DOUBLE_EQ(Expression::parse("-2 ^ 2")(0), -4.0);
  EXPECT_DOUBLE_EQ(Expression::parse("2 ^ -1")(0), 0.5);
  EXPECT_DOUBLE_EQ(Expression::parse("1.5e1 - 5")(0), 10.0);
}

TEST(Expression, VariablesAndAliases) {
  const auto e = Expression::parse("x - y");
  EXPECT_TRUE(e.uses_y());
  EXPECT_DOUBLE_EQ(e(3, 1), 2.0);
  EXPECT_DOUBLE_EQ(Expression::parse("theta * 2")(1.5), 3.0);
  EXPECT_DOUBLE_EQ(Expression::parse("θ + 1")(1.0), 2.0);
  EXPECT_FALSE(Expression::parse("abs(x)").uses_y());
}

TEST(Expression, FunctionsAndConstants) {
  EXPECT_NEAR(Expression::parse("exp(1)")(0), std::numbers::e, 1e-15);
  EXPECT_NEAR(Expression::parse("e")(0), std::numbers::e, 1e-15);
  EXPECT_NEAR(Expression::parse("cos(pi)")(0), -1.0, 1e-15);
  EXPECT_NEAR(Expression::parse("sin(pi / 2)")(0), 1.0, 1e-15);
  EXPECT_NEAR(Expression::parse("ln(e ^ 2)")(0), 2.0, 1e-15);
  EXPECT_NEAR(Expression::parse("sqrt(abs(x))")(-4.0), 2.0, 1e-15);
}

TEST(Expression, GaussianProfileMatchesDirectFormula) {
  const auto k = Expression::parse("(2*pi)^(-1/2) * exp(-(x - y)^2 / 2)");
  const double z = 0.7;
  EXPECT_NEAR(k(z, 0.0), std::exp(-z * z / 2) / std::sqrt(2 * std::numbers::pi), 1e-16);
}

TEST(Expression, IndicatorIsOpenInterval) {
  const auto e = Expression::parse("indicator(-0.5, 0.5, x - y)");
  EXPECT_EQ(e(0.2, 0.0), 1.0);
  EXPECT_EQ(e(0.5, 0.0), 0.0);
  EXPECT_EQ(e(-0.6, 0.0), 0.0);
}

TEST(Expression, ParseErrorsCarryOffset) {
  for (const char* bad : {"", "1 +", "foo(x)", "(1", "1 2", "indicator(1, 2)", "z", "abs 1"}) {
    try {
      (void)Expression::parse(bad);
      FAIL() << "accepted '" << bad << "'";
    } catch (const nld::Error& e) {
      EXPECT_EQ(e.kind(), nld::ErrorKind::invalid_argument);
      EXPECT_NE(std::string(e.what()).find("offset"), std::string::npos) << e.what();
    }
  }
}

TEST(Expression, KeepsSource) {
  EXPECT_EQ(Expression::parse("1 + x").source(), "1 + x");
}
