#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "nld/errors.hpp"
#include "nld/model.hpp"
#include "oracles.hpp"

using namespace nld;

namespace {

bool mentions(const ValidationReport& r, const std::string& needle) {
  for (const auto& v : r.violations)
    if (v.what.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST(Model, ConstantKernelOnCircleIsValid) {
  const auto grid = build_grid(Circle{}, 64, QuadratureRule::trapezoid);
  const auto r = validate_model(Kernel::constant(1.0), DeathRate::constant(0.5), grid);
  EXPECT_TRUE(r.valid());
  EXPECT_GT(r.pairs_checked, 0u);
}

TEST(Model, NegativityReportedWithWitness) {
  const auto grid = build_grid(Interval{-1, 1}, 5, QuadratureRule::trapezoid);
  const auto k = Kernel::general([](double x, double y) { return (x == 0 && y == 0) ? -1.0 : 1.0; },
                                 true);
  const auto r = validate_model(k, DeathRate::constant(1.0), grid);
  ASSERT_FALSE(r.valid());
  EXPECT_EQ(r.violations.front().what, "negativity at (0, 0)");
  EXPECT_EQ(r.violations.front().x, 0.0);
  EXPECT_EQ(r.violations.front().y, 0.0);
}

TEST(Model, GaussianWithLipschitzRateIsValid) {
  const auto grid = build_grid(TruncatedLine{10}, 201, QuadratureRule::trapezoid);
  auto k = Kernel::convolution(
      [](double z) { return std::exp(-z * z / 2) / std::sqrt(2 * std::numbers::pi); });
  k.symmetric = true;
  DeathRate a;
  a.eval = [](double x) { return 1.0 + std::abs(x); };
  a.inf_value = 1.0;
  a.sup_value = 11.0;
  a.inf_location = AttainedAt{0.0};
  a.regularity = Lipschitz{1.0};
  EXPECT_TRUE(validate_model(k, a, grid).valid());
}

TEST(Model, DetectsFalseDeclarations) {
  const auto grid = build_grid(Interval{0, 1}, 33, QuadratureRule::trapezoid);
  auto asym = Kernel::general([](double x, double y) { return 1.0 + x - 0.5 * y; }, true);
  EXPECT_TRUE(mentions(validate_model(asym, DeathRate::constant(1.0), grid), "symmetr"));

  auto k = Kernel::constant(0.1);
  k.lower_bound = LowerBoundMeta{0.5, 0.2, SquareRegion{0.5}};
  EXPECT_FALSE(validate_model(k, DeathRate::constant(1.0), grid).valid());

  DeathRate steep;
  steep.eval = [](double x) { return 1.0 + 5.0 * x; };
  steep.inf_value = 1.0;
  steep.sup_value = 6.0;
  steep.inf_location = AttainedAt{0.0};
  steep.regularity = Lipschitz{1.0};
  EXPECT_FALSE(validate_model(Kernel::constant(1.0), steep, grid).valid());

  DeathRate wrong_min = steep;
  wrong_min.regularity = Lipschitz{5.0};
  wrong_min.inf_location = AttainedAt{0.5};
  EXPECT_FALSE(validate_model(Kernel::constant(1.0), wrong_min, grid).valid());

  DeathRate out_of_bounds = DeathRate::constant(1.0);
  out_of_bounds.sup_value = 0.9;
  EXPECT_FALSE(validate_model(Kernel::constant(1.0), out_of_bounds, grid).valid());

  EXPECT_FALSE(validate_model(Kernel::constant(1.0), DeathRate::constant(0.0), grid).valid());
}

TEST(Model, HoelderDeclarationIsChecked) {
  const auto grid = build_grid(Circle{}, 101, QuadratureRule::trapezoid);
  const auto m = make_counterexample_hoelder();
  EXPECT_TRUE(validate_model(m.kernel, m.death_rate, grid).valid());
  auto lipschitz_claim = m.death_rate;
  lipschitz_claim.regularity = Lipschitz{1.0};
  EXPECT_FALSE(validate_model(m.kernel, lipschitz_claim, grid).valid());
}

TEST(Model, CatalogEntriesValidOnDefaultGrids) {
  const auto catalog = builtin_catalog();
  ASSERT_GE(catalog.size(), 5u);
  for (const auto& m : catalog) {
    const auto r = validate_model(m.kernel, m.death_rate, m.default_grid());
    EXPECT_TRUE(r.valid()) << m.name << ": " << (r.valid() ? "" : r.violations.front().what);
  }
}

TEST(Model, CatalogNamesAndExpectations) {
  for (const char* name : {"const_circle", "rank_one_log", "prop1_gauss", "prop2_tophat"}) {
    const auto m = find_model(name);
    ASSERT_TRUE(m) << name;
    EXPECT_EQ(m->expected, Expectation::eigenvalue_exists);
  }
  for (const char* name : {"counterexample_hoelder", "counterexample_hoelder_2pi"}) {
    const auto m = find_model(name);
    ASSERT_TRUE(m) << name;
    EXPECT_EQ(m->expected, Expectation::no_eigenvalue);
  }
  EXPECT_FALSE(find_model("nope"));
}

TEST(Model, HoelderCoefficientMatchesAnalyticAndQuadrature) {
  const double c = hoelder_counterexample_coefficient(0.5);
  EXPECT_NEAR(c, oracle::hoelder_coefficient_half(), 1e-12);
  EXPECT_NEAR(c, 14.1796, 1e-4);
  // Graded midpoint sum of |theta|^(-1/2) over [0, pi], doubled twice.
  const int n = 200000;
  double s = 0.0;
  for (int k = 0; k < n; ++k) {
    const double t0 = std::numbers::pi * std::pow(double(k) / n, 2);
    const double t1 = std::numbers::pi * std::pow(double(k + 1) / n, 2);
    s += (t1 - t0) / std::sqrt(0.5 * (t0 + t1));
  }
  EXPECT_NEAR(4.0 * s, c, 1e-4);
  const auto m = make_counterexample_hoelder();
  EXPECT_NEAR(m.death_rate(0.0), 1.0, 1e-15);
  EXPECT_NEAR(m.death_rate(1.0), c + 1.0, 1e-12);
}

TEST(Model, ConstCircleParameters) {
  const auto m = make_const_circle();
  EXPECT_NEAR(m.kernel(0.3, -2.0), 1.0 / (2 * std::numbers::pi), 1e-16);
  EXPECT_EQ(m.death_rate(1.0), 0.5);
}

TEST(Model, ExpectationNames) {
  for (auto e : {Expectation::eigenvalue_exists, Expectation::no_eigenvalue, Expectation::unknown}) {
    EXPECT_EQ(parse_expectation(to_string(e)), e);
  }
  EXPECT_THROW(parse_expectation("maybe"), Error);
}

TEST(Model, RescaleTruncation) {
  const auto base = make_prop2_tophat();
  const auto wide = rescale_truncation(base, 80.0, 1601);
  ASSERT_TRUE(wide);
  EXPECT_EQ(std::get<TruncatedLine>(wide->domain).half_width, 80.0);
  EXPECT_EQ(wide->default_nodes, 1601u);
  EXPECT_EQ(wide->name, "prop2_tophat");
  EXPECT_FALSE(rescale_truncation(make_const_circle(), 2.0, 10));
}

TEST(Model, DerivedConvolutionEpsilon) {
  auto gauss = [](double z) { return std::exp(-z * z / 2) / std::sqrt(2 * std::numbers::pi); };
  EXPECT_NEAR(derive_convolution_epsilon(gauss, 0.25), gauss(0.25), 1e-15);
  EXPECT_THROW(derive_convolution_epsilon(gauss, 0.0), Error);
}

TEST(Model, TophatJumpTakesMidpointValue) {
  const auto m = make_prop2_tophat();
  EXPECT_EQ(m.kernel(0.0, 0.3), 1.0);
  EXPECT_EQ(m.kernel(0.0, 0.5), 0.5);
  EXPECT_EQ(m.kernel(0.0, 0.7), 0.0);
}
