#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nld/grid.hpp"

namespace nld {

// Kernel structure tags.
struct GeneralKernel {};
/// J(x, y) = profile(x - y).
struct ConvolutionKernel {
  std::function<double(double)> profile;
};
/// J(x, y) = f(x) g(y).
struct RankOneKernel {
  std::function<double(double)> f;
  std::function<double(double)> g;
};
struct ConstantKernel {
  double value = 0.0;
};
using KernelStructure =
    std::variant<GeneralKernel, ConvolutionKernel, RankOneKernel, ConstantKernel>;

/// J >= epsilon for |x - center| < delta and |y - center| < delta.
struct SquareRegion {
  double center = 0.0;
};
/// J(x, y) >= epsilon whenever |x - y| < delta.
struct BandRegion {};
/// integral over x in (lo, hi) of J(x, y) exceeds epsilon for |y - center| < delta.
struct IntegralRegion {
  double lo = 0.0;
  double hi = 0.0;
  double center = 0.0;
};
using LowerBoundRegion = std::variant<SquareRegion, BandRegion, IntegralRegion>;

struct LowerBoundMeta {
  double epsilon = 0.0;
  double delta = 0.0;
  LowerBoundRegion region = SquareRegion{};
};

/// Nonnegative dispersal rate J(x, y) plus the structural facts the
/// existence criteria rely on. All metadata is declared, never inferred.
struct Kernel {
  std::function<double(double, double)> eval;
  KernelStructure structure = GeneralKernel{};
  bool symmetric = false;
  std::optional<LowerBoundMeta> lower_bound;
  /// Domain the kernel is defined on; unset means "any".
  std::optional<DomainSpec> domain;
  std::string description;

  double operator()(double x, double y) const { return eval(x, y); }

  static Kernel general(std::function<double(double, double)> eval, bool symmetric,
                        std::string description = "general");
  static Kernel convolution(std::function<double(double)> profile,
                            std::string description = "convolution");
  static Kernel rank_one(std::function<double(double)> f, std::function<double(double)> g,
                         std::string description = "rank_one");
  static Kernel constant(double value);
  static Kernel zero() { return constant(0.0); }
};

struct AttainedAt {
  double x = 0.0;
};
struct AtInfinity {};
using InfimumLocation = std::variant<AttainedAt, AtInfinity>;

struct Lipschitz {
  double constant = 0.0;
};
struct Hoelder {
  double alpha = 0.5;
  double coefficient = 0.0;
};
using Regularity = std::variant<Lipschitz, Hoelder>;

/// Death rate a(x) with declared bounds 0 < inf_value <= a <= sup_value.
struct DeathRate {
  std::function<double(double)> eval;
  double inf_value = 0.0;
  double sup_value = 0.0;
  InfimumLocation inf_location = AtInfinity{};
  std::optional<Regularity> regularity;
  std::string description;

  double operator()(double x) const { return eval(x); }

  static DeathRate constant(double value);
};

struct Violation {
  std::string what;
  double x = 0.0;
  double y = 0.0;
};

struct ValidationReport {
  std::vector<Violation> violations;
  std::size_t pairs_checked = 0;

  bool valid() const noexcept { return violations.empty(); }
};

struct ValidationOptions {
  std::uint64_t seed = 20240501;
  std::size_t random_pairs = 2000;
  /// Grids larger than this are subsampled with a fixed stride for pair checks.
  std::size_t max_pair_nodes = 512;
  double tolerance = 1e-12;
};

/// Sampling check of every declared hypothesis. Violations are reported as
/// data with a witnessing pair, never thrown.
ValidationReport validate_model(const Kernel& kernel, const DeathRate& a, const Grid& grid,
                                const ValidationOptions& options = {});

enum class Expectation { eigenvalue_exists, no_eigenvalue, unknown };

std::string_view to_string(Expectation e) noexcept;
Expectation parse_expectation(std::string_view name);

struct NamedModel {
  std::string name;
  Kernel kernel;
  DeathRate death_rate;
  DomainSpec domain;
  Expectation expected = Expectation::unknown;
  std::size_t default_nodes = 401;
  QuadratureRule default_rule = QuadratureRule::trapezoid;

  Grid default_grid() const { return build_grid(domain, default_nodes, default_rule); }
};

/// 2 * integral over [-pi, pi] of |theta|^(-alpha).
double hoelder_counterexample_coefficient(double alpha);

NamedModel make_const_circle(double kernel_value = 1.0 / (2.0 * std::numbers::pi),
                             double death_rate = 0.5, std::size_t nodes = 256);
NamedModel make_rank_one_log(std::size_t nodes = 2001,
                             QuadratureRule rule = QuadratureRule::gauss_legendre_composite);
NamedModel make_prop1_gauss(double half_width = 10.0, std::size_t nodes = 801);
NamedModel make_prop2_tophat(double half_width = 40.0, std::size_t nodes = 801);
NamedModel make_counterexample_hoelder(double kernel_value = 1.0, double alpha = 0.5,
                                       double floor_value = 1.0, std::size_t nodes = 1001);

/// Builtin models in a fixed order.
std::vector<NamedModel> builtin_catalog();

std::optional<NamedModel> find_model(std::string_view name);

/// Rebuilds a catalog model on a different truncation half width, scaling the
/// node count to keep the spacing. Returns nullopt for non-catalog names.
std::optional<NamedModel> rescale_truncation(const NamedModel& model, double half_width,
                                             std::size_t nodes);

/// Smallest value of a convolution profile on [-half_width, half_width],
/// sampled at `samples` points.
double derive_convolution_epsilon(const std::function<double(double)>& profile,
                                  double half_width, std::size_t samples = 1001);

}  // namespace nld
