#pragma once

#include <cstddef>
#include <numbers>
#include <string>
#include <string_view>
#include <variant>

#include <Eigen/Core>

namespace nld {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  bool operator==(const Interval&) const = default;
};

/// Periodic domain parameterised by angle in [-circumference/2, circumference/2).
struct Circle {
  double circumference = 2.0 * std::numbers::pi;
  bool operator==(const Circle&) const = default;
};

/// The real line, truncated to [-half_width, half_width] for computation.
struct TruncatedLine {
  double half_width = 10.0;
  bool operator==(const TruncatedLine&) const = default;
};

using DomainSpec = std::variant<Interval, Circle, TruncatedLine>;

/// Throws InvalidDomain when the parameters are not strictly admissible.
void validate_domain(const DomainSpec& domain);

/// Lebesgue measure of the (truncated) domain.
double measure(const DomainSpec& domain);

bool is_periodic(const DomainSpec& domain) noexcept;

/// Distance between two points of the domain; periodic on the circle.
double distance(const DomainSpec& domain, double x, double y);

std::string describe(const DomainSpec& domain);

enum class QuadratureRule { trapezoid, midpoint, gauss_legendre_composite };

std::string_view to_string(QuadratureRule rule) noexcept;
QuadratureRule parse_quadrature_rule(std::string_view name);

/// Quadrature nodes and positive weights over a domain. Immutable once built.
class Grid {
 public:
  Grid() = default;

  const Vector& nodes() const noexcept { return nodes_; }
  const Vector& weights() const noexcept { return weights_; }
  const DomainSpec& domain() const noexcept { return domain_; }
  QuadratureRule rule() const noexcept { return rule_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(nodes_.size()); }

  /// Quadrature of a grid function, sum_i w_i f_i.
  double integrate(const Eigen::Ref<const Vector>& values) const;

  /// Weighted L1 norm, sum_i w_i |f_i|.
  double l1_norm(const Eigen::Ref<const Vector>& values) const;

  /// Evaluates a callable at every node.
  template <typename F>
  Vector sample(F&& f) const {
    Vector out(nodes_.size());
    for (Eigen::Index i = 0; i < nodes_.size(); ++i) out[i] = f(nodes_[i]);
    return out;
  }

 private:
  friend Grid build_grid(const DomainSpec&, std::size_t, QuadratureRule);

  Grid(Vector nodes, Vector weights, DomainSpec domain, QuadratureRule rule)
      : nodes_(std::move(nodes)),
        weights_(std::move(weights)),
        domain_(domain),
        rule_(rule) {}

  Vector nodes_;
  Vector weights_;
  DomainSpec domain_ = Interval{};
  QuadratureRule rule_ = QuadratureRule::trapezoid;
};

/// Builds a grid with `n` nodes. On the circle the rule is ignored and the
/// nodes are equispaced with equal weights. The composite Gauss-Legendre rule
/// uses panels of p points, p the largest divisor of n in [2, 8]; n without
/// such a divisor is rejected.
Grid build_grid(const DomainSpec& domain, std::size_t n, QuadratureRule rule);

/// Same domain and rule with factor times as many nodes.
Grid refine(const Grid& grid, int factor);

}  // namespace nld
