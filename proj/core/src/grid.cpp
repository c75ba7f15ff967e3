#include "nld/grid.hpp"

#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "nld/errors.hpp"

namespace nld {
namespace {

struct Bounds {
  double lo;
  double hi;
};

Bounds bounds_of(const DomainSpec& domain) {
  return std::visit(
      [](const auto& d) -> Bounds {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Interval>) {
          return {d.lo, d.hi};
        } else if constexpr (std::is_same_v<T, Circle>) {
          return {-0.5 * d.circumference, 0.5 * d.circumference};
        } else {
          return {-d.half_width, d.half_width};
        }
      },
      domain);
}

// Nodes and weights of the p-point Gauss-Legendre rule on [-1, 1].
void gauss_legendre(int p, std::vector<double>& x, std::vector<double>& w) {
  x.assign(p, 0.0);
  w.assign(p, 0.0);
  for (int i = 0; i < p; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (p + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = z;
      for (int k = 2; k <= p; ++k) {
        const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = p * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[p - 1 - i] = z;
    w[p - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

int panel_order(std::size_t n) {
  for (int p = 8; p >= 2; --p) {
    if (n % static_cast<std::size_t>(p) == 0) return p;
  }
  return 0;
}

}  // namespace

void validate_domain(const DomainSpec& domain) {
  std::visit(
      [](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Interval>) {
          if (!(std::isfinite(d.lo) && std::isfinite(d.hi) && d.lo < d.hi)) {
            throw Error(ErrorKind::invalid_domain,
                        fmt::format("interval needs lo < hi, got [{}, {}]", d.lo, d.hi));
          }
        } else if constexpr (std::is_same_v<T, Circle>) {
          if (!(std::isfinite(d.circumference) && d.circumference > 0.0)) {
            throw Error(ErrorKind::invalid_domain,
                        fmt::format("circle circumference must be positive, got {}",
                                    d.circumference));
          }
        } else {
          if (!(std::isfinite(d.half_width) && d.half_width > 0.0)) {
            throw Error(ErrorKind::invalid_domain,
                        fmt::format("truncation half width must be positive, got {}",
                                    d.half_width));
          }
        }
      },
      domain);
}

double measure(const DomainSpec& domain) {
  const auto b = bounds_of(domain);
  return b.hi - b.lo;
}

bool is_periodic(const DomainSpec& domain) noexcept {
  return std::holds_alternative<Circle>(domain);
}

double distance(const DomainSpec& domain, double x, double y) {
  const double d = std::abs(x - y);
  if (const auto* c = std::get_if<Circle>(&domain)) {
    const double r = std::fmod(d, c->circumference);
    return std::min(r, c->circumference - r);
  }
  return d;
}

std::string describe(const DomainSpec& domain) {
  return std::visit(
      [](const auto& d) -> std::string {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Interval>) {
          return fmt::format("interval({}, {})", d.lo, d.hi);
        } else if constexpr (std::is_same_v<T, Circle>) {
          return fmt::format("circle({})", d.circumference);
        } else {
          return fmt::format("truncated_line({})", d.half_width);
        }
      },
      domain);
}

std::string_view to_string(QuadratureRule rule) noexcept {
  switch (rule) {
    case QuadratureRule::trapezoid: return "trapezoid";
    case QuadratureRule::midpoint: return "midpoint";
    case QuadratureRule::gauss_legendre_composite: return "gauss_legendre_composite";
  }
  return "unknown";
}

QuadratureRule parse_quadrature_rule(std::string_view name) {
  if (name == "trapezoid") return QuadratureRule::trapezoid;
  if (name == "midpoint") return QuadratureRule::midpoint;
  if (name == "gauss_legendre_composite" || name == "gauss_legendre") {
    return QuadratureRule::gauss_legendre_composite;
  }
  throw Error(ErrorKind::invalid_argument,
              fmt::format("unknown quadrature rule '{}'", name));
}

double Grid::integrate(const Eigen::Ref<const Vector>& values) const {
  if (values.size() != nodes_.size()) {
    throw Error(ErrorKind::dimension_mismatch,
                fmt::format("grid has {} nodes, function has {}", nodes_.size(),
                            values.size()));
  }
  return weights_.dot(values);
}

double Grid::l1_norm(const Eigen::Ref<const Vector>& values) const {
  if (values.size() != nodes_.size()) {
    throw Error(ErrorKind::dimension_mismatch,
                fmt::format("grid has {} nodes, function has {}", nodes_.size(),
                            values.size()));
  }
  return weights_.dot(values.cwiseAbs());
}

Grid build_grid(const DomainSpec& domain, std::size_t n, QuadratureRule rule) {
  validate_domain(domain);
  if (n < 2) {
    throw Error(ErrorKind::invalid_domain,
                fmt::format("a grid needs at least 2 nodes, got {}", n));
  }
  const auto [lo, hi] = bounds_of(domain);
  const auto size = static_cast<Eigen::Index>(n);
  Vector nodes(size);
  Vector weights(size);

  if (is_periodic(domain)) {
    const double h = (hi - lo) / static_cast<double>(n);
    for (Eigen::Index i = 0; i < size; ++i) nodes[i] = lo + static_cast<double>(i) * h;
    weights.setConstant(h);
    return Grid(std::move(nodes), std::move(weights), domain, rule);
  }

  switch (rule) {
    case QuadratureRule::trapezoid: {
      const double h = (hi - lo) / static_cast<double>(n - 1);
      for (Eigen::Index i = 0; i < size; ++i) nodes[i] = lo + static_cast<double>(i) * h;
      nodes[size - 1] = hi;
      weights.setConstant(h);
      weights[0] = weights[size - 1] = 0.5 * h;
      break;
    }
    case QuadratureRule::midpoint: {
      const double h = (hi - lo) / static_cast<double>(n);
      for (Eigen::Index i = 0; i < size; ++i) {
        nodes[i] = lo + (static_cast<double>(i) + 0.5) * h;
      }
      weights.setConstant(h);
      break;
    }
    case QuadratureRule::gauss_legendre_composite: {
      const int p = panel_order(n);
      if (p == 0) {
        throw Error(ErrorKind::invalid_argument,
                    fmt::format("composite Gauss-Legendre needs a node count with a "
                                "divisor in [2, 8], got {}",
                                n));
      }
      std::vector<double> gx;
      std::vector<double> gw;
      gauss_legendre(p, gx, gw);
      const std::size_t panels = n / static_cast<std::size_t>(p);
      const double h = (hi - lo) / static_cast<double>(panels);
      Eigen::Index k = 0;
      for (std::size_t panel = 0; panel < panels; ++panel) {
        const double mid = lo + (static_cast<double>(panel) + 0.5) * h;
        for (int j = 0; j < p; ++j, ++k) {
          nodes[k] = mid + 0.5 * h * gx[j];
          weights[k] = 0.5 * h * gw[j];
        }
      }
      break;
    }
  }
  return Grid(std::move(nodes), std::move(weights), domain, rule);
}

Grid refine(const Grid& grid, int factor) {
  if (factor < 2) {
    throw Error(ErrorKind::invalid_argument,
                fmt::format("refinement factor must be >= 2, got {}", factor));
  }
  return build_grid(grid.domain(), grid.size() * static_cast<std::size_t>(factor),
                    grid.rule());
}

}  // namespace nld
