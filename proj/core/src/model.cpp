#include "nld/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "nld/errors.hpp"

namespace nld {
namespace {

struct Span {
  double lo;
  double hi;
};

Span span_of(const Grid& grid) {
  const auto& d = grid.domain();
  if (const auto* c = std::get_if<Circle>(&d)) {
    return {-0.5 * c->circumference, 0.5 * c->circumference};
  }
  return {grid.nodes()[0], grid.nodes()[grid.nodes().size() - 1]};
}

std::vector<Eigen::Index> pair_nodes(const Grid& grid, std::size_t max_nodes) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  const auto stride =
      std::max<Eigen::Index>(1, (n + static_cast<Eigen::Index>(max_nodes) - 1) /
                                    static_cast<Eigen::Index>(max_nodes));
  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = 0; i < n; i += stride) idx.push_back(i);
  if (idx.back() != n - 1) idx.push_back(n - 1);
  return idx;
}

}  // namespace

Kernel Kernel::general(std::function<double(double, double)> eval, bool symmetric,
                       std::string description) {
  Kernel k;
  k.eval = std::move(eval);
  k.symmetric = symmetric;
  k.description = std::move(description);
  return k;
}

Kernel Kernel::convolution(std::function<double(double)> profile, std::string description) {
  Kernel k;
  k.eval = [profile](double x, double y) { return profile(x - y); };
  k.structure = ConvolutionKernel{std::move(profile)};
  k.description = std::move(description);
  return k;
}

Kernel Kernel::rank_one(std::function<double(double)> f, std::function<double(double)> g,
                        std::string description) {
  Kernel k;
  k.eval = [f, g](double x, double y) { return f(x) * g(y); };
  k.structure = RankOneKernel{std::move(f), std::move(g)};
  k.description = std::move(description);
  return k;
}

Kernel Kernel::constant(double value) {
  Kernel k;
  k.eval = [value](double, double) { return value; };
  k.structure = ConstantKernel{value};
  k.symmetric = true;
  k.description = fmt::format("constant({})", value);
  return k;
}

DeathRate DeathRate::constant(double value) {
  DeathRate a;
  a.eval = [value](double) { return value; };
  a.inf_value = value;
  a.sup_value = value;
  a.inf_location = AttainedAt{0.0};
  a.description = fmt::format("constant({})", value);
  return a;
}

ValidationReport validate_model(const Kernel& kernel, const DeathRate& a, const Grid& grid,
                                const ValidationOptions& options) {
  ValidationReport report;
  const auto& x = grid.nodes();
  const auto& domain = grid.domain();
  const double tol = options.tolerance;
  const auto [lo, hi] = span_of(grid);

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> uniform(lo, hi);

  auto add = [&](std::string what, double px, double py) {
    report.violations.push_back({std::move(what), px, py});
  };

  // Pairs: strided node pairs followed by seeded random interior pairs.
  std::vector<std::pair<double, double>> pairs;
  const auto idx = pair_nodes(grid, options.max_pair_nodes);
  pairs.reserve(idx.size() * idx.size() + options.random_pairs);
  for (auto i : idx) {
    for (auto j : idx) pairs.emplace_back(x[i], x[j]);
  }
  for (std::size_t k = 0; k < options.random_pairs; ++k) {
    const double px = uniform(rng);
    const double py = uniform(rng);
    pairs.emplace_back(px, py);
  }
  report.pairs_checked = pairs.size();

  bool negativity_reported = false;
  bool asymmetry_reported = false;
  for (const auto& [px, py] : pairs) {
    const double j = kernel(px, py);
    if (!negativity_reported && !(j >= 0.0)) {
      add(fmt::format("negativity at ({}, {})", px, py), px, py);
      negativity_reported = true;
    }
    if (kernel.symmetric && !asymmetry_reported) {
      const double jt = kernel(py, px);
      if (!(std::abs(j - jt) <= tol)) {
        add(fmt::format("asymmetry at ({}, {}): {} vs {}", px, py, j, jt), px, py);
        asymmetry_reported = true;
      }
    }
  }

  if (kernel.lower_bound) {
    const auto& meta = *kernel.lower_bound;
    const double eps = meta.epsilon;
    const double delta = meta.delta;
    std::uniform_real_distribution<double> offset(-delta, delta);
    auto check_floor = [&](double px, double py) {
      const double j = kernel(px, py);
      if (!(j >= eps - tol)) {
        add(fmt::format("lower bound {} violated at ({}, {}): J = {}", eps, px, py, j), px,
            py);
        return false;
      }
      return true;
    };
    if (const auto* sq = std::get_if<SquareRegion>(&meta.region)) {
      std::vector<double> pts;
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (distance(domain, x[i], sq->center) < delta) pts.push_back(x[i]);
      }
      bool ok = true;
      for (double px : pts) {
        for (double py : pts) {
          if (!(ok = check_floor(px, py))) break;
        }
        if (!ok) break;
      }
      for (std::size_t k = 0; ok && k < options.random_pairs; ++k) {
        const double px = std::clamp(sq->center + offset(rng), lo, hi);
        const double py = std::clamp(sq->center + offset(rng), lo, hi);
        if (distance(domain, px, sq->center) < delta &&
            distance(domain, py, sq->center) < delta) {
          ok = check_floor(px, py);
        }
      }
    } else if (std::holds_alternative<BandRegion>(meta.region)) {
      bool ok = true;
      // Node differences that round onto the band edge are skipped.
      const double reach = delta * (1.0 - 1e-9);
      for (Eigen::Index i = 0; ok && i < x.size(); ++i) {
        for (Eigen::Index j = i; j < x.size(); ++j) {
          if (std::abs(x[j] - x[i]) >= reach) break;
          if (!(ok = check_floor(x[i], x[j]))) break;
        }
      }
      for (std::size_t k = 0; ok && k < options.random_pairs; ++k) {
        const double px = uniform(rng);
        const double py = px + offset(rng);
        if (py >= lo && py <= hi && std::abs(py - px) < delta) ok = check_floor(px, py);
      }
    } else if (const auto* ir = std::get_if<IntegralRegion>(&meta.region)) {
      const auto& w = grid.weights();
      for (Eigen::Index j = 0; j < x.size(); ++j) {
        if (distance(domain, x[j], ir->center) >= delta) continue;
        double mass = 0.0;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
          if (x[i] > ir->lo && x[i] < ir->hi) mass += w[i] * kernel(x[i], x[j]);
        }
        if (!(mass > eps)) {
          add(fmt::format("integral lower bound {} violated at y = {}: mass {}", eps, x[j],
                          mass),
              x[j], x[j]);
          break;
        }
      }
    }
  }

  if (!(a.inf_value > 0.0)) {
    add(fmt::format("declared infimum {} is not positive", a.inf_value), 0.0, 0.0);
  }
  if (!(a.inf_value <= a.sup_value)) {
    add(fmt::format("declared infimum {} exceeds supremum {}", a.inf_value, a.sup_value),
        0.0, 0.0);
  }
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double v = a(x[i]);
    if (!(v >= a.inf_value - tol)) {
      add(fmt::format("death rate {} below declared infimum {} at x = {}", v, a.inf_value,
                      x[i]),
          x[i], x[i]);
      break;
    }
    if (!(v <= a.sup_value + tol)) {
      add(fmt::format("death rate {} above declared supremum {} at x = {}", v,
                      a.sup_value, x[i]),
          x[i], x[i]);
      break;
    }
  }
  if (const auto* at = std::get_if<AttainedAt>(&a.inf_location)) {
    const double v = a(at->x);
    if (!(std::abs(v - a.inf_value) <= tol)) {
      add(fmt::format("a({}) = {} does not attain declared infimum {}", at->x, v,
                      a.inf_value),
          at->x, at->x);
    }
  }

  if (a.regularity) {
    // Consecutive nodes probe the small scale, random pairs the large scale.
    std::vector<std::pair<double, double>> apairs;
    for (Eigen::Index i = 0; i + 1 < x.size(); ++i) apairs.emplace_back(x[i], x[i + 1]);
    for (std::size_t k = 0; k < options.random_pairs; ++k) {
      const double px = uniform(rng);
      const double py = uniform(rng);
      apairs.emplace_back(px, py);
    }
    for (const auto& [px, py] : apairs) {
      const double diff = std::abs(a(px) - a(py));
      const double d = distance(domain, px, py);
      double bound = 0.0;
      std::string label;
      if (const auto* lip = std::get_if<Lipschitz>(&*a.regularity)) {
        bound = lip->constant * d;
        label = fmt::format("Lipschitz({})", lip->constant);
      } else {
        const auto& h = std::get<Hoelder>(*a.regularity);
        bound = h.coefficient * std::pow(d, h.alpha);
        label = fmt::format("Hoelder({}, {})", h.alpha, h.coefficient);
      }
      if (!(diff <= bound * (1.0 + 1e-12) + tol)) {
        add(fmt::format("{} violated at ({}, {}): |a(x)-a(y)| = {}", label, px, py, diff),
            px, py);
        break;
      }
    }
  }
  return report;
}

std::string_view to_string(Expectation e) noexcept {
  switch (e) {
    case Expectation::eigenvalue_exists: return "eigenvalue_exists";
    case Expectation::no_eigenvalue: return "no_eigenvalue";
    case Expectation::unknown: return "unknown";
  }
  return "unknown";
}

Expectation parse_expectation(std::string_view name) {
  if (name == "eigenvalue_exists") return Expectation::eigenvalue_exists;
  if (name == "no_eigenvalue") return Expectation::no_eigenvalue;
  if (name == "unknown") return Expectation::unknown;
  throw Error(ErrorKind::invalid_argument, fmt::format("unknown expectation '{}'", name));
}

double hoelder_counterexample_coefficient(double alpha) {
  // 2 * 2 * pi^(1 - alpha) / (1 - alpha)
  return 4.0 * std::pow(std::numbers::pi, 1.0 - alpha) / (1.0 - alpha);
}

NamedModel make_const_circle(double kernel_value, double death_rate, std::size_t nodes) {
  NamedModel m;
  m.name = "const_circle";
  m.domain = Circle{};
  m.kernel = Kernel::constant(kernel_value);
  m.kernel.domain = m.domain;
  m.kernel.lower_bound = LowerBoundMeta{kernel_value, std::numbers::pi, BandRegion{}};
  m.death_rate = DeathRate::constant(death_rate);
  m.expected = Expectation::eigenvalue_exists;
  m.default_nodes = nodes;
  m.default_rule = QuadratureRule::trapezoid;
  return m;
}

NamedModel make_rank_one_log(std::size_t nodes, QuadratureRule rule) {
  NamedModel m;
  m.name = "rank_one_log";
  m.domain = Interval{0.0, 1.0};
  auto one = [](double) { return 1.0; };
  m.kernel = Kernel::rank_one(one, one, "rank_one(1, 1)");
  m.kernel.symmetric = true;
  m.kernel.domain = m.domain;
  m.kernel.lower_bound = LowerBoundMeta{1.0, 1.0, SquareRegion{0.0}};
  m.death_rate.eval = [](double x) { return 2.0 + x; };
  m.death_rate.inf_value = 2.0;
  m.death_rate.sup_value = 3.0;
  m.death_rate.inf_location = AttainedAt{0.0};
  m.death_rate.regularity = Lipschitz{1.0};
  m.death_rate.description = "2 + x";
  m.expected = Expectation::eigenvalue_exists;
  m.default_nodes = nodes;
  m.default_rule = rule;
  return m;
}

NamedModel make_prop1_gauss(double half_width, std::size_t nodes) {
  NamedModel m;
  m.name = "prop1_gauss";
  m.domain = TruncatedLine{half_width};
  m.kernel = Kernel::convolution(
      [](double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); },
      "gaussian(0, 1)");
  m.kernel.symmetric = true;
  m.kernel.lower_bound = LowerBoundMeta{0.24, 0.5, SquareRegion{0.0}};
  m.death_rate.eval = [](double x) { return 1.0 + std::abs(x); };
  m.death_rate.inf_value = 1.0;
  m.death_rate.sup_value = 1.0 + half_width;
  m.death_rate.inf_location = AttainedAt{0.0};
  m.death_rate.regularity = Lipschitz{1.0};
  m.death_rate.description = "1 + |x|";
  m.expected = Expectation::eigenvalue_exists;
  m.default_nodes = nodes;
  m.default_rule = QuadratureRule::trapezoid;
  return m;
}

NamedModel make_prop2_tophat(double half_width, std::size_t nodes) {
  NamedModel m;
  m.name = "prop2_tophat";
  m.domain = TruncatedLine{half_width};
  // The jump at |z| = 0.5 falls on node differences of uniform grids; it
  // takes the midpoint value there, which leaves the integral operator unchanged.
  m.kernel = Kernel::convolution(
      [](double z) {
        const double gap = std::abs(z) - 0.5;
        if (std::abs(gap) <= 1e-9) return 0.5;
        return gap < 0.0 ? 1.0 : 0.0;
      },
      "tophat(0.5)");
  m.kernel.symmetric = true;
  m.kernel.lower_bound = LowerBoundMeta{1.0, 0.5, BandRegion{}};
  m.death_rate.eval = [](double x) { return 1.0 + 1.0 / (1.0 + std::abs(x)); };
  m.death_rate.inf_value = 1.0;
  m.death_rate.sup_value = 2.0;
  m.death_rate.inf_location = AtInfinity{};
  m.death_rate.regularity = Lipschitz{1.0};
  m.death_rate.description = "1 + 1/(1 + |x|)";
  m.expected = Expectation::eigenvalue_exists;
  m.default_nodes = nodes;
  m.default_rule = QuadratureRule::trapezoid;
  return m;
}

NamedModel make_counterexample_hoelder(double kernel_value, double alpha, double floor_value,
                                       std::size_t nodes) {
  NamedModel m;
  const bool unit = kernel_value == 1.0;
  m.name = unit ? "counterexample_hoelder" : "counterexample_hoelder_2pi";
  m.domain = Circle{};
  m.kernel = Kernel::constant(kernel_value);
  m.kernel.domain = m.domain;
  const double c = hoelder_counterexample_coefficient(alpha);
  m.death_rate.eval = [c, alpha, floor_value](double theta) {
    return c * std::pow(std::abs(theta), alpha) + floor_value;
  };
  m.death_rate.inf_value = floor_value;
  m.death_rate.sup_value = c * std::pow(std::numbers::pi, alpha) + floor_value;
  m.death_rate.inf_location = AttainedAt{0.0};
  m.death_rate.regularity = Hoelder{alpha, c};
  m.death_rate.description = fmt::format("{}|theta|^{} + {}", c, alpha, floor_value);
  m.expected = Expectation::no_eigenvalue;
  m.default_nodes = nodes;
  m.default_rule = QuadratureRule::trapezoid;
  return m;
}

std::vector<NamedModel> builtin_catalog() {
  std::vector<NamedModel> out;
  out.push_back(make_const_circle());
  out.push_back(make_rank_one_log());
  out.push_back(make_prop1_gauss());
  out.push_back(make_prop2_tophat());
  out.push_back(make_counterexample_hoelder());
  out.push_back(make_counterexample_hoelder(1.0 / (2.0 * std::numbers::pi)));
  return out;
}

std::optional<NamedModel> find_model(std::string_view name) {
  for (auto& m : builtin_catalog()) {
    if (m.name == name) return std::move(m);
  }
  return std::nullopt;
}

std::optional<NamedModel> rescale_truncation(const NamedModel& model, double half_width,
                                             std::size_t nodes) {
  if (!std::holds_alternative<TruncatedLine>(model.domain)) return std::nullopt;
  NamedModel out;
  if (model.name == "prop1_gauss") {
    out = make_prop1_gauss(half_width, nodes);
  } else if (model.name == "prop2_tophat") {
    out = make_prop2_tophat(half_width, nodes);
  } else {
    out = model;
    out.domain = TruncatedLine{half_width};
    out.default_nodes = nodes;
    if (out.kernel.domain) out.kernel.domain = out.domain;
  }
  out.name = model.name;
  return out;
}

double derive_convolution_epsilon(const std::function<double(double)>& profile,
                                  double half_width, std::size_t samples) {
  if (samples < 2 || !(half_width > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "need at least 2 samples on a positive width");
  }
  double lowest = profile(-half_width);
  for (std::size_t k = 1; k < samples; ++k) {
    const double z = -half_width + 2.0 * half_width * static_cast<double>(k) /
                                       static_cast<double>(samples - 1);
    lowest = std::min(lowest, profile(z));
  }
  return lowest;
}

}  // namespace nld
