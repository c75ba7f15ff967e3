#include "nld/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>

#include "nld/errors.hpp"

namespace nld {
namespace {

SpectralResult power_iteration(const Matrix& m, const Vector& weights,
                               const PowerOptions& options) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(ErrorKind::dimension_mismatch,
                fmt::format("power iteration needs a nonempty square matrix, got {}x{}",
                            m.rows(), m.cols()));
  }
  if (!(options.tol > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "power iteration tolerance must be positive");
  }
  const double lowest = m.minCoeff();
  if (lowest < 0.0 || std::isnan(lowest)) {
    throw Error(ErrorKind::not_nonnegative,
                fmt::format("matrix has a negative entry ({})", lowest));
  }

  auto norm = [&](const Vector& v) { return weights.dot(v.cwiseAbs()); };

  const double inf_norm = m.rowwise().sum().maxCoeff();
  const double shift = options.shift.value_or(1e-3 * inf_norm);

  SpectralResult result;
  Vector v = Vector::Ones(m.rows());
  if (options.start.size() != 0) {
    if (options.start.size() != m.rows() || !(options.start.minCoeff() > 0.0)) {
      throw Error(ErrorKind::invalid_argument,
                  "power iteration start vector must be strictly positive and sized to M");
    }
    v = options.start;
  }
  v /= norm(v);
  Vector mv(m.rows());
  double previous = std::numeric_limits<double>::quiet_NaN();

  for (std::size_t it = 1; it <= options.max_iter; ++it) {
    mv.noalias() = m * v;
    result.iterations = it;
    const double image = norm(mv);
    if (image == 0.0) {
      result.radius = 0.0;
      result.residual = 0.0;
      result.converged = true;
      result.perron_vector = v;
      return result;
    }
    // For nonnegative vectors |Mv + s v|_1 = |Mv|_1 + s, so the shift drops
    // out of the estimate exactly.
    const double radius = image;
    const double ratio = radius + shift;
    const double residual = norm(mv - radius * v);
    const double change = std::abs(ratio - previous) / ratio;
    previous = ratio;

    result.radius = radius;
    result.residual = residual;
    result.perron_vector = v;
    if (change < options.tol && residual <= options.tol * std::max(1.0, radius)) {
      result.converged = true;
      return result;
    }
    v = mv + shift * v;
    v /= norm(v);
  }
  return result;
}

}  // namespace

Vector warm_start(const Vector& perron_vector) {
  if (perron_vector.size() == 0) return {};
  const double top = perron_vector.maxCoeff();
  if (!(top > 0.0)) return {};
  // Keep every entry strictly positive so no component is lost.
  return perron_vector.cwiseMax(1e-3 * top);
}

SpectralResult spectral_radius(const Matrix& m, const PowerOptions& options) {
  return power_iteration(m, Vector::Ones(m.rows()), options);
}

SpectralResult spectral_radius(const DiscreteOperator& op, const PowerOptions& options) {
  if (static_cast<Eigen::Index>(op.grid.size()) != op.size()) {
    throw Error(ErrorKind::dimension_mismatch, "operator and grid sizes differ");
  }
  return power_iteration(op.matrix, op.grid.weights(), options);
}

double SprCurve::supremum() const {
  double best = 0.0;
  for (const auto& s : samples) best = std::max(best, s.radius);
  return best;
}

double upper_bound(double lambda, double j_norm, double inf_a) {
  check_lambda(lambda, inf_a);
  return j_norm / (lambda + inf_a);
}

SprCurve spr_curve(const Discretization& disc, std::span<const double> lambdas,
                   const PowerOptions& options) {
  SprCurve curve;
  curve.inf_a = disc.inf_a;
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    if (!(lambdas[k] > -disc.inf_a)) {
      throw Error(ErrorKind::lambda_out_of_range,
                  fmt::format("lambda sample #{} = {} must exceed -inf a = {}", k, lambdas[k],
                              -disc.inf_a));
    }
    if (k > 0 && !(lambdas[k] > lambdas[k - 1])) {
      throw Error(ErrorKind::invalid_argument,
                  fmt::format("lambda samples must increase strictly (sample #{})", k));
    }
  }
  curve.samples.reserve(lambdas.size());
  PowerOptions opts = options;
  for (double lambda : lambdas) {
    const auto power_result = spectral_radius(disc.auxiliary(lambda), opts);
    opts.start = warm_start(power_result.perron_vector);
    curve.samples.push_back({lambda, power_result.radius, power_result.converged, power_result.residual,
                             upper_bound(lambda, disc.j_norm, disc.inf_a)});
  }
  return curve;
}

SprCurve spr_curve(const Kernel& kernel, const DeathRate& a, const Grid& grid,
                   std::span<const double> lambdas, const PowerOptions& options) {
  return spr_curve(discretize(kernel, a, grid), lambdas, options);
}

MonotoneCheck check_monotone(const SprCurve& curve, double tol) {
  MonotoneCheck out;
  for (std::size_t k = 0; k + 1 < curve.samples.size(); ++k) {
    if (curve.samples[k + 1].radius > curve.samples[k].radius + tol) {
      out.ok = false;
      out.violation = k;
      return out;
    }
  }
  return out;
}

std::vector<double> default_left_offsets() {
  std::vector<double> offsets;
  for (int k = 1; k <= 8; ++k) offsets.push_back(std::pow(10.0, -k));
  return offsets;
}

LeftLimit left_endpoint_limit(const Discretization& disc, const LeftLimitOptions& options) {
  const auto offsets = options.offsets.empty() ? default_left_offsets() : options.offsets;
  for (std::size_t k = 0; k < offsets.size(); ++k) {
    if (!(offsets[k] > 0.0) || (k > 0 && !(offsets[k] < offsets[k - 1]))) {
      throw Error(ErrorKind::invalid_argument,
                  "left endpoint offsets must be positive and strictly decreasing");
    }
  }
  if (offsets.back() < options.floor) {
    throw Error(ErrorKind::invalid_argument,
                fmt::format("smallest offset {} is below the floor {}", offsets.back(),
                            options.floor));
  }
  LeftLimit out;
  PowerOptions opts = options.power;
  for (double eta : offsets) {
    const double lambda = -disc.inf_a + eta;
    const auto power_result = spectral_radius(disc.auxiliary(lambda), opts);
    opts.start = warm_start(power_result.perron_vector);
    out.samples.push_back({lambda, power_result.radius, power_result.converged, power_result.residual,
                           upper_bound(lambda, disc.j_norm, disc.inf_a)});
    out.last = power_result.radius;
    out.supremum = std::max(out.supremum, power_result.radius);
    if (power_result.radius > options.cap) {
      out.diverged = true;
      break;
    }
  }
  return out;
}

LeftLimit left_endpoint_limit(const Kernel& kernel, const DeathRate& a, const Grid& grid,
                              const LeftLimitOptions& options) {
  return left_endpoint_limit(discretize(kernel, a, grid), options);
}

void write_curve_csv(const SprCurve& curve, std::ostream& out) {
  out << "lambda,spr,converged,residual,upper_bound\n";
  for (const auto& s : curve.samples) {
    out << fmt::format("{:.17g},{:.17g},{},{:.17g},{:.17g}\n", s.lambda, s.radius,
                       s.converged ? 1 : 0, s.residual, s.upper_bound);
  }
}

}  // namespace nld
