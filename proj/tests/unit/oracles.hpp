#pragma once

// Reference values computed independently of the library's solvers.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace oracle {

/// spr(A_lambda) for J = 1 on [0, 1], a(x) = 2 + x.
inline double rank_one_log_spr(double lambda) { return std::log((lambda + 3.0) / (lambda + 2.0)); }

/// Root of ln((lambda + 3) / (lambda + 2)) = 1.
inline double rank_one_log_lambda0() { return 1.0 / (std::numbers::e - 1.0) - 2.0; }

/// 2 * integral over [-pi, pi] of |theta|^(-1/2) = 8 sqrt(pi).
inline double hoelder_coefficient_half() { return 8.0 * std::sqrt(std::numbers::pi); }

/// Largest modulus among all eigenvalues (general dense solver).
inline double brute_spr(const Eigen::MatrixXd& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Entrywise uniform [0, 1) matrix.
inline Eigen::MatrixXd random_nonnegative(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd m(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) m(i, j) = u(rng);
  return m;
}

inline Eigen::VectorXd random_vector(int n, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

/// Aitken delta-squared limit of three successive terms.
inline double aitken(double s0, double s1, double s2) {
  const double denom = s2 - 2.0 * s1 + s0;
  if (denom == 0.0) return s2;
  return s2 - (s2 - s1) * (s2 - s1) / denom;
}

}  // namespace oracle
