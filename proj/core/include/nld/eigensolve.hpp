#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "nld/spectral.hpp"

namespace nld {

enum class Verdict { condition_holds, no_evidence, out_of_scope };

std::string_view to_string(Verdict v) noexcept;

struct ConditionOptions {
  LeftLimitOptions left;
  double margin = 1e-6;
};

struct ConditionReport {
  double limit_lower_estimate = 0.0;
  bool diverged = false;
  Verdict verdict = Verdict::no_evidence;
  std::vector<CurveSample> samples;
};

/// Tests whether spr(A_lambda) exceeds one as lambda approaches -inf a from
/// the right. A sampled curve can certify "> 1" but never "<= 1", hence the
/// no_evidence verdict. A zero kernel or an unconverged sample is out of scope.
ConditionReport check_condition(const Discretization& disc, const ConditionOptions& options = {});
ConditionReport check_condition(const Kernel& kernel, const DeathRate& a, const Grid& grid,
                                const ConditionOptions& options = {});

struct SolverOptions {
  /// Bracket width target, relative: tol_lambda * (1 + |lambda0|).
  double tol_lambda = 1e-10;
  double tol_spr = 1e-9;
  std::size_t max_bisections = 200;
  PowerOptions power;
  ConditionOptions condition;
};

struct EigenResult {
  double lambda0 = 0.0;
  Vector eigenfunction;  ///< nonnegative, unit weighted L1 norm
  double residual = 0.0;            ///< |A(lambda0) u - u|_1
  double generator_residual = 0.0;  ///< |L u - lambda0 u|_1
  double spr_at_lambda0 = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  std::size_t iterations = 0;
  /// |spr - 1| <= tol_spr and the bracket reached tol_lambda.
  bool converged = false;
};

/// Bisection on spr(A_lambda) - 1 between the largest left-endpoint sample
/// with spr > 1 and lambda_hi = |J|_1 - inf a + 1, where the norm bound
/// forces spr < 1. Throws ConditionNotCertified when the report does not
/// certify the condition and BracketFailure when the endpoints agree in sign.
EigenResult solve_principal(const Discretization& disc, const ConditionReport& condition,
                            const SolverOptions& options = {});
EigenResult solve_principal(const Discretization& disc, const SolverOptions& options = {});
EigenResult solve_principal(const Kernel& kernel, const DeathRate& a, const Grid& grid,
                            const SolverOptions& options = {});

enum class CertificateKind { drnovsek, log_bound, rayleigh };

std::string_view to_string(CertificateKind k) noexcept;

/// A lower bound on spr(A_lambda) at `lambda`, with a description of the
/// test function that produced it.
struct Certificate {
  CertificateKind kind = CertificateKind::drnovsek;
  double lambda = 0.0;
  double lower_bound = 0.0;
  std::string witness;
};

/// min over the support of u of (A u)_i / u_i. For nonnegative A and u this
/// never exceeds spr(A).
Certificate drnovsek_bound(const DiscreteOperator& auxiliary, const Eigen::Ref<const Vector>& u,
                           double support_threshold = 1e-14);

/// u(x) = 1 / (gamma + a(x) - a(x*)) for |x - x*| < delta, else 0. Needs an
/// attained infimum (WrongInfimumKind otherwise).
Vector log_bound_test_function(const DeathRate& a, double gamma, double delta, const Grid& grid);

/// (epsilon / C) * ln((C delta + gamma) / gamma).
double log_bound(double epsilon, double lipschitz, double delta, double gamma);

/// Largest gamma with log_bound(...) >= target; closed form
/// C delta / (exp(C target / epsilon) - 1).
double log_bound_gamma(double epsilon, double lipschitz, double delta, double target);

/// Log-bound certificate at lambda = gamma/2 - a(x*), gamma from log_bound_gamma.
/// Needs square-region lower-bound metadata, a Lipschitz death rate and an
/// attained infimum; throws InvalidArgument or WrongInfimumKind otherwise.
Certificate log_bound_certificate(const Kernel& kernel, const DeathRate& a,
                              double target = 1.0 + 1e-3);

/// sum_i f_i g_i (lambda + a_i) w_i
double weighted_inner_product(const Eigen::Ref<const Vector>& f,
                              const Eigen::Ref<const Vector>& g, double lambda,
                              const Discretization& disc);
double weighted_inner_product(const Eigen::Ref<const Vector>& f,
                              const Eigen::Ref<const Vector>& g, double lambda,
                              const DeathRate& a, const Grid& grid);

/// <A v, v> / <v, v> in the (lambda + a)-weighted inner product, a lower
/// bound on spr(A_lambda) when the kernel is symmetric.
Certificate rayleigh_certificate(const Kernel& kernel, const Discretization& disc,
                                 double lambda, const Eigen::Ref<const Vector>& v);
Certificate rayleigh_certificate(const Kernel& kernel, const DeathRate& a, const Grid& grid,
                                 double lambda, const Eigen::Ref<const Vector>& v);

/// 1 on the open interval (lo, hi), 0 elsewhere.
Vector indicator(const Grid& grid, double lo, double hi);

/// 1_{|x - center| < delta} / (lambda + a) + 1_{(u_lo, u_hi)}.
Vector rayleigh_test_function(const Discretization& disc, double lambda, double center,
                           double delta, double u_lo, double u_hi);

/// All eigenvalues of a dense operator (general real eigensolver).
std::vector<std::complex<double>> dense_spectrum(const DiscreteOperator& op);

/// Eigenvalues of L for a symmetric kernel, via the similarity
/// W^{1/2} J W^{1/2} - diag(a). Throws SymmetryRequired if that matrix is not
/// symmetric.
Vector symmetric_generator_spectrum(const Discretization& disc);

}  // namespace nld
