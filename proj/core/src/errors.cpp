#include "nld/errors.hpp"

#include <fmt/format.h>

namespace nld {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_domain: return "InvalidDomain";
    case ErrorKind::invalid_argument: return "InvalidArgument";
    case ErrorKind::domain_mismatch: return "DomainMismatch";
    case ErrorKind::lambda_out_of_range: return "LambdaOutOfRange";
    case ErrorKind::dimension_mismatch: return "DimensionMismatch";
    case ErrorKind::not_nonnegative: return "NotNonnegative";
    case ErrorKind::condition_not_certified: return "ConditionNotCertified";
    case ErrorKind::bracket_failure: return "BracketFailure";
    case ErrorKind::empty_test_function: return "EmptyTestFunction";
    case ErrorKind::wrong_infimum_kind: return "WrongInfimumKind";
    case ErrorKind::symmetry_required: return "SymmetryRequired";
    case ErrorKind::unstable_step: return "UnstableStep";
    case ErrorKind::degenerate_trajectory: return "DegenerateTrajectory";
    case ErrorKind::singular_resolvent: return "SingularResolvent";
    case ErrorKind::resolvent_degenerate: return "ResolventDegenerate";
    case ErrorKind::singular_system: return "SingularSystem";
    case ErrorKind::config_error: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(fmt::format("{}: {}", to_string(kind), message)),
      kind_(kind),
      detail_(message) {}

Error::Error(ErrorKind kind, const std::string& what, std::string detail)
    : std::runtime_error(fmt::format("{}: {}", to_string(kind), what)),
      kind_(kind),
      detail_(std::move(detail)) {}

UnstableStepError::UnstableStepError(double dt, double suggested_dt)
    : Error(ErrorKind::unstable_step,
            fmt::format("dt = {} violates the stability guard; use dt <= {}",
                        dt, suggested_dt)),
      suggested_dt_(suggested_dt) {}

ConfigError::ConfigError(std::string key, int line, const std::string& message)
    : Error(ErrorKind::config_error,
            line > 0 ? fmt::format("{} (key '{}', line {})", message, key, line)
                     : fmt::format("{} (key '{}')", message, key),
            message),
      key_(std::move(key)),
      line_(line) {}

}  // namespace nld
