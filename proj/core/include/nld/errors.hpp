#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nld {

enum class ErrorKind {
  invalid_domain,
  invalid_argument,
  domain_mismatch,
  lambda_out_of_range,
  dimension_mismatch,
  not_nonnegative,
  condition_not_certified,
  bracket_failure,
  empty_test_function,
  wrong_infimum_kind,
  symmetry_required,
  unstable_step,
  degenerate_trajectory,
  singular_resolvent,
  resolvent_degenerate,
  singular_system,
  config_error,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Base exception for every failure raised by the library. The kind is the
/// stable, machine-checkable part; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }
  /// The message without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }

 protected:
  Error(ErrorKind kind, const std::string& what, std::string detail);

 private:
  ErrorKind kind_;
  std::string detail_;
};

class UnstableStepError : public Error {
 public:
  UnstableStepError(double dt, double suggested_dt);

  double suggested_dt() const noexcept { return suggested_dt_; }

 private:
  double suggested_dt_;
};

/// Raised while reading scenario configuration. `line` is 1-based, or 0 when
/// the location is unknown.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, int line, const std::string& message);

  const std::string& key() const noexcept { return key_; }
  int line() const noexcept { return line_; }

 private:
  std::string key_;
  int line_;
};

}  // namespace nld
