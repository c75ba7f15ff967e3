#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "nld/dynamics.hpp"
#include "nld/eigensolve.hpp"

namespace nld {

/// Round-trip decimal form used in every CSV cell.
std::string format_number(double value);

/// CSV "x,u".
void write_eigenfunction_csv(const EigenResult& result, const Grid& grid, std::ostream& out);

/// {lambda0, residual, bracket_lo, bracket_hi, iterations, eigenfunction_csv_path, ...}
void write_eigen_json(const EigenResult& result, const std::string& eigenfunction_csv_path,
                      std::ostream& out);

/// Resolvent and maximum-principle checks in one document.
void write_verify_json(const ResolventReport& resolvent, double nussbaum_lambda0,
                       const MaximumPrincipleReport& maximum_principle, std::ostream& out);

/// Creates missing parent directories; throws Error(invalid_argument) if the
/// file cannot be written.
void write_text_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace nld
