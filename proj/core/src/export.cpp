#include "nld/export.hpp"

#include <cmath>
#include <fstream>
#include <ostream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "nld/errors.hpp"

namespace nld {

namespace {

nlohmann::json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

}  // namespace

std::string format_number(double value) { return fmt::format("{:.17g}", value); }

void write_eigenfunction_csv(const EigenResult& result, const Grid& grid, std::ostream& out) {
  if (static_cast<std::size_t>(result.eigenfunction.size()) != grid.size()) {
    throw Error(ErrorKind::dimension_mismatch, "eigenfunction and grid differ in size");
  }
  out << "x,u\n";
  for (Eigen::Index i = 0; i < result.eigenfunction.size(); ++i) {
    out << format_number(grid.nodes()[i]) << ',' << format_number(result.eigenfunction[i])
        << '\n';
  }
}

void write_eigen_json(const EigenResult& result, const std::string& eigenfunction_csv_path,
                      std::ostream& out) {
  nlohmann::ordered_json j;
  j["lambda0"] = number(result.lambda0);
  j["residual"] = number(result.residual);
  j["generator_residual"] = number(result.generator_residual);
  j["spr_at_lambda0"] = number(result.spr_at_lambda0);
  j["bracket_lo"] = number(result.bracket_lo);
  j["bracket_hi"] = number(result.bracket_hi);
  j["iterations"] = result.iterations;
  j["converged"] = result.converged;
  j["eigenfunction_csv_path"] = eigenfunction_csv_path;
  out << j.dump(2) << '\n';
}

void write_verify_json(const ResolventReport& resolvent, double nussbaum_lambda0,
                       const MaximumPrincipleReport& maximum_principle, std::ostream& out) {
  nlohmann::ordered_json j;
  auto& r = j["resolvent"];
  r["mu"] = number(resolvent.mu);
  r["is_positive"] = resolvent.is_positive;
  r["min_inverse_entry"] = number(resolvent.min_inverse_entry);
  r["spr_auxiliary"] = number(resolvent.spr_auxiliary);
  r["neumann_applicable"] = resolvent.neumann_applicable;
  r["neumann_consistent"] = resolvent.neumann_consistent;
  r["max_neumann_error"] = number(resolvent.max_neumann_error);
  r["witnesses"] = resolvent.witnesses;
  r["lambda0_from_resolvent"] = number(nussbaum_lambda0);
  auto& m = j["maximum_principle"];
  m["spr_a0"] = number(maximum_principle.spr_a0);
  m["inverse_positive"] = maximum_principle.inverse_positive;
  m["min_inverse_entry"] = number(maximum_principle.min_inverse_entry);
  m["equivalence_holds"] = maximum_principle.equivalence_holds;
  m["solutions_nonnegative"] = maximum_principle.solutions_nonnegative;
  m["max_neumann_error"] = number(maximum_principle.max_neumann_error);
  out << j.dump(2) << '\n';
}

void write_text_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::invalid_argument, "cannot write " + path.string());
  out << contents;
  if (!out) throw Error(ErrorKind::invalid_argument, "short write to " + path.string());
}

}  // namespace nld
