#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace hpl {

enum class Method { exact, mc };

std::string to_string(Method m);

/// Parameters recorded with every report.
struct ReportParams {
  int n = 0;
  long d = 0;
  std::optional<double> p;
  std::string norm;
  std::string gauge;
  std::optional<std::size_t> quad_nodes;
  std::vector<double> t_grid;
  std::optional<std::uint64_t> seed;
  Method method = Method::exact;
  double tol_rel = 1e-8;
  double tol_abs = 1e-12;
  nlohmann::json extra = nlohmann::json::object();
};

/// Outcome of checking one inequality lhs <= rhs.
///
/// Exact mode: satisfied iff lhs <= rhs + tol_rel |rhs| + tol_abs.
/// Monte Carlo mode: satisfied iff lhs <= rhs + 4 error_bound + tol_abs, where
/// error_bound is the standard error of lhs - rhs.
struct InequalityReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;          ///< lhs / rhs; 0 when both vanish
  bool ratio_infinite = false; ///< rhs == 0 < lhs
  std::optional<double> constant;  ///< empirical constant, e.g. ratio^{1/p}
  double error_bound = 0.0;
  bool satisfied = false;
  ReportParams params;
};

/// Fills ratio and satisfied from lhs, rhs and the tolerance policy in params.
InequalityReport make_report(std::string name, double lhs, double rhs, ReportParams params,
                             double error_bound = 0.0);

/// Stable field names: name, lhs, rhs, ratio, satisfied, params, error_bound.
nlohmann::json to_json(const InequalityReport& report);

}  // namespace hpl
