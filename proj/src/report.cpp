#include "hpl/report.hpp"

#include <cmath>

namespace hpl {

std::string to_string(Method m) { return m == Method::exact ? "exact" : "mc"; }

InequalityReport make_report(std::string name, double lhs, double rhs, ReportParams params,
                             double error_bound) {
  InequalityReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.error_bound = error_bound;
  if (rhs == 0.0) {
    r.ratio = 0.0;
    r.ratio_infinite = lhs > 0.0;
  } else {
    r.ratio = lhs / rhs;
  }
  const double slack = params.method == Method::exact
                           ? params.tol_rel * std::abs(rhs) + params.tol_abs
                           : 4.0 * error_bound + params.tol_abs;
  r.satisfied = std::isfinite(lhs) && !std::isnan(rhs) && lhs <= rhs + slack;
  r.params = std::move(params);
  return r;
}

nlohmann::json to_json(const InequalityReport& r) {
  nlohmann::json params = {
      {"n", r.params.n},
      {"d", r.params.d},
      {"method", to_string(r.params.method)},
      {"tol_rel", r.params.tol_rel},
      {"tol_abs", r.params.tol_abs},
  };
  if (r.params.p) params["p"] = *r.params.p;
  if (!r.params.norm.empty()) params["norm"] = r.params.norm;
  if (!r.params.gauge.empty()) params["gauge"] = r.params.gauge;
  if (r.params.quad_nodes) params["quad_nodes"] = *r.params.quad_nodes;
  if (!r.params.t_grid.empty()) params["t_grid"] = r.params.t_grid;
  if (r.params.seed) params["seed"] = *r.params.seed;
  for (const auto& [key, value] : r.params.extra.items()) params[key] = value;

  nlohmann::json out = {
      {"name", r.name},
      {"lhs", r.lhs},
      {"rhs", r.rhs},
      {"satisfied", r.satisfied},
      {"error_bound", r.error_bound},
      {"params", params},
  };
  // An unbounded ratio is flagged rather than serialized as a float infinity.
  if (r.ratio_infinite) {
    out["ratio"] = nullptr;
    out["ratio_infinite"] = true;
  } else {
    out["ratio"] = r.ratio;
  }
  if (r.constant) out["constant"] = *r.constant;
  return out;
}

}  // namespace hpl
