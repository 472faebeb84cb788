#pragma once

// Evaluators that put both sides of each cube inequality next to each other.
// Exact mode enumerates every expectation; Monte Carlo mode samples the
// doubly-indexed ones and reports standard errors.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hpl/biased_measure.hpp"
#include "hpl/cube.hpp"
#include "hpl/gauge.hpp"
#include "hpl/norms.hpp"
#include "hpl/report.hpp"

namespace hpl {

inline constexpr double kHalfPi = 0.5 * M_PI;
/// pi / sqrt(2), the Enflo-versus-Rademacher factor.
inline constexpr double kEnfloFactor = M_PI / 1.4142135623730950488;

struct EvalOptions {
  Method method = Method::exact;
  MonteCarloOptions mc{};
  double tol_rel = 1e-8;
  double tol_abs = 1e-12;
  /// Exact mode: report |rhs(m) - rhs(m/2)| as error_bound (doubles as a quadrature check).
  bool estimate_quadrature_error = false;
};

/// E||f - Ef||^p, exact.
double centered_moment(const CubeFunctiond& f, double p, const NormSpec& spec);

/// E||f(eps) - Ef||^p against E||sum_j delta_j D_j f(eps)||^p with uniform
/// independent signs delta. The reported constant is ratio^{1/p}.
InequalityReport pisier_classic_sides(const CubeFunctiond& f, double p, const NormSpec& spec,
                                      const EvalOptions& opts = {});

/// E Phi(f - Ef) against int E Phi((pi/2) sum_j delta_j(t) D_j f(eps)) mu(dt).
InequalityReport dimension_free_main_sides(const CubeFunctiond& f, const ConvexGauge& gauge,
                                           const MuQuadrature& quad, const EvalOptions& opts = {});

/// (E||f - Ef||^p)^{1/p} against (pi/2) int (E||sum_j delta_j(t) D_j f||^p)^{1/p} mu(dt).
InequalityReport dimension_free_lp_sides(const CubeFunctiond& f, double p, const NormSpec& spec,
                                         const MuQuadrature& quad, const EvalOptions& opts = {});

/// E||(f(eps) - f(-eps))/2||^p against sum_j E||D_j f||^p. Constant = ratio^{1/p}.
InequalityReport enflo_sides(const CubeFunctiond& f, double p, const NormSpec& spec,
                             const EvalOptions& opts = {});

/// Enflo constant of f against (pi/sqrt 2) * type_estimate.
InequalityReport enflo_vs_rademacher(const CubeFunctiond& f, double p, const NormSpec& spec,
                                     double type_estimate, const EvalOptions& opts = {});

/// E||(f(eps) - f(-eps))/2||^p <= E||f - Ef||^p.
InequalityReport enflo_domination(const CubeFunctiond& f, double p, const NormSpec& spec,
                                  const EvalOptions& opts = {});

/// Max over points of the Euclidean norm of the residual of the pointwise
/// representation of f - Ef, by two routes.
struct PointwiseResidual {
  double mu_route = 0.0;         ///< inner expectation exact, mu-integral by the rule
  double semigroup_route = 0.0;  ///< int_0^inf sum_j D_j P_t D_j f dt along the heat flow
  double max() const { return std::max(mu_route, semigroup_route); }
};
PointwiseResidual pointwise_identity_residual(const CubeFunctiond& f, const MuQuadrature& quad);

/// Links of the symmetrization argument at a fixed t, with
/// eta_j = (xi_j - xi'_j) / sqrt(Var xi_j):
///   jensen:  E||sum delta_j(t) D_j f||^p <= E||sum eta_j D_j f||^p
///   type:    E||sum eps'_j eta_j D_j f||^p <= T^p sum_j E|eta_j|^p E||D_j f||^p
///   moment:  T^p sum_j E|eta_j|^p E||D_j f||^p <= 2^{p/2} T^p sum_j E||D_j f||^p
/// where T is the largest conditional Rademacher ratio met during the
/// enumeration (a lower bound for the type constant of the norm). With a
/// supplied type constant the end-to-end bound is checked as well.
struct SymmetrizationChain {
  std::vector<InequalityReport> links;
  std::optional<double> distribution_gap;  ///< |E||sum eta D f||^p - E||sum eps' eta D f||^p|
  std::optional<double> empirical_type_constant;
  bool satisfied() const;
};
SymmetrizationChain symmetrization_chain_check(const CubeFunctiond& f, double p,
                                               const NormSpec& spec, double t,
                                               std::optional<double> type_constant = {},
                                               const EvalOptions& opts = {});

/// Biased versus uniform Rademacher sums with eta_j = (xi_j - xi'_j)/sqrt(Var xi_j).
struct ContractionReport {
  double biased_moment = 0.0;   ///< E||sum eta_j x_j||^p
  double uniform_moment = 0.0;  ///< E||sum eps_j x_j||^p
  double ratio = 0.0;           ///< (biased / uniform)^{1/p}
  double tail_factor = 0.0;     ///< int_0^inf P{|eta_1| > s}^{1/max(q,p)} ds, closed form
  double tail_factor_direct = 0.0;
  double empirical_constant = 0.0;  ///< ratio / tail_factor; no bound is asserted on it
  bool tail_factor_matches = false;
  ReportParams params;
};
ContractionReport contraction_check(const Eigen::MatrixXd& vectors, double p, double q_cotype,
                                    const NormSpec& spec, double t);

nlohmann::json to_json(const ContractionReport& report);
nlohmann::json to_json(const SymmetrizationChain& chain);

}  // namespace hpl
