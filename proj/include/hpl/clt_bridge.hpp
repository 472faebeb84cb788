#pragma once

// From the cube to Gauss space: f_N(eps) = f(sum_j eps_1j / sqrt N, ..., sum_j eps_nj / sqrt N)
// on {-1,1}^{n x N}, the Gaussian Pisier sides, and the convergence experiment.

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "hpl/cube.hpp"
#include "hpl/gauge.hpp"
#include "hpl/random.hpp"
#include "hpl/report.hpp"

namespace hpl {

/// f: R^n -> R^d with its Jacobian (d x n, column i = partial_i f).
struct SmoothFunction {
  int n = 1;
  Eigen::Index d = 1;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> value;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jacobian;
  double lipschitz = 0.0;
  double support_radius = 0.0;  ///< infinity when not compactly supported
  std::string name;

  /// f(x) = A x.
  static SmoothFunction linear(const Eigen::MatrixXd& a);
  static SmoothFunction constant(int n, const Eigen::VectorXd& c);
  /// sin x on R.
  static SmoothFunction sine();
  /// tanh applied coordinatewise on R^n.
  static SmoothFunction tanh_map(int n);
  /// x^2 on R.
  static SmoothFunction square();
};

/// Largest |fd - analytic| / max(1, |analytic|) over random points, central differences.
double jacobian_check(const SmoothFunction& f, RngCursor& rng, int points = 32);

/// Lazy evaluator of f_N; coordinate (i, j) of the cube is bit i N + j. It
/// depends on eps only through the row sums S_i = sum_j eps_ij.
class EmbeddedFunction {
 public:
  EmbeddedFunction(SmoothFunction f, int copies);

  int groups() const { return f_.n; }
  int copies() const { return copies_; }
  int dim() const { return f_.n * copies_; }
  Eigen::Index target_dim() const { return f_.d; }
  const SmoothFunction& base() const { return f_; }

  /// eps is n x N with entries +-1.
  Eigen::VectorXd operator()(const Eigen::MatrixXi& eps) const;
  /// Exact two-point difference D_ij f_N(eps).
  Eigen::VectorXd derivative(const Eigen::MatrixXi& eps, int i, int j) const;

  Eigen::VectorXd value_at_sums(const Eigen::VectorXi& sums) const;
  /// D_ij f_N at row sums `sums` when eps_ij = sign.
  Eigen::VectorXd derivative_at_sums(const Eigen::VectorXi& sums, int i, int sign) const;

  /// Dense table, for n N <= kMaxCubeDim.
  CubeFunctiond tabulate() const;

 private:
  Eigen::VectorXd point(const Eigen::VectorXi& sums) const;

  SmoothFunction f_;
  int copies_;
  double scale_;
};

EmbeddedFunction build_fN(const SmoothFunction& f, int copies);

/// max over sampled eps and (i, j) of N |D_ij f_N - (eps_ij / sqrt N) partial_i f(S / sqrt N)|.
double derivative_asymptotic_constant(const EmbeddedFunction& fN, RngCursor& rng, int samples = 256);

struct GaussianPisierQuery {
  SmoothFunction f;
  ConvexGauge gauge;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 0;
  /// Seed of the independent sample used for E f(G); defaults to seed + 1.
  std::optional<std::uint64_t> mean_seed;
};

/// Monte Carlo E Phi(f(G) - E f(G)) against E Phi((pi/2) sum_j G'_j partial_j f(G)).
/// lhs and rhs come from independent samples; error_bound combines their
/// standard errors. Fewer than 1000 samples marks the report high_variance.
InequalityReport gaussian_pisier_sides(const GaussianPisierQuery& query);

struct CltConfig {
  std::vector<int> copies{4, 16, 64, 256};
  std::uint64_t samples = 100000;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> mean_seed;
  std::size_t quad_nodes = 64;
};

struct CltRow {
  int copies = 0;
  double lhs_cube = 0.0, rhs_cube = 0.0, lhs_gauss = 0.0, rhs_gauss = 0.0;
  double lhs_cube_se = 0.0, rhs_cube_se = 0.0, lhs_gauss_se = 0.0, rhs_gauss_se = 0.0;
  /// cube minus Gauss, estimated from coupled samples, with standard errors.
  double lhs_diff = 0.0, rhs_diff = 0.0;
  double lhs_diff_se = 0.0, rhs_diff_se = 0.0;
};

struct CltTable {
  std::vector<CltRow> rows;
  std::uint64_t seed = 0;
  std::uint64_t mean_seed = 0;
  std::uint64_t samples = 0;
  std::size_t quad_nodes = 0;
  std::string function;
  std::string gauge;
};

/// For each N: both sides of the dimension-free inequality for f_N, by Monte
/// Carlo over eps and the inner biased signs with the mu-integral on the rule,
/// and both Gaussian sides. The cube and Gauss samples are coupled through
/// shared uniforms (binomial and normal quantiles), so the differences carry
/// much smaller noise than the sides themselves.
CltTable clt_convergence_experiment(const SmoothFunction& f, const ConvexGauge& gauge, const CltConfig& config);

/// Columns: N, lhs_cube, rhs_cube, lhs_gauss, rhs_gauss, the four standard
/// errors, lhs_diff, lhs_diff_se, rhs_diff, rhs_diff_se.
void write_csv(const CltTable& table, std::ostream& out);
nlohmann::json to_json(const CltTable& table);

}  // namespace hpl
