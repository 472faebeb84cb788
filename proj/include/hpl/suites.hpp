#pragma once

// Verification suites over reproducible fuzz corpora, shared by the command
// line tool and the acceptance tests. Each suite yields one JSON record per
// check, in instance order.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hpl/norms.hpp"

namespace hpl {

enum class VerifyKind { probrep, pointwise, main, lp, enflo, symmetrization, integrals };

std::string to_string(VerifyKind kind);
VerifyKind parse_verify_kind(const std::string& text);

struct SuiteConfig {
  int n_min = 1;
  int n_max = 6;
  Eigen::Index d_min = 1;
  Eigen::Index d_max = 3;
  std::optional<double> p;  ///< fixed exponent; otherwise drawn per instance
  std::optional<double> q;
  std::optional<double> t;  ///< symmetrization time; otherwise drawn per instance
  std::vector<std::string> norms{"l1", "l2", "linf"};
  std::uint64_t trials = 100;
  std::size_t quad_nodes = 64;
  std::uint64_t seed = 0;
  double tol_rel = 1e-8;
  double tol_abs = 1e-12;
  bool mc = false;
  std::uint64_t mc_samples = 100000;
};

struct SuiteOutcome {
  std::string suite;
  std::vector<nlohmann::json> records;
  std::uint64_t checks = 0;
  std::uint64_t violations = 0;
  /// Largest lhs / rhs among the records with rhs > 0, for the summary line.
  double max_ratio = 0.0;
  bool ok() const { return violations == 0; }
};

SuiteOutcome run_verify_suite(VerifyKind kind, const SuiteConfig& config);

/// Upper bound for the Rademacher type-p constant of the normed space, from
/// its Banach-Mazur distance to Euclidean space: 1 for l_2 or p = 1, and
/// d^{|1/2 - 1/r|} for l_r^d otherwise. Requires p in [1, 2].
double type_constant_upper_bound(const NormSpec& norm, double p);

/// Test integrands against mu that are smooth in the angle variable.
struct MuTestIntegrand {
  std::string name;
  std::function<double(double)> g;
};
std::vector<MuTestIntegrand> mu_test_integrands();

struct SweepConfig {
  std::vector<int> n_values{2, 3, 4};
  std::vector<double> p_values{1.0, 1.5, 2.0};
  std::vector<std::string> norms{"l1", "l2", "linf"};
  Eigen::Index d = 2;
  std::uint64_t trials = 20;
  std::size_t quad_nodes = 64;
  std::uint64_t seed = 0;
  double tol_rel = 1e-8;
};

struct SweepRow {
  int n = 0;
  double p = 0.0;
  std::string norm;
  std::uint64_t trials = 0;
  double max_ratio_main = 0.0;
  double max_ratio_lp = 0.0;
  double max_constant_pisier = 0.0;
  double max_constant_enflo = 0.0;
  std::uint64_t violations = 0;
};

/// Grid over (n, p, norm): worst observed ratios of the dimension-free
/// inequalities and largest classical Pisier and Enflo constants.
std::vector<SweepRow> run_sweep(const SweepConfig& config);
void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);

}  // namespace hpl
