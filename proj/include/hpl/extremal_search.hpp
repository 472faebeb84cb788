#pragma once

// Ascent searches for large ratios: Rademacher type and cotype over vector
// configurations, the classical Pisier ratio and the Enflo ratio over Walsh
// coefficients. Every reported value is a ratio at a feasible point, hence a
// lower bound on the corresponding best constant.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "hpl/norms.hpp"

namespace hpl {

enum class Objective { type_const, cotype_const, pisier_ratio, enflo_ratio };
enum class StepRule { fixed, backtracking };

std::string to_string(Objective objective);
Objective parse_objective(const std::string& text);

struct SearchConfig {
  Objective objective = Objective::type_const;
  double exponent = 2.0;  ///< p for type/Pisier/Enflo, q for cotype
  NormSpec norm = NormSpec::euclidean(2);
  int n = 2;
  int restarts = 16;
  int max_iters = 500;
  StepRule step_rule = StepRule::backtracking;
  double step = 0.1;
  std::uint64_t seed = 0;
  /// l_1 / l_inf are replaced by l_r surrogates with this exponent during ascent.
  double smoothing = 64.0;
  /// Ascent steps on the exact norm after the smoothed phase (subgradient, increases only).
  int polish_iters = 50;
  /// Walsh objectives: restrict f to degree <= cap (1 = linear functions).
  std::optional<int> degree_cap;
  /// Optional first starting point in parameter space. A d x n configuration
  /// is accepted for Walsh objectives and read as a linear function.
  std::optional<Eigen::MatrixXd> initial;
};

struct RestartTrace {
  int restart = 0;
  std::vector<double> smoothed_values;  ///< smoothed ratio after each accepted step, starting point first
  std::vector<double> steps;            ///< accepted step lengths
  double initial_exact = 0.0;
  double final_exact = 0.0;
  double final_smoothed = 0.0;
  int iterations = 0;
  int polish_steps = 0;
  std::uint64_t evaluations = 0;
};

struct SearchResult {
  Objective objective = Objective::type_const;
  double best_value = 0.0;     ///< exact-norm ratio at `argument`
  double best_smoothed = 0.0;  ///< smoothed ratio at `argument`
  /// d x n vectors (type/cotype) or d x 2^n Walsh coefficients (Pisier/Enflo).
  Eigen::MatrixXd argument;
  int best_restart = 0;
  std::vector<RestartTrace> traces;
  std::uint64_t evaluations = 0;
};

/// Log-ratio objective in parameter space, with its gradient.
class SearchObjective {
 public:
  SearchObjective(const SearchConfig& config, bool smoothed);

  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  /// 1 where a parameter is free; Walsh objectives fix the empty set and
  /// anything above the degree cap at 0.
  const Eigen::MatrixXd& mask() const { return mask_; }

  /// log of the ratio; -inf if the numerator vanishes. Fills `gradient` when given.
  double log_ratio(const Eigen::MatrixXd& theta, Eigen::MatrixXd* gradient = nullptr) const;
  /// The ratio with the exact norm, through the inequality_lab / norms evaluators.
  double exact_value(const Eigen::MatrixXd& theta) const;
  /// Rescales theta so that its denominator equals 1; returns the scale factor.
  double normalize(Eigen::MatrixXd& theta) const;

  std::uint64_t evaluations() const { return evaluations_; }

 private:
  struct Sides {
    double numerator;
    double denominator;
  };
  Sides sides(const Eigen::MatrixXd& theta, Eigen::MatrixXd* grad_num, Eigen::MatrixXd* grad_den) const;
  Sides walsh_sides(const Eigen::MatrixXd& theta, Eigen::MatrixXd* grad_num, Eigen::MatrixXd* grad_den) const;
  Sides vector_sides(const Eigen::MatrixXd& theta, Eigen::MatrixXd* grad_num, Eigen::MatrixXd* grad_den) const;

  SearchConfig config_;
  NormSpec norm_;
  Eigen::Index rows_;
  Eigen::Index cols_;
  Eigen::MatrixXd mask_;
  Eigen::MatrixXd signs_;  ///< n x 2^n, column k = sign pattern k
  mutable std::uint64_t evaluations_ = 0;
};

/// Walsh coefficients (d x 2^n) of f(x) = sum_j x_j v_j.
Eigen::MatrixXd linear_walsh_coefficients(const Eigen::MatrixXd& vectors);

SearchResult estimate_type_constant(SearchConfig config);
SearchResult estimate_cotype_constant(SearchConfig config);
SearchResult estimate_pisier_ratio(SearchConfig config);
SearchResult estimate_enflo_ratio(SearchConfig config);
/// Dispatches on config.objective.
SearchResult run_search(const SearchConfig& config);

nlohmann::json to_json(const SearchConfig& config);
nlohmann::json to_json(const SearchResult& result);
/// Columns: restart, iteration, smoothed_value, step.
void write_trace_csv(const SearchResult& result, std::ostream& out);

}  // namespace hpl
