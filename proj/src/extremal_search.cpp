#include "hpl/extremal_search.hpp"

#include <cmath>
#include <limits>

#include "hpl/cube.hpp"
#include "hpl/errors.hpp"
#include "hpl/inequality_lab.hpp"
#include "hpl/parallel.hpp"
#include "hpl/random.hpp"

namespace hpl {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kMinStep = 1e-10;

bool is_walsh(Objective objective) {
  return objective == Objective::pisier_ratio || objective == Objective::enflo_ratio;
}

// phi(v) = ||v||^p and its gradient.
struct NormPower {
  const NormSpec& norm;
  double p;

  double value(const VectorXd& v) const { return abs_pow(norm(v), p); }
  double value_and_gradient(const VectorXd& v, Eigen::Ref<VectorXd> grad) const {
    const double r = norm(v);
    if (r == 0.0) {
      grad.setZero();
      return 0.0;
    }
    grad = (p * abs_pow(r, p - 1.0)) * norm.gradient(v);
    return abs_pow(r, p);
  }
};

void validate(const SearchConfig& c) {
  detail::require(c.restarts >= 1, "restarts must be >= 1");
  detail::require(c.max_iters >= 0 && c.polish_iters >= 0, "iteration counts must be >= 0");
  detail::require(c.step > 0.0 && std::isfinite(c.step), "step must be positive");
  detail::require(std::isfinite(c.smoothing) && c.smoothing > 1.0, "smoothing exponent must be finite and > 1");
  if (!(c.exponent >= 1.0) || !std::isfinite(c.exponent)) throw ParameterError("exponent must be finite and >= 1");
  if (c.n < 1) throw ParameterError("n must be >= 1");
  switch (c.objective) {
    case Objective::type_const:
    case Objective::cotype_const:
      if (c.n > kMaxRademacherTerms) throw CapacityError("type/cotype search needs n <= 20");
      break;
    case Objective::pisier_ratio:
      if (c.n > kMaxJointCubeDim) throw CapacityError("Pisier search needs n <= 12");
      break;
    case Objective::enflo_ratio:
      detail::check_cube_dim(c.n, kMaxCubeDim);
      break;
  }
  if (c.degree_cap) detail::require(*c.degree_cap >= 1, "degree cap must be >= 1");
}

MatrixXd basis_configuration(Eigen::Index d, int n) {
  MatrixXd x = MatrixXd::Zero(d, n);
  for (int j = 0; j < n; ++j) x(j % d, j) = 1.0;
  return x;
}

}  // namespace

std::string to_string(Objective objective) {
  switch (objective) {
    case Objective::type_const: return "type";
    case Objective::cotype_const: return "cotype";
    case Objective::pisier_ratio: return "pisier";
    case Objective::enflo_ratio: return "enflo";
  }
  return "unknown";
}

Objective parse_objective(const std::string& text) {
  if (text == "type") return Objective::type_const;
  if (text == "cotype") return Objective::cotype_const;
  if (text == "pisier") return Objective::pisier_ratio;
  if (text == "enflo") return Objective::enflo_ratio;
  throw ParameterError("unknown objective '" + text + "' (expected type, cotype, pisier, enflo)");
}

MatrixXd linear_walsh_coefficients(const MatrixXd& vectors) {
  const auto n = static_cast<int>(vectors.cols());
  detail::check_cube_dim(n);
  MatrixXd theta = MatrixXd::Zero(vectors.rows(), Eigen::Index{1} << n);
  for (int j = 0; j < n; ++j) theta.col(Eigen::Index{1} << j) = vectors.col(j);
  return theta;
}

SearchObjective::SearchObjective(const SearchConfig& config, bool smoothed)
    : config_(config),
      norm_(smoothed ? config.norm.smoothed(config.smoothing) : config.norm),
      rows_(config.norm.dim()),
      cols_(is_walsh(config.objective) ? (Eigen::Index{1} << config.n) : config.n) {
  validate(config);
  mask_ = MatrixXd::Ones(rows_, cols_);
  if (is_walsh(config.objective)) {
    for (Eigen::Index s = 0; s < cols_; ++s) {
      const auto subset = static_cast<std::uint32_t>(s);
      if (subset == 0 || (config.degree_cap && popcount(subset) > *config.degree_cap)) mask_.col(s).setZero();
    }
  }
  const bool needs_signs = config.objective != Objective::enflo_ratio;
  if (needs_signs) {
    const std::uint32_t count = 1u << config.n;
    signs_.resize(config.n, count);
    for (std::uint32_t k = 0; k < count; ++k)
      for (int j = 0; j < config.n; ++j) signs_(j, k) = CubePoint{k}.sign(j);
  }
}

SearchObjective::Sides SearchObjective::vector_sides(const MatrixXd& x, MatrixXd* grad_num,
                                                     MatrixXd* grad_den) const {
  // A = E||sum eps_j x_j||^q, B = sum_j ||x_j||^q.
  const NormPower phi{norm_, config_.exponent};
  const bool grads = grad_num != nullptr;
  const MatrixXd sums = x * signs_;
  const auto count = static_cast<double>(sums.cols());
  MatrixXd g(x.rows(), sums.cols());
  double a = 0.0;
  for (Eigen::Index k = 0; k < sums.cols(); ++k)
    a += grads ? phi.value_and_gradient(sums.col(k), g.col(k)) : phi.value(sums.col(k));
  a /= count;
  MatrixXd grad_a, grad_b(x.rows(), x.cols());
  if (grads) grad_a = (g * signs_.transpose()) / count;
  double b = 0.0;
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    b += grads ? phi.value_and_gradient(x.col(j), grad_b.col(j)) : phi.value(x.col(j));

  if (config_.objective == Objective::type_const) {
    if (grads) {
      *grad_num = std::move(grad_a);
      *grad_den = std::move(grad_b);
    }
    return {a, b};
  }
  if (grads) {
    *grad_num = std::move(grad_b);
    *grad_den = std::move(grad_a);
  }
  return {b, a};
}

SearchObjective::Sides SearchObjective::walsh_sides(const MatrixXd& theta, MatrixXd* grad_num,
                                                    MatrixXd* grad_den) const {
  const int n = config_.n;
  const NormPower phi{norm_, config_.exponent};
  const bool grads = grad_num != nullptr;
  const Eigen::Index d = rows_;
  const std::uint32_t size = 1u << n;
  const double inv = 1.0 / static_cast<double>(size);
  const std::uint32_t all = size - 1;

  MatrixXd values = theta.cwiseProduct(mask_);
  detail::walsh_butterfly(values, n, false);

  MatrixXd dv_num = MatrixXd::Zero(d, size);
  MatrixXd dv_den = MatrixXd::Zero(d, size);
  VectorXd g(d);
  double num = 0.0;
  double den = 0.0;

  if (config_.objective == Objective::enflo_ratio) {
    for (std::uint32_t x = 0; x < size; ++x) {
      const VectorXd odd = 0.5 * (values.col(x) - values.col(x ^ all));
      num += grads ? phi.value_and_gradient(odd, g) : phi.value(odd);
      if (grads) {
        dv_num.col(x) += 0.5 * inv * g;
        dv_num.col(x ^ all) -= 0.5 * inv * g;
      }
      for (int j = 0; j < n; ++j) {
        const std::uint32_t y = x ^ (1u << j);
        const VectorXd dj = 0.5 * (values.col(x) - values.col(y));
        den += grads ? phi.value_and_gradient(dj, g) : phi.value(dj);
        if (grads) {
          dv_den.col(x) += 0.5 * inv * g;
          dv_den.col(y) -= 0.5 * inv * g;
        }
      }
    }
  } else {
    MatrixXd m(d, n), h, gh(d, size);
    for (std::uint32_t x = 0; x < size; ++x) {
      num += grads ? phi.value_and_gradient(values.col(x), g) : phi.value(values.col(x));
      if (grads) dv_num.col(x) += inv * g;
      for (int j = 0; j < n; ++j) m.col(j) = 0.5 * (values.col(x) - values.col(x ^ (1u << j)));
      h.noalias() = m * signs_;
      double inner = 0.0;
      for (Eigen::Index k = 0; k < h.cols(); ++k)
        inner += grads ? phi.value_and_gradient(h.col(k), gh.col(k)) : phi.value(h.col(k));
      den += inner * inv;
      if (grads) {
        // Column j of hj is E_delta[grad phi * delta_j], which flows back through D_j.
        const MatrixXd hj = (gh * signs_.transpose()) * inv;
        for (int j = 0; j < n; ++j) {
          dv_den.col(x) += 0.5 * inv * hj.col(j);
          dv_den.col(x ^ (1u << j)) -= 0.5 * inv * hj.col(j);
        }
      }
    }
  }
  num *= inv;
  den *= inv;
  if (grads) {
    // d/dtheta(S) = sum_x d/dV(x) w_S(x), the Walsh transform without normalization.
    detail::walsh_butterfly(dv_num, n, false);
    detail::walsh_butterfly(dv_den, n, false);
    *grad_num = dv_num.cwiseProduct(mask_);
    *grad_den = dv_den.cwiseProduct(mask_);
  }
  return {num, den};
}

SearchObjective::Sides SearchObjective::sides(const MatrixXd& theta, MatrixXd* grad_num, MatrixXd* grad_den) const {
  detail::require(theta.rows() == rows_ && theta.cols() == cols_, "parameter has the wrong shape");
  ++evaluations_;
  return is_walsh(config_.objective) ? walsh_sides(theta, grad_num, grad_den) : vector_sides(theta, grad_num, grad_den);
}

double SearchObjective::log_ratio(const MatrixXd& theta, MatrixXd* gradient) const {
  MatrixXd grad_num, grad_den;
  const Sides s = gradient ? sides(theta, &grad_num, &grad_den) : sides(theta, nullptr, nullptr);
  if (s.numerator <= 0.0 || s.denominator <= 0.0) {
    if (gradient) gradient->setZero(rows_, cols_);
    return -std::numeric_limits<double>::infinity();
  }
  if (gradient) *gradient = (grad_num / s.numerator - grad_den / s.denominator) / config_.exponent;
  return (std::log(s.numerator) - std::log(s.denominator)) / config_.exponent;
}

double SearchObjective::exact_value(const MatrixXd& theta) const {
  const double p = config_.exponent;
  switch (config_.objective) {
    case Objective::type_const: return type_ratio(theta, p, config_.norm);
    case Objective::cotype_const: return cotype_ratio(theta, p, config_.norm);
    case Objective::pisier_ratio:
    case Objective::enflo_ratio: {
      const CubeFunctiond f = inverse_walsh_transform(WalshSpectrumd(config_.n, theta.cwiseProduct(mask_)));
      const auto report = config_.objective == Objective::pisier_ratio ? pisier_classic_sides(f, p, config_.norm)
                                                                       : enflo_sides(f, p, config_.norm);
      return report.ratio_infinite ? std::numeric_limits<double>::infinity() : *report.constant;
    }
  }
  return 0.0;
}

double SearchObjective::normalize(MatrixXd& theta) const {
  const Sides s = sides(theta, nullptr, nullptr);
  detail::require(s.denominator > 0.0, "cannot normalize a point with vanishing denominator");
  const double scale = std::pow(s.denominator, -1.0 / config_.exponent);
  theta *= scale;
  return scale;
}

namespace {

struct AscentOutcome {
  MatrixXd theta;
  int steps = 0;
};

// Ascent on the log-ratio with the denominator renormalized to 1 after each
// accepted step. Records exp(value) and step lengths when trace pointers are given.
AscentOutcome ascend(const SearchObjective& objective, MatrixXd theta, const SearchConfig& config, int max_iters,
                     std::vector<double>* values, std::vector<double>* steps) {
  MatrixXd grad, cand, cand_grad;
  objective.normalize(theta);
  double value = objective.log_ratio(theta, &grad);
  if (values) values->push_back(std::exp(value));
  AscentOutcome out;
  for (int it = 0; it < max_iters && std::isfinite(value); ++it) {
    const double gnorm = grad.norm();
    if (!(gnorm > 0.0) || !std::isfinite(gnorm)) break;
    const MatrixXd direction = grad * (theta.norm() / gnorm);
    double eta = config.step;
    bool accepted = false;
    while (eta >= kMinStep) {
      cand = (theta + eta * direction).cwiseProduct(objective.mask());
      const double cand_value = objective.log_ratio(cand, &cand_grad);
      if (cand_value > value) {
        const double scale = objective.normalize(cand);
        theta = cand;
        grad = cand_grad / scale;
        const double gain = cand_value - value;
        value = cand_value;
        accepted = gain > 1e-15 * std::max(1.0, std::abs(value));
        break;
      }
      if (config.step_rule == StepRule::fixed) break;
      eta *= 0.5;
    }
    if (!accepted) break;
    ++out.steps;
    if (values) values->push_back(std::exp(value));
    if (steps) steps->push_back(eta);
  }
  out.theta = std::move(theta);
  return out;
}

MatrixXd starting_point(const SearchConfig& config, const SearchObjective& objective, int restart) {
  const Eigen::Index d = config.norm.dim();
  if (restart == 0) {
    if (config.initial) {
      const MatrixXd& init = *config.initial;
      if (init.rows() == objective.rows() && init.cols() == objective.cols()) return init;
      if (is_walsh(config.objective) && init.rows() == d && init.cols() == config.n)
        return linear_walsh_coefficients(init);
      throw ParameterError("initial point has the wrong shape");
    }
    const MatrixXd basis = basis_configuration(d, config.n);
    return is_walsh(config.objective) ? linear_walsh_coefficients(basis) : basis;
  }
  RngCursor rng(CounterRng(config.seed, 0x73656172).substream(static_cast<std::uint64_t>(restart)));
  MatrixXd theta(objective.rows(), objective.cols());
  for (Eigen::Index s = 0; s < theta.cols(); ++s)
    for (Eigen::Index i = 0; i < theta.rows(); ++i) theta(i, s) = rng.normal();
  theta = theta.cwiseProduct(objective.mask());
  return theta;
}

struct RestartOutcome {
  RestartTrace trace;
  MatrixXd argument;
  double exact = 0.0;
  double smoothed = 0.0;
};

RestartOutcome run_restart(const SearchConfig& config, int restart) {
  const SearchObjective smooth(config, true);
  const SearchObjective exact(config, false);
  RestartOutcome out;
  out.trace.restart = restart;

  MatrixXd start = starting_point(config, smooth, restart);
  exact.normalize(start);
  out.trace.initial_exact = exact.exact_value(start);

  auto phase1 = ascend(smooth, start, config, config.max_iters, &out.trace.smoothed_values, &out.trace.steps);
  out.trace.iterations = phase1.steps;
  MatrixXd final_point = std::move(phase1.theta);
  if (config.polish_iters > 0) {
    auto phase2 = ascend(exact, final_point, config, config.polish_iters, nullptr, nullptr);
    out.trace.polish_steps = phase2.steps;
    final_point = std::move(phase2.theta);
  }
  exact.normalize(final_point);
  out.trace.final_exact = exact.exact_value(final_point);
  out.trace.final_smoothed = std::exp(smooth.log_ratio(final_point));

  if (out.trace.final_exact >= out.trace.initial_exact) {
    out.argument = std::move(final_point);
    out.exact = out.trace.final_exact;
    out.smoothed = out.trace.final_smoothed;
  } else {
    out.argument = std::move(start);
    out.exact = out.trace.initial_exact;
    out.smoothed = std::exp(smooth.log_ratio(out.argument));
  }
  out.trace.evaluations = smooth.evaluations() + exact.evaluations();
  return out;
}

SearchResult search(const SearchConfig& config) {
  validate(config);
  std::vector<RestartOutcome> outcomes(static_cast<std::size_t>(config.restarts));
  parallel_for(outcomes.size(), [&](std::size_t r) { outcomes[r] = run_restart(config, static_cast<int>(r)); });

  SearchResult result;
  result.objective = config.objective;
  std::size_t best = 0;
  for (std::size_t r = 0; r < outcomes.size(); ++r) {
    if (outcomes[r].exact > outcomes[best].exact) best = r;
    result.evaluations += outcomes[r].trace.evaluations;
  }
  result.best_value = outcomes[best].exact;
  result.best_smoothed = outcomes[best].smoothed;
  result.argument = outcomes[best].argument;
  result.best_restart = static_cast<int>(best);
  for (auto& o : outcomes) result.traces.push_back(std::move(o.trace));
  return result;
}

SearchResult search_as(SearchConfig config, Objective objective) {
  config.objective = objective;
  return search(config);
}

}  // namespace

SearchResult estimate_type_constant(SearchConfig config) { return search_as(std::move(config), Objective::type_const); }
SearchResult estimate_cotype_constant(SearchConfig config) {
  return search_as(std::move(config), Objective::cotype_const);
}
SearchResult estimate_pisier_ratio(SearchConfig config) { return search_as(std::move(config), Objective::pisier_ratio); }
SearchResult estimate_enflo_ratio(SearchConfig config) { return search_as(std::move(config), Objective::enflo_ratio); }
SearchResult run_search(const SearchConfig& config) { return search(config); }

nlohmann::json to_json(const SearchConfig& c) {
  nlohmann::json out = {{"objective", to_string(c.objective)},
                        {"exponent", c.exponent},
                        {"norm", c.norm.name()},
                        {"d", c.norm.dim()},
                        {"n", c.n},
                        {"restarts", c.restarts},
                        {"max_iters", c.max_iters},
                        {"polish_iters", c.polish_iters},
                        {"step_rule", c.step_rule == StepRule::fixed ? "fixed" : "backtracking"},
                        {"step", c.step},
                        {"seed", c.seed},
                        {"smoothing", c.smoothing}};
  out["degree_cap"] = c.degree_cap ? nlohmann::json(*c.degree_cap) : nlohmann::json(nullptr);
  out["initial"] = c.initial.has_value();
  return out;
}

nlohmann::json to_json(const SearchResult& r) {
  nlohmann::json argument = nlohmann::json::array();
  for (Eigen::Index s = 0; s < r.argument.cols(); ++s) {
    nlohmann::json column = nlohmann::json::array();
    for (Eigen::Index i = 0; i < r.argument.rows(); ++i) column.push_back(r.argument(i, s));
    argument.push_back(std::move(column));
  }
  nlohmann::json restarts = nlohmann::json::array();
  for (const auto& t : r.traces)
    restarts.push_back({{"restart", t.restart},
                        {"initial_exact", t.initial_exact},
                        {"final_exact", t.final_exact},
                        {"final_smoothed", t.final_smoothed},
                        {"iterations", t.iterations},
                        {"polish_steps", t.polish_steps},
                        {"evaluations", t.evaluations}});
  return {{"name", "search_" + to_string(r.objective)},
          {"best_value", r.best_value},
          {"best_smoothed", r.best_smoothed},
          {"best_restart", r.best_restart},
          {"evaluations", r.evaluations},
          {"argument", std::move(argument)},
          {"restarts", std::move(restarts)}};
}

void write_trace_csv(const SearchResult& result, std::ostream& out) {
  out << "restart,iteration,smoothed_value,step\n";
  const auto old_precision = out.precision(17);
  for (const auto& t : result.traces)
    for (std::size_t i = 0; i < t.smoothed_values.size(); ++i) {
      out << t.restart << ',' << i << ',' << t.smoothed_values[i] << ',';
      if (i > 0) out << t.steps[i - 1];
      out << '\n';
    }
  out.precision(old_precision);
}

}  // namespace hpl
