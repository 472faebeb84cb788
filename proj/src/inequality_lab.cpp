#include "hpl/inequality_lab.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hpl/errors.hpp"
#include "hpl/quadrature.hpp"
#include "hpl/random.hpp"
#include "hpl/summation.hpp"

namespace hpl {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// field[x].col(j) = D_j f(x).
std::vector<MatrixXd> gradient_field(const CubeFunctiond& f) {
  const auto grads = gradient_tables(f);
  std::vector<MatrixXd> field(f.size(), MatrixXd(f.target_dim(), f.dim()));
  for (std::uint32_t x = 0; x < f.size(); ++x)
    for (int j = 0; j < f.dim(); ++j) field[x].col(j) = grads[j].values().col(x);
  return field;
}

// A finite law on coefficient vectors c in R^n: column k has probability weights[k].
struct SignPatterns {
  MatrixXd coefficients;
  std::vector<double> weights;
};

SignPatterns uniform_patterns(int n) {
  const std::uint32_t count = 1u << n;
  SignPatterns out{MatrixXd(n, count), std::vector<double>(count, 1.0 / count)};
  for (std::uint32_t k = 0; k < count; ++k)
    for (int j = 0; j < n; ++j) out.coefficients(j, k) = CubePoint{k}.sign(j);
  return out;
}

SignPatterns biased_patterns(int n, const BiasedCoordinateLaw& law, double scale) {
  const std::uint32_t count = 1u << n;
  SignPatterns out{MatrixXd(n, count), biased_weights<double>(n, law.t)};
  for (std::uint32_t k = 0; k < count; ++k)
    for (int j = 0; j < n; ++j) out.coefficients(j, k) = scale * law.delta(CubePoint{k}.sign(j));
  return out;
}

// Literal enumeration of (xi, xi'): column index xi | (xi' << n).
SignPatterns difference_patterns(int n, const BiasedCoordinateLaw& law) {
  const std::uint32_t size = 1u << n;
  const auto w = biased_weights<double>(n, law.t);
  const double sd = std::sqrt(law.xi_variance());
  SignPatterns out{MatrixXd(n, std::size_t{size} * size), std::vector<double>(std::size_t{size} * size)};
  for (std::uint32_t a = 0; a < size; ++a)
    for (std::uint32_t b = 0; b < size; ++b) {
      const std::size_t k = a | (std::size_t{b} << n);
      out.weights[k] = w[a] * w[b];
      for (int j = 0; j < n; ++j)
        out.coefficients(j, static_cast<Eigen::Index>(k)) = (CubePoint{a}.sign(j) - CubePoint{b}.sign(j)) / sd;
    }
  return out;
}

// Law of eta = (xi - xi') / sd collapsed onto {0, +2/sd, -2/sd}^n.
SignPatterns collapsed_difference_patterns(int n, const BiasedCoordinateLaw& law) {
  const double sd = std::sqrt(law.xi_variance());
  const double p_zero = law.p_plus * law.p_plus + law.p_minus * law.p_minus;
  const double p_jump = law.p_plus * law.p_minus;
  std::size_t count = 1;
  for (int j = 0; j < n; ++j) count *= 3;
  SignPatterns out{MatrixXd(n, static_cast<Eigen::Index>(count)), std::vector<double>(count)};
  for (std::size_t k = 0; k < count; ++k) {
    std::size_t code = k;
    double w = 1.0;
    for (int j = 0; j < n; ++j) {
      const int digit = static_cast<int>(code % 3);
      code /= 3;
      const double value = digit == 0 ? 0.0 : (digit == 1 ? 2.0 / sd : -2.0 / sd);
      out.coefficients(j, static_cast<Eigen::Index>(k)) = value;
      w *= digit == 0 ? p_zero : p_jump;
    }
    out.weights[k] = w;
  }
  return out;
}

// E_eps sum_k w_k phi(sum_j c_jk D_j f(eps)).
template <typename Phi>
double joint_expectation(const std::vector<MatrixXd>& field, const SignPatterns& patterns, Phi&& phi) {
  PairwiseScalarAccumulator<double> outer;
  MatrixXd h;
  for (const auto& m : field) {
    h.noalias() = m * patterns.coefficients;
    PairwiseScalarAccumulator<double> inner;
    for (Eigen::Index k = 0; k < h.cols(); ++k) inner.add(patterns.weights[k] * phi(h.col(k)));
    outer.add(inner.result());
  }
  return outer.result() / static_cast<double>(field.size());
}

template <typename Phi>
double point_expectation(const CubeFunctiond& g, Phi&& phi) {
  PairwiseScalarAccumulator<double> acc;
  for (std::uint32_t x = 0; x < g.size(); ++x) acc.add(phi(g.values().col(x)));
  return acc.result() / static_cast<double>(g.size());
}

void check_moment(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw ParameterError("moment exponent must be finite and >= 1");
}

void check_norm(const CubeFunctiond& f, const NormSpec& spec) {
  detail::require(spec.dim() == f.target_dim(), "norm dimension does not match function target");
}

void check_joint_capacity(const CubeFunctiond& f, const EvalOptions& opts, int cap, const char* what) {
  if (opts.method == Method::exact && f.dim() > cap)
    throw CapacityError(std::string(what) + ": exact mode supports n <= " + std::to_string(cap) +
                        ", got n = " + std::to_string(f.dim()) + "; use Monte Carlo");
}

ReportParams base_params(const CubeFunctiond& f, const EvalOptions& opts) {
  ReportParams params;
  params.n = f.dim();
  params.d = static_cast<long>(f.target_dim());
  params.method = opts.method;
  params.tol_rel = opts.tol_rel;
  params.tol_abs = opts.tol_abs;
  if (opts.method == Method::mc) {
    params.seed = opts.mc.seed;
    params.extra["samples"] = opts.mc.samples;
  }
  return params;
}

// Uniform random point of {-1,1}^n from one 64-bit draw.
CubePoint uniform_point(const CounterRng& rng, std::uint64_t index, int n) {
  return {static_cast<std::uint32_t>(rng.bits(index) & ((std::uint64_t{1} << n) - 1))};
}

VectorXd biased_coefficients(CubePoint xi, const BiasedCoordinateLaw& law, int n, double scale) {
  VectorXd c(n);
  for (int j = 0; j < n; ++j) c(j) = scale * law.delta(xi.sign(j));
  return c;
}

double sum_gradient_moments(const std::vector<CubeFunctiond>& grads, double p, const NormSpec& spec) {
  return pairwise_sum<double>(grads.size(), [&](std::size_t j) {
    return point_expectation(grads[j], [&](const auto& v) { return abs_pow(spec(v), p); });
  });
}

MuQuadrature half_rule(const MuQuadrature& quad) { return make_mu_quadrature(std::max<std::size_t>(1, quad.size() / 2)); }

}  // namespace

double centered_moment(const CubeFunctiond& f, double p, const NormSpec& spec) {
  check_moment(p);
  check_norm(f, spec);
  return point_expectation(centered(f), [&](const auto& v) { return abs_pow(spec(v), p); });
}

InequalityReport pisier_classic_sides(const CubeFunctiond& f, double p, const NormSpec& spec,
                                      const EvalOptions& opts) {
  check_moment(p);
  check_norm(f, spec);
  check_joint_capacity(f, opts, kMaxJointCubeDim, "classical Pisier inequality");
  const int n = f.dim();
  auto phi = [&](const auto& v) { return abs_pow(spec(v), p); };
  const double lhs = centered_moment(f, p, spec);
  const auto field = gradient_field(f);
  double rhs = 0.0;
  double error = 0.0;
  if (opts.method == Method::exact) {
    rhs = joint_expectation(field, uniform_patterns(n), phi);
  } else {
    const CounterRng eps_rng(opts.mc.seed, 11), delta_rng(opts.mc.seed, 12);
    std::vector<double> samples(opts.mc.samples);
    VectorXd c(n);
    for (std::uint64_t s = 0; s < opts.mc.samples; ++s) {
      const CubePoint eps = uniform_point(eps_rng, s, n);
      const CubePoint delta = uniform_point(delta_rng, s, n);
      for (int j = 0; j < n; ++j) c(j) = delta.sign(j);
      samples[s] = phi(field[eps.index] * c);
    }
    const auto st = sample_mean(samples);
    rhs = st.mean;
    error = st.std_error;
  }
  ReportParams params = base_params(f, opts);
  params.p = p;
  params.norm = spec.name();
  auto report = make_report("pisier_classic", lhs, rhs, std::move(params), error);
  report.constant = report.ratio_infinite ? std::numeric_limits<double>::infinity() : std::pow(report.ratio, 1.0 / p);
  return report;
}

namespace {

double main_rhs_exact(const std::vector<MatrixXd>& field, int n, const ConvexGauge& gauge, const MuQuadrature& quad) {
  return pairwise_sum<double>(quad.size(), [&](std::size_t k) {
    const auto patterns = biased_patterns(n, make_law(quad.nodes[k]), kHalfPi);
    return quad.weights[k] * joint_expectation(field, patterns, [&](const auto& v) { return gauge(v); });
  });
}

double lp_rhs_exact(const std::vector<MatrixXd>& field, int n, double p, const NormSpec& spec, const MuQuadrature& quad) {
  return kHalfPi * pairwise_sum<double>(quad.size(), [&](std::size_t k) {
           const auto patterns = biased_patterns(n, make_law(quad.nodes[k]), 1.0);
           const double moment = joint_expectation(field, patterns, [&](const auto& v) { return abs_pow(spec(v), p); });
           return quad.weights[k] * std::pow(moment, 1.0 / p);
         });
}

}  // namespace

InequalityReport dimension_free_main_sides(const CubeFunctiond& f, const ConvexGauge& gauge,
                                           const MuQuadrature& quad, const EvalOptions& opts) {
  detail::require(gauge.dim() == f.target_dim(), "gauge dimension does not match function target");
  check_joint_capacity(f, opts, kMaxJointCubeDim, "dimension-free inequality");
  const int n = f.dim();
  const double lhs = point_expectation(centered(f), [&](const auto& v) { return gauge(v); });
  const auto field = gradient_field(f);
  double rhs = 0.0;
  double error = 0.0;
  ReportParams params = base_params(f, opts);
  if (opts.method == Method::exact) {
    rhs = main_rhs_exact(field, n, gauge, quad);
    if (opts.estimate_quadrature_error && quad.size() >= 2)
      error = std::abs(rhs - main_rhs_exact(field, n, gauge, half_rule(quad)));
  } else {
    std::vector<BiasedCoordinateLaw> laws;
    for (double t : quad.nodes) laws.push_back(make_law(t));
    const CounterRng eps_rng(opts.mc.seed, 21), xi_rng(opts.mc.seed, 22);
    std::vector<double> samples(opts.mc.samples);
    const std::uint64_t m = quad.size();
    for (std::uint64_t s = 0; s < opts.mc.samples; ++s) {
      const CubePoint eps = uniform_point(eps_rng, s, n);
      double y = 0.0;
      for (std::uint64_t k = 0; k < m; ++k) {
        const CubePoint xi = sample_biased_vector(xi_rng, s * m + k, quad.nodes[k], n);
        y += quad.weights[k] * gauge(field[eps.index] * biased_coefficients(xi, laws[k], n, kHalfPi));
      }
      samples[s] = y;
    }
    const auto st = sample_mean(samples);
    rhs = st.mean;
    error = st.std_error;
  }
  params.gauge = gauge.name();
  if (const auto* np = gauge.as_norm_power()) {
    params.p = np->p;
    params.norm = np->norm.name();
  }
  params.quad_nodes = quad.size();
  return make_report("dimension_free_main", lhs, rhs, std::move(params), error);
}

InequalityReport dimension_free_lp_sides(const CubeFunctiond& f, double p, const NormSpec& spec,
                                         const MuQuadrature& quad, const EvalOptions& opts) {
  check_moment(p);
  check_norm(f, spec);
  check_joint_capacity(f, opts, kMaxJointCubeDim, "dimension-free L^p inequality");
  const int n = f.dim();
  const double lhs = std::pow(centered_moment(f, p, spec), 1.0 / p);
  const auto field = gradient_field(f);
  double rhs = 0.0;
  double error = 0.0;
  if (opts.method == Method::exact) {
    rhs = lp_rhs_exact(field, n, p, spec, quad);
    if (opts.estimate_quadrature_error && quad.size() >= 2)
      error = std::abs(rhs - lp_rhs_exact(field, n, p, spec, half_rule(quad)));
  } else {
    // Independent samples per node; the 1/p power is applied to each node mean
    // and its error propagated to first order.
    double variance = 0.0;
    const CounterRng base(opts.mc.seed, 31);
    std::vector<double> samples(opts.mc.samples);
    for (std::size_t k = 0; k < quad.size(); ++k) {
      const auto law = make_law(quad.nodes[k]);
      const CounterRng eps_rng = base.substream(2 * k), xi_rng = base.substream(2 * k + 1);
      for (std::uint64_t s = 0; s < opts.mc.samples; ++s) {
        const CubePoint eps = uniform_point(eps_rng, s, n);
        const CubePoint xi = sample_biased_vector(xi_rng, s, quad.nodes[k], n);
        samples[s] = abs_pow(spec(field[eps.index] * biased_coefficients(xi, law, n, 1.0)), p);
      }
      const auto st = sample_mean(samples);
      const double root = std::pow(st.mean, 1.0 / p);
      rhs += kHalfPi * quad.weights[k] * root;
      const double slope = st.mean > 0 ? kHalfPi * quad.weights[k] * root / (p * st.mean) : 0.0;
      variance += slope * slope * st.std_error * st.std_error;
    }
    error = std::sqrt(variance);
  }
  ReportParams params = base_params(f, opts);
  params.p = p;
  params.norm = spec.name();
  params.quad_nodes = quad.size();
  return make_report("dimension_free_lp", lhs, rhs, std::move(params), error);
}

InequalityReport enflo_sides(const CubeFunctiond& f, double p, const NormSpec& spec, const EvalOptions& opts) {
  check_moment(p);
  check_norm(f, spec);
  auto phi = [&](const auto& v) { return abs_pow(spec(v), p); };
  const int n = f.dim();
  PairwiseScalarAccumulator<double> acc;
  for (std::uint32_t x = 0; x < f.size(); ++x) {
    const CubePoint pt{x};
    acc.add(phi(0.5 * (f(pt) - f(pt.negated(n)))));
  }
  const double lhs = acc.result() / static_cast<double>(f.size());
  const double rhs = sum_gradient_moments(gradient_tables(f), p, spec);
  ReportParams params = base_params(f, opts);
  params.method = Method::exact;
  params.p = p;
  params.norm = spec.name();
  auto report = make_report("enflo", lhs, rhs, std::move(params));
  report.constant = report.ratio_infinite ? std::numeric_limits<double>::infinity() : std::pow(report.ratio, 1.0 / p);
  return report;
}

InequalityReport enflo_vs_rademacher(const CubeFunctiond& f, double p, const NormSpec& spec,
                                     double type_estimate, const EvalOptions& opts) {
  detail::require(type_estimate > 0.0, "type estimate must be positive");
  const auto sides = enflo_sides(f, p, spec, opts);
  ReportParams params = sides.params;
  params.extra["enflo_lhs"] = sides.lhs;
  params.extra["enflo_rhs"] = sides.rhs;
  params.extra["type_estimate"] = type_estimate;
  const double constant = sides.ratio_infinite ? std::numeric_limits<double>::infinity() : *sides.constant;
  auto report = make_report("enflo_vs_rademacher", constant, kEnfloFactor * type_estimate, std::move(params));
  report.constant = constant;
  return report;
}

InequalityReport enflo_domination(const CubeFunctiond& f, double p, const NormSpec& spec, const EvalOptions& opts) {
  const auto sides = enflo_sides(f, p, spec, opts);
  ReportParams params = sides.params;
  return make_report("enflo_domination", sides.lhs, centered_moment(f, p, spec), std::move(params));
}

PointwiseResidual pointwise_identity_residual(const CubeFunctiond& f, const MuQuadrature& quad) {
  const int n = f.dim();
  const Eigen::Index d = f.target_dim();
  const auto field = gradient_field(f);
  CubeFunctiond target = centered(f);

  // mu route: (pi/2) sum_k w_k E[sum_j delta_j(t_k) D_j f(x xi)] with the inner
  // expectation summed over every outcome of xi.
  MatrixXd mu_side = MatrixXd::Zero(d, f.size());
  {
    std::vector<SignPatterns> per_node;
    for (double t : quad.nodes) per_node.push_back(biased_patterns(n, make_law(t), 1.0));
    PairwiseAccumulator<double> inner(d);
    PairwiseAccumulator<double> over_nodes(d);
    for (std::uint32_t x = 0; x < f.size(); ++x) {
      over_nodes.reset();
      for (std::size_t k = 0; k < quad.size(); ++k) {
        inner.reset();
        const auto& pat = per_node[k];
        for (std::uint32_t y = 0; y < f.size(); ++y)
          inner.add_scaled(pat.weights[y], field[x ^ y] * pat.coefficients.col(y));
        over_nodes.add_scaled(kHalfPi * quad.weights[k], inner.result());
      }
      mu_side.col(x) = over_nodes.result();
    }
  }

  // Heat-flow route: substitute u = e^{-t}, dt = du / u, and integrate
  // u -> sum_j D_j P_{-ln u} D_j f / u by Gauss-Legendre on (0, 1).
  MatrixXd flow_side = MatrixXd::Zero(d, f.size());
  {
    const auto grads = gradient_tables(f);
    const QuadratureRule rule = gauss_legendre(quad.size(), 0.0, 1.0);
    for (std::size_t k = 0; k < rule.size(); ++k) {
      const double u = rule.nodes[k];
      const double t = -std::log(u);
      for (int j = 0; j < n; ++j)
        flow_side += (rule.weights[k] / u) * discrete_derivative(heat_semigroup(grads[j], t), j).values();
    }
  }

  PointwiseResidual out;
  out.mu_route = (target.values() - mu_side).colwise().norm().maxCoeff();
  out.semigroup_route = (target.values() - flow_side).colwise().norm().maxCoeff();
  return out;
}

bool SymmetrizationChain::satisfied() const {
  for (const auto& link : links)
    if (!link.satisfied) return false;
  return true;
}

SymmetrizationChain symmetrization_chain_check(const CubeFunctiond& f, double p, const NormSpec& spec, double t,
                                               std::optional<double> type_constant, const EvalOptions& opts) {
  check_moment(p);
  detail::require(p <= 2.0, "symmetrization chain is stated for p in [1, 2]");
  check_norm(f, spec);
  constexpr int kExactCap = 6;
  check_joint_capacity(f, opts, kExactCap, "symmetrization chain");
  const int n = f.dim();
  const auto law = make_law(t);
  const auto field = gradient_field(f);
  const auto grads = gradient_tables(f);
  auto phi = [&](const auto& v) { return abs_pow(spec(v), p); };
  const double gradient_moments = sum_gradient_moments(grads, p, spec);
  const double eta_moment = difference_abs_moment(t, p);

  ReportParams params = base_params(f, opts);
  params.p = p;
  params.norm = spec.name();
  params.t_grid = {t};

  SymmetrizationChain chain;
  double biased = 0.0;
  double difference = 0.0;
  double jensen_error = 0.0;
  if (opts.method == Method::exact) {
    biased = joint_expectation(field, biased_patterns(n, law, 1.0), phi);
    difference = joint_expectation(field, difference_patterns(n, law), phi);

    // Symmetrized sum and the largest conditional Rademacher ratio.
    const auto eta = collapsed_difference_patterns(n, law);
    const auto signs = uniform_patterns(n);
    double t_emp_pow = 0.0;
    PairwiseScalarAccumulator<double> outer;
    MatrixXd y(f.target_dim(), n);
    MatrixXd sums;
    for (const auto& m : field) {
      PairwiseScalarAccumulator<double> over_eta;
      for (Eigen::Index k = 0; k < eta.coefficients.cols(); ++k) {
        y = m * eta.coefficients.col(k).asDiagonal();
        sums.noalias() = y * signs.coefficients;
        PairwiseScalarAccumulator<double> over_signs;
        for (Eigen::Index s = 0; s < sums.cols(); ++s) over_signs.add(phi(sums.col(s)));
        const double conditional = over_signs.result() / static_cast<double>(sums.cols());
        double denom = 0.0;
        for (int j = 0; j < n; ++j) denom += phi(y.col(j));
        if (denom > 0.0) t_emp_pow = std::max(t_emp_pow, conditional / denom);
        over_eta.add(eta.weights[k] * conditional);
      }
      outer.add(over_eta.result());
    }
    const double symmetrized = outer.result() / static_cast<double>(field.size());
    chain.distribution_gap = std::abs(difference - symmetrized);
    chain.empirical_type_constant = std::pow(t_emp_pow, 1.0 / p);

    const double type_bound = t_emp_pow * eta_moment * gradient_moments;
    ReportParams type_params = params;
    type_params.extra["empirical_type_constant"] = *chain.empirical_type_constant;
    type_params.extra["distribution_gap"] = *chain.distribution_gap;
    chain.links.push_back(
        make_report("symmetrization_jensen", biased, difference, params));
    chain.links.push_back(make_report("symmetrization_type", symmetrized, type_bound, type_params));
    ReportParams moment_params = params;
    moment_params.extra["eta_abs_moment"] = eta_moment;
    chain.links.push_back(make_report("symmetrization_moment", type_bound,
                                      std::pow(2.0, 0.5 * p) * t_emp_pow * gradient_moments, moment_params));
    ReportParams gap_params = params;
    chain.links.push_back(make_report("symmetrization_distribution", *chain.distribution_gap,
                                      opts.tol_rel * std::max(1.0, std::abs(difference)), gap_params));
  } else {
    const CounterRng eps_rng(opts.mc.seed, 41), xi_rng(opts.mc.seed, 42), xi2_rng(opts.mc.seed, 43);
    const double sd = std::sqrt(law.xi_variance());
    std::vector<double> a(opts.mc.samples), b(opts.mc.samples), gap(opts.mc.samples);
    VectorXd c(n), e(n);
    for (std::uint64_t s = 0; s < opts.mc.samples; ++s) {
      const CubePoint eps = uniform_point(eps_rng, s, n);
      const CubePoint xi = sample_biased_vector(xi_rng, s, t, n);
      const CubePoint xi2 = sample_biased_vector(xi2_rng, s, t, n);
      for (int j = 0; j < n; ++j) {
        c(j) = law.delta(xi.sign(j));
        e(j) = (xi.sign(j) - xi2.sign(j)) / sd;
      }
      a[s] = phi(field[eps.index] * c);
      b[s] = phi(field[eps.index] * e);
      gap[s] = a[s] - b[s];
    }
    biased = sample_mean(a).mean;
    difference = sample_mean(b).mean;
    jensen_error = sample_mean(gap).std_error;
    chain.links.push_back(make_report("symmetrization_jensen", biased, difference, params, jensen_error));
  }

  if (type_constant) {
    ReportParams known = params;
    known.extra["type_constant"] = *type_constant;
    const double bound = std::pow(2.0, 0.5 * p) * std::pow(*type_constant, p) * gradient_moments;
    double error = 0.0;
    if (opts.method == Method::mc) error = jensen_error;
    chain.links.push_back(make_report("symmetrization_known_type", difference, bound, known, error));
  }
  return chain;
}

ContractionReport contraction_check(const MatrixXd& vectors, double p, double q_cotype, const NormSpec& spec, double t) {
  check_moment(p);
  detail::require(q_cotype >= 2.0, "cotype exponent must be >= 2");
  detail::require(vectors.rows() == spec.dim(), "vector dimension does not match norm");
  const auto n = static_cast<int>(vectors.cols());
  constexpr int kCap = 10;
  if (n < 1 || n > kCap) throw CapacityError("contraction check enumerates 4^n outcomes; need 1 <= n <= 10");
  const auto law = make_law(t);
  const auto patterns = difference_patterns(n, law);
  MatrixXd sums = vectors * patterns.coefficients;
  PairwiseScalarAccumulator<double> acc;
  for (Eigen::Index k = 0; k < sums.cols(); ++k) acc.add(patterns.weights[k] * abs_pow(spec(sums.col(k)), p));

  ContractionReport out;
  out.biased_moment = acc.result();
  out.uniform_moment = rademacher_moment({p, vectors, spec}).value;
  out.ratio = out.uniform_moment > 0 ? std::pow(out.biased_moment / out.uniform_moment, 1.0 / p) : 0.0;
  const double r = std::max(q_cotype, p);
  const double sd = std::sqrt(law.xi_variance());
  out.tail_factor = tail_integral(t, r) / sd;
  out.tail_factor_direct = tail_integral_direct(t, r) / sd;
  out.tail_factor_matches = std::abs(out.tail_factor - out.tail_factor_direct) <= 1e-14 * std::max(1.0, out.tail_factor);
  out.empirical_constant = out.ratio / out.tail_factor;
  out.params.n = n;
  out.params.d = static_cast<long>(vectors.rows());
  out.params.p = p;
  out.params.norm = spec.name();
  out.params.t_grid = {t};
  out.params.extra["q_cotype"] = q_cotype;
  return out;
}

nlohmann::json to_json(const ContractionReport& r) {
  return {{"name", "contraction"},
          {"biased_moment", r.biased_moment},
          {"uniform_moment", r.uniform_moment},
          {"ratio", r.ratio},
          {"tail_factor", r.tail_factor},
          {"tail_factor_direct", r.tail_factor_direct},
          {"empirical_constant", r.empirical_constant},
          {"satisfied", r.tail_factor_matches},
          {"params", {{"n", r.params.n}, {"d", r.params.d}, {"p", r.params.p.value_or(0.0)},
                      {"norm", r.params.norm}, {"t_grid", r.params.t_grid},
                      {"q_cotype", r.params.extra.value("q_cotype", 0.0)}}}};
}

nlohmann::json to_json(const SymmetrizationChain& chain) {
  nlohmann::json links = nlohmann::json::array();
  for (const auto& link : chain.links) links.push_back(to_json(link));
  nlohmann::json out = {{"name", "symmetrization_chain"}, {"satisfied", chain.satisfied()}, {"links", links}};
  if (chain.distribution_gap) out["distribution_gap"] = *chain.distribution_gap;
  if (chain.empirical_type_constant) out["empirical_type_constant"] = *chain.empirical_type_constant;
  return out;
}

}  // namespace hpl
