#include "hpl/suites.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "hpl/biased_measure.hpp"
#include "hpl/cube.hpp"
#include "hpl/errors.hpp"
#include "hpl/fuzz.hpp"
#include "hpl/inequality_lab.hpp"
#include "hpl/parallel.hpp"
#include "hpl/quadrature.hpp"

namespace hpl {
namespace {

struct InstanceOutput {
  std::vector<nlohmann::json> records;
  std::uint64_t checks = 0;
  std::uint64_t violations = 0;
  double max_ratio = 0.0;

  void add(const InequalityReport& report) {
    records.push_back(to_json(report));
    count(report.satisfied, report.ratio_infinite || !(report.rhs > 0.0) ? 0.0 : report.ratio);
  }
  void count(bool satisfied, double ratio) {
    ++checks;
    if (!satisfied) ++violations;
    if (std::isfinite(ratio)) max_ratio = std::max(max_ratio, ratio);
  }
};

template <typename Body>
SuiteOutcome run_instances(const std::string& name, std::uint64_t trials, Body&& body) {
  std::vector<InstanceOutput> outputs(trials);
  parallel_for(trials, [&](std::size_t i) { body(static_cast<std::uint64_t>(i), outputs[i]); });
  SuiteOutcome outcome;
  outcome.suite = name;
  for (auto& out : outputs) {
    outcome.checks += out.checks;
    outcome.violations += out.violations;
    outcome.max_ratio = std::max(outcome.max_ratio, out.max_ratio);
    for (auto& r : out.records) outcome.records.push_back(std::move(r));
  }
  return outcome;
}

void merge(SuiteOutcome& into, InstanceOutput&& extra) {
  into.checks += extra.checks;
  into.violations += extra.violations;
  into.max_ratio = std::max(into.max_ratio, extra.max_ratio);
  for (auto& r : extra.records) into.records.push_back(std::move(r));
}

EvalOptions eval_options(const SuiteConfig& c, std::uint64_t instance) {
  EvalOptions opts;
  opts.method = c.mc ? Method::mc : Method::exact;
  opts.mc.samples = c.mc_samples;
  opts.mc.seed = c.seed * 1000003ULL + instance;
  opts.tol_rel = c.tol_rel;
  opts.tol_abs = c.tol_abs;
  return opts;
}

FuzzCorpusConfig corpus(const SuiteConfig& c, double p_lo, double p_hi) {
  FuzzCorpusConfig fc;
  fc.n_min = c.n_min;
  fc.n_max = c.n_max;
  fc.d_min = c.d_min;
  fc.d_max = c.d_max;
  fc.p_min = c.p ? *c.p : p_lo;
  fc.p_max = c.p ? *c.p : p_hi;
  fc.norms = c.norms;
  fc.seed = c.seed;
  return fc;
}

void annotate(InequalityReport& report, const FuzzInstance& inst) {
  report.params.extra["instance"] = inst.index;
  report.params.extra["generator"] = to_json(inst.function_spec);
}

ReportParams plain_params(const SuiteConfig& c) {
  ReportParams params;
  params.tol_rel = 0.0;
  params.tol_abs = 0.0;
  params.seed = c.seed;
  return params;
}

void validate(const SuiteConfig& c) {
  if (c.n_min < 1 || c.n_min > c.n_max) throw ParameterError("invalid n range");
  if (c.d_min < 1 || c.d_min > c.d_max) throw ParameterError("invalid d range");
  if (c.trials < 1) throw ParameterError("trials must be >= 1");
  if (c.quad_nodes < 1) throw ParameterError("quad-nodes must be >= 1");
  if (c.norms.empty()) throw ParameterError("norm list is empty");
  for (const auto& name : c.norms) NormSpec::parse(name, 1);
  if (c.p && !(*c.p >= 1.0)) throw ParameterError("p must be >= 1");
}

SuiteOutcome probrep_suite(const SuiteConfig& c) {
  const std::vector<double> times{0.1, 1.0, 3.0};
  return run_instances("probrep", c.trials, [&](std::uint64_t i, InstanceOutput& out) {
    RngCursor rng(CounterRng(c.seed, 0x70726f62).substream(i));
    RandomFunctionSpec spec;
    spec.n = uniform_int(rng, c.n_min, c.n_max);
    spec.d = uniform_int(rng, static_cast<int>(c.d_min), static_cast<int>(c.d_max));
    const CubeFunctiond f = random_cube_function(spec, rng);
    double semigroup_gap = 0.0;
    double gradient_gap = 0.0;
    for (double t : times) {
      const CubeFunctiond heat = heat_semigroup(f, t);
      semigroup_gap = std::max(semigroup_gap, (kernel_semigroup(f, t).values() - heat.values()).cwiseAbs().maxCoeff());
      for (int j = 0; j < f.dim(); ++j)
        gradient_gap = std::max(gradient_gap, (kernel_gradient(f, j, t).values() -
                                               discrete_derivative(heat, j).values()).cwiseAbs().maxCoeff());
    }
    ReportParams params = plain_params(c);
    params.n = spec.n;
    params.d = static_cast<long>(spec.d);
    params.t_grid = times;
    params.extra["instance"] = i;
    params.extra["generator"] = to_json(spec);
    params.extra["semigroup_gap"] = semigroup_gap;
    params.extra["gradient_gap"] = gradient_gap;
    out.add(make_report("probrep", std::max(semigroup_gap, gradient_gap), 1e-12, std::move(params)));
  });
}

SuiteOutcome pointwise_suite(const SuiteConfig& c) {
  const MuQuadrature quad = make_mu_quadrature(c.quad_nodes);
  return run_instances("pointwise", c.trials, [&](std::uint64_t i, InstanceOutput& out) {
    RngCursor rng(CounterRng(c.seed, 0x706f696e).substream(i));
    RandomFunctionSpec spec;
    spec.n = uniform_int(rng, c.n_min, c.n_max);
    spec.d = uniform_int(rng, static_cast<int>(c.d_min), static_cast<int>(c.d_max));
    const CubeFunctiond f = random_cube_function(spec, rng);
    const auto residual = pointwise_identity_residual(f, quad);
    ReportParams params = plain_params(c);
    params.n = spec.n;
    params.d = static_cast<long>(spec.d);
    params.quad_nodes = quad.size();
    params.extra["instance"] = i;
    params.extra["generator"] = to_json(spec);
    params.extra["mu_route"] = residual.mu_route;
    params.extra["semigroup_route"] = residual.semigroup_route;
    out.add(make_report("pointwise_identity", residual.max(), 1e-7, std::move(params)));
  });
}

SuiteOutcome main_suite(const SuiteConfig& c, bool lp) {
  const MuQuadrature quad = make_mu_quadrature(c.quad_nodes);
  const FuzzCorpusConfig fc = corpus(c, 1.0, 3.0);
  return run_instances(lp ? "lp" : "main", c.trials, [&](std::uint64_t i, InstanceOutput& out) {
    const FuzzInstance inst = make_fuzz_instance(fc, i);
    auto report = lp ? dimension_free_lp_sides(inst.f, inst.p, inst.norm, quad, eval_options(c, i))
                     : dimension_free_main_sides(inst.f, inst.gauge, quad, eval_options(c, i));
    annotate(report, inst);
    out.add(report);
  });
}

SuiteOutcome enflo_suite(const SuiteConfig& c) {
  if (c.p && *c.p > 2.0) throw ParameterError("Enflo suite needs p in [1, 2]");
  const FuzzCorpusConfig fc = corpus(c, 1.0, 2.0);
  return run_instances("enflo", c.trials, [&](std::uint64_t i, InstanceOutput& out) {
    const FuzzInstance inst = make_fuzz_instance(fc, i);
    const EvalOptions opts = eval_options(c, i);
    auto domination = enflo_domination(inst.f, inst.p, inst.norm, opts);
    annotate(domination, inst);
    out.add(domination);
    const double bound = type_constant_upper_bound(inst.norm, inst.p);
    auto versus = enflo_vs_rademacher(inst.f, inst.p, inst.norm, bound, opts);
    versus.params.extra["type_estimate_source"] = "banach_mazur_bound";
    annotate(versus, inst);
    out.add(versus);
    if (inst.norm.kind() == NormKind::euclidean && inst.p == 2.0) {
      auto hilbert = enflo_sides(inst.f, inst.p, inst.norm, opts);
      annotate(hilbert, inst);
      out.add(hilbert);
    }
  });
}

SuiteOutcome symmetrization_suite(const SuiteConfig& c) {
  if (c.p && *c.p > 2.0) throw ParameterError("symmetrization suite needs p in [1, 2]");
  const FuzzCorpusConfig fc = corpus(c, 1.0, 2.0);
  auto outcome = run_instances("symmetrization", c.trials, [&](std::uint64_t i, InstanceOutput& out) {
    const FuzzInstance inst = make_fuzz_instance(fc, i);
    RngCursor rng(CounterRng(c.seed, 0x73796d74).substream(i));
    const double t = c.t ? *c.t : rng.uniform(0.05, 3.0);
    const double bound = type_constant_upper_bound(inst.norm, inst.p);
    const auto chain = symmetrization_chain_check(inst.f, inst.p, inst.norm, t, bound, eval_options(c, i));
    auto record = to_json(chain);
    record["instance"] = i;
    record["t"] = t;
    record["generator"] = to_json(inst.function_spec);
    out.records.push_back(std::move(record));
    for (const auto& link : chain.links) out.count(link.satisfied, link.ratio_infinite || !(link.rhs > 0.0) ? 0.0 : link.ratio);
    if (inst.f.dim() <= 6) {
      ReportParams params = plain_params(c);
      params.n = inst.f.dim();
      params.t_grid = {t};
      params.extra["instance"] = i;
      out.add(make_report("symmetrization_law", symmetrization_law_gap(t, inst.f.dim()), 1e-13, std::move(params)));
    }
  });

  // E|eta|^p <= 2^{p/2} on a (t, p) grid.
  InstanceOutput grid;
  double worst = 0.0;
  std::vector<double> t_grid;
  for (int a = 0; a < 20; ++a) t_grid.push_back(std::pow(10.0, -2.0 + 3.0 * a / 19.0));
  for (double t : t_grid)
    for (int b = 0; b <= 10; ++b) {
      const double p = 1.0 + 0.1 * b;
      worst = std::max(worst, difference_abs_moment(t, p) - std::pow(2.0, 0.5 * p));
    }
  ReportParams params = plain_params(c);
  params.t_grid = t_grid;
  params.tol_abs = 1e-12;
  params.extra["p_grid"] = "1.0:0.1:2.0";
  grid.add(make_report("eta_moment_bound", worst, 0.0, std::move(params)));
  merge(outcome, std::move(grid));
  return outcome;
}

SuiteOutcome integrals_suite(const SuiteConfig& c) {
  SuiteOutcome outcome;
  outcome.suite = "integrals";
  InstanceOutput out;
  std::vector<double> exponents{1.0, 1.5, 2.0, 4.0, 10.0};
  if (c.p || c.q) {
    const double m = std::max(c.p.value_or(1.0), c.q.value_or(1.0));
    if (std::find(exponents.begin(), exponents.end(), m) == exponents.end()) exponents.push_back(m);
  }

  for (int a = 0; a < 20; ++a) {
    const double t = std::pow(10.0, -2.0 + 3.0 * a / 19.0);
    for (double r : exponents) {
      const double closed = tail_integral(t, r);
      const double direct = tail_integral_direct(t, r);
      ReportParams params = plain_params(c);
      params.t_grid = {t};
      params.extra["r"] = r;
      params.extra["closed_form"] = closed;
      params.extra["direct"] = direct;
      out.add(make_report("tail_integral", std::abs(closed - direct), 1e-14 * std::max(1.0, closed), params));
    }
  }

  for (double m : exponents) {
    const auto w = mu_weighted_integral(m);
    ReportParams params = plain_params(c);
    params.extra["exponent"] = m;
    params.extra["exponential_side"] = w.exponential_side;
    params.extra["mu_side"] = w.mu_side;
    out.add(make_report("mu_weighted_exponential_side", std::abs(w.exponential_side - m), 1e-8, params));
    ReportParams bound = params;
    bound.tol_abs = 1e-8;
    out.add(make_report("mu_weighted_mu_side", w.mu_side, m, bound));
  }

  const MuQuadrature quad = make_mu_quadrature(c.quad_nodes);
  const QuadratureRule rule = gauss_legendre(c.quad_nodes, 0.0, 0.5 * M_PI);
  double raw_mass = 0.0;
  for (double w : rule.weights) raw_mass += w;
  raw_mass /= 0.5 * M_PI;
  ReportParams mass_params = plain_params(c);
  mass_params.quad_nodes = quad.size();
  mass_params.extra["raw_mass"] = raw_mass;
  mass_params.extra["normalized_mass"] = quad.total_mass();
  out.add(make_report("mu_total_mass", std::abs(raw_mass - 1.0), 1e-10, mass_params));

  for (const auto& integrand : mu_test_integrands()) {
    const double by_rule = quad.integrate(integrand.g);
    const double by_density = integrate_mu_raw(integrand.g, 1e-13);
    ReportParams params = plain_params(c);
    params.quad_nodes = quad.size();
    params.extra["integrand"] = integrand.name;
    params.extra["quadrature"] = by_rule;
    params.extra["adaptive"] = by_density;
    out.add(make_report("mu_quadrature", std::abs(by_rule - by_density), 1e-8, std::move(params)));
  }
  merge(outcome, std::move(out));
  return outcome;
}

}  // namespace

std::string to_string(VerifyKind kind) {
  switch (kind) {
    case VerifyKind::probrep: return "probrep";
    case VerifyKind::pointwise: return "pointwise";
    case VerifyKind::main: return "main";
    case VerifyKind::lp: return "lp";
    case VerifyKind::enflo: return "enflo";
    case VerifyKind::symmetrization: return "symmetrization";
    case VerifyKind::integrals: return "integrals";
  }
  return "unknown";
}

VerifyKind parse_verify_kind(const std::string& text) {
  for (auto kind : {VerifyKind::probrep, VerifyKind::pointwise, VerifyKind::main, VerifyKind::lp, VerifyKind::enflo,
                    VerifyKind::symmetrization, VerifyKind::integrals})
    if (to_string(kind) == text) return kind;
  throw ParameterError("unknown suite '" + text + "'");
}

SuiteOutcome run_verify_suite(VerifyKind kind, const SuiteConfig& config) {
  validate(config);
  switch (kind) {
    case VerifyKind::probrep: return probrep_suite(config);
    case VerifyKind::pointwise: return pointwise_suite(config);
    case VerifyKind::main: return main_suite(config, false);
    case VerifyKind::lp: return main_suite(config, true);
    case VerifyKind::enflo: return enflo_suite(config);
    case VerifyKind::symmetrization: return symmetrization_suite(config);
    case VerifyKind::integrals: return integrals_suite(config);
  }
  throw ParameterError("unknown suite");
}

double type_constant_upper_bound(const NormSpec& norm, double p) {
  if (!(p >= 1.0 && p <= 2.0)) throw ParameterError("type constants are bounded here only for p in [1, 2]");
  if (p == 1.0 || norm.kind() == NormKind::euclidean || norm.exponent() == 2.0) return 1.0;
  const double r = norm.exponent();
  const double inv_r = std::isinf(r) ? 0.0 : 1.0 / r;
  return std::pow(static_cast<double>(norm.dim()), std::abs(0.5 - inv_r));
}

std::vector<MuTestIntegrand> mu_test_integrands() {
  return {
      {"one", [](double) { return 1.0; }},
      {"exp(-t)", [](double t) { return std::exp(-t); }},
      {"exp(-2t)", [](double t) { return std::exp(-2.0 * t); }},
      {"exp(-5t)", [](double t) { return std::exp(-5.0 * t); }},
      {"sqrt(1-exp(-2t))", [](double t) { return std::sqrt(-std::expm1(-2.0 * t)); }},
      {"1-exp(-2t)", [](double t) { return -std::expm1(-2.0 * t); }},
      {"(1-exp(-t))^2", [](double t) { return std::expm1(-t) * std::expm1(-t); }},
      {"exp(-t)sqrt(1-exp(-2t))", [](double t) { return std::exp(-t) * std::sqrt(-std::expm1(-2.0 * t)); }},
      {"exp(-exp(-t))", [](double t) { return std::exp(-std::exp(-t)); }},
      {"1/(1+exp(-t))", [](double t) { return 1.0 / (1.0 + std::exp(-t)); }},
  };
}

std::vector<SweepRow> run_sweep(const SweepConfig& c) {
  detail::require(!c.n_values.empty() && !c.p_values.empty() && !c.norms.empty(), "sweep grid is empty");
  detail::require(c.trials >= 1, "trials must be >= 1");
  const MuQuadrature quad = make_mu_quadrature(c.quad_nodes);
  struct Cell {
    int n;
    double p;
    std::string norm;
  };
  std::vector<Cell> cells;
  for (int n : c.n_values)
    for (double p : c.p_values)
      for (const auto& norm : c.norms) cells.push_back({n, p, norm});
  std::vector<SweepRow> rows(cells.size());
  parallel_for(cells.size(), [&](std::size_t k) {
    const Cell& cell = cells[k];
    if (cell.n < 1 || cell.n > kMaxJointCubeDim) throw CapacityError("sweep needs 1 <= n <= 12");
    const NormSpec norm = NormSpec::parse(cell.norm, c.d);
    SweepRow row{cell.n, cell.p, norm.name(), c.trials};
    EvalOptions opts;
    opts.tol_rel = c.tol_rel;
    for (std::uint64_t i = 0; i < c.trials; ++i) {
      RngCursor rng(CounterRng(c.seed, 0x73776565).substream(k * 1000003ULL + i));
      RandomFunctionSpec spec;
      spec.n = cell.n;
      spec.d = c.d;
      const CubeFunctiond f = random_cube_function(spec, rng);
      const auto main = dimension_free_main_sides(f, ConvexGauge::norm_power(norm, cell.p), quad, opts);
      const auto lp = dimension_free_lp_sides(f, cell.p, norm, quad, opts);
      const auto pisier = pisier_classic_sides(f, cell.p, norm, opts);
      const auto enflo = enflo_sides(f, cell.p, norm, opts);
      if (!main.satisfied) ++row.violations;
      if (!lp.satisfied) ++row.violations;
      row.max_ratio_main = std::max(row.max_ratio_main, main.ratio);
      row.max_ratio_lp = std::max(row.max_ratio_lp, lp.ratio);
      if (pisier.constant) row.max_constant_pisier = std::max(row.max_constant_pisier, *pisier.constant);
      if (enflo.constant) row.max_constant_enflo = std::max(row.max_constant_enflo, *enflo.constant);
    }
    rows[k] = std::move(row);
  });
  return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << "n,p,norm,trials,max_ratio_main,max_ratio_lp,max_constant_pisier,max_constant_enflo,violations\n";
  std::ostringstream line;
  line.precision(17);
  for (const auto& r : rows) {
    line.str("");
    line << r.n << ',' << r.p << ',' << r.norm << ',' << r.trials << ',' << r.max_ratio_main << ','
         << r.max_ratio_lp << ',' << r.max_constant_pisier << ',' << r.max_constant_enflo << ',' << r.violations
         << '\n';
    out << line.str();
  }
}

}  // namespace hpl
