#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "hpl/errors.hpp"
#include "hpl/extremal_search.hpp"
#include "hpl/inequality_lab.hpp"
#include "hpl/random.hpp"

using namespace hpl;

namespace {

SearchConfig config_for(Objective objective, const NormSpec& norm, int n, double exponent) {
  SearchConfig c;
  c.objective = objective;
  c.norm = norm;
  c.n = n;
  c.exponent = exponent;
  c.restarts = 4;
  c.max_iters = 120;
  c.polish_iters = 20;
  c.seed = 3;
  return c;
}

Eigen::MatrixXd random_point(const SearchObjective& obj, std::uint64_t seed) {
  RngCursor rng(CounterRng(seed, 77));
  Eigen::MatrixXd theta(obj.rows(), obj.cols());
  for (Eigen::Index i = 0; i < theta.size(); ++i) theta.data()[i] = rng.normal();
  return theta.cwiseProduct(obj.mask());
}

}  // namespace

TEST_SUITE("extremal_search") {

TEST_CASE("hilbert space constants") {
  const NormSpec l2 = NormSpec::lp(2.0, 3);
  for (int n : {1, 2, 4}) {
    CHECK(std::abs(estimate_type_constant(config_for(Objective::type_const, l2, n, 2.0)).best_value - 1.0) < 1e-6);
    CHECK(std::abs(estimate_cotype_constant(config_for(Objective::cotype_const, l2, n, 2.0)).best_value - 1.0) <
          1e-6);
  }
  const auto pisier = estimate_pisier_ratio(config_for(Objective::pisier_ratio, l2, 3, 2.0));
  CHECK(pisier.best_value <= 1.0 + 1e-6);
  CHECK(pisier.best_value >= 1.0 - 1e-6);
  const auto scalar = estimate_pisier_ratio(config_for(Objective::pisier_ratio, NormSpec::lp(2.0, 1), 3, 2.0));
  CHECK(scalar.best_value <= 1.0 + 1e-6);
  const auto enflo = estimate_enflo_ratio(config_for(Objective::enflo_ratio, l2, 3, 2.0));
  CHECK(enflo.best_value <= 1.0 + 1e-6);
  CHECK(enflo.best_value >= 1.0 - 1e-6);
}

TEST_CASE("single vector") {
  for (const auto& name : {"l1", "linf", "lp:3"}) {
    const NormSpec norm = NormSpec::parse(name, 3);
    CHECK(estimate_type_constant(config_for(Objective::type_const, norm, 1, 1.5)).best_value ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(estimate_cotype_constant(config_for(Objective::cotype_const, norm, 1, 3.0)).best_value ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("l1 witness") {
  const auto r = estimate_type_constant(config_for(Objective::type_const, NormSpec::lp(1.0, 2), 2, 2.0));
  CHECK(r.best_value >= std::sqrt(2.0) - 1e-6);
  CHECK(r.argument.rows() == 2);
  CHECK(r.argument.cols() == 2);
}

TEST_CASE("linf cotype grows") {
  double previous = 0.0;
  for (int n = 2; n <= 5; ++n) {
    const auto r = estimate_cotype_constant(config_for(Objective::cotype_const, NormSpec::linf(n), n, 4.0));
    CHECK(r.best_value > previous);
    previous = r.best_value;
  }
}

TEST_CASE("enflo contains the linear search") {
  const NormSpec l1 = NormSpec::lp(1.0, 2);
  const auto type = estimate_type_constant(config_for(Objective::type_const, l1, 3, 1.5));
  auto c = config_for(Objective::enflo_ratio, l1, 3, 1.5);
  c.initial = type.argument;
  const auto enflo = estimate_enflo_ratio(c);
  CHECK(enflo.best_value >= type.best_value - 1e-6);

  c.degree_cap = 1;
  c.initial = type.argument;
  const auto linear = estimate_enflo_ratio(c);
  CHECK(linear.best_value == doctest::Approx(type.best_value).epsilon(1e-6));
}

TEST_CASE("reported values re-evaluate exactly") {
  const NormSpec linf = NormSpec::linf(3);
  for (Objective objective :
       {Objective::type_const, Objective::cotype_const, Objective::pisier_ratio, Objective::enflo_ratio}) {
    const auto c = config_for(objective, linf, 3, objective == Objective::cotype_const ? 3.0 : 1.5);
    const auto r = run_search(c);
    const SearchObjective exact(c, false);
    CHECK(std::abs(exact.exact_value(r.argument) - r.best_value) <= 1e-9 * std::max(1.0, r.best_value));
    CHECK(std::abs(std::exp(exact.log_ratio(r.argument)) - r.best_value) <= 1e-9 * std::max(1.0, r.best_value));
    CHECK(r.traces.size() == 4);
    CHECK(r.best_value >= r.traces[r.best_restart].initial_exact - 1e-12);
    for (const auto& trace : r.traces) {
      for (std::size_t k = 1; k < trace.smoothed_values.size(); ++k)
        CHECK(trace.smoothed_values[k] >= trace.smoothed_values[k - 1]);
      CHECK(trace.steps.size() + 1 == trace.smoothed_values.size());
      CHECK(r.best_value >= trace.final_exact);
    }
    const SearchObjective smoothed(c, true);
    CHECK(std::abs(std::exp(smoothed.log_ratio(r.argument)) - r.best_smoothed) <= 1e-9 * r.best_smoothed);
    if (objective == Objective::type_const || objective == Objective::cotype_const)
      CHECK(std::abs(r.best_value - r.best_smoothed) <= 0.02 * r.best_value);
  }
}

TEST_CASE("gradient matches finite differences") {
  for (Objective objective :
       {Objective::type_const, Objective::cotype_const, Objective::pisier_ratio, Objective::enflo_ratio}) {
    for (const auto& name : {"lp:3", "linf", "l1"}) {
      const auto c = config_for(objective, NormSpec::parse(name, 2), 3, 1.7);
      const SearchObjective obj(c, true);
      for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const Eigen::MatrixXd theta = random_point(obj, seed);
        Eigen::MatrixXd grad;
        obj.log_ratio(theta, &grad);
        for (Eigen::Index i = 0; i < theta.size(); ++i) {
          if (obj.mask().data()[i] == 0.0) {
            CHECK(grad.data()[i] == 0.0);
            continue;
          }
          const double h = 1e-6 * std::max(1.0, std::abs(theta.data()[i]));
          Eigen::MatrixXd a = theta, b = theta;
          a.data()[i] += h;
          b.data()[i] -= h;
          const double fd = (obj.log_ratio(a) - obj.log_ratio(b)) / (2.0 * h);
          CHECK(std::abs(grad.data()[i] - fd) <= 1e-5 * std::max(1.0, std::abs(fd)));
        }
      }
    }
  }
}

TEST_CASE("normalization keeps the ratio") {
  const auto c = config_for(Objective::type_const, NormSpec::lp(3.0, 2), 3, 1.5);
  const SearchObjective obj(c, false);
  Eigen::MatrixXd theta = random_point(obj, 9);
  const double before = obj.log_ratio(theta);
  obj.normalize(theta);
  CHECK(obj.log_ratio(theta) == doctest::Approx(before).epsilon(1e-12));
}

TEST_CASE("search is deterministic across thread counts") {
  const auto c = config_for(Objective::pisier_ratio, NormSpec::lp(1.0, 2), 3, 1.5);
  setenv("HPL_THREADS", "1", 1);
  const std::string one = to_json(run_search(c)).dump();
  setenv("HPL_THREADS", "4", 1);
  const std::string four = to_json(run_search(c)).dump();
  unsetenv("HPL_THREADS");
  CHECK(one == four);

  std::ostringstream csv;
  write_trace_csv(run_search(c), csv);
  CHECK(csv.str().rfind("restart,iteration,smoothed_value,step", 0) == 0);
}

TEST_CASE("configuration errors") {
  auto c = config_for(Objective::type_const, NormSpec::lp(2.0, 2), 21, 2.0);
  CHECK_THROWS_AS(run_search(c), CapacityError);
  c.n = 2;
  c.exponent = 0.5;
  CHECK_THROWS_AS(run_search(c), ParameterError);
  CHECK(parse_objective("enflo") == Objective::enflo_ratio);
  CHECK_THROWS_AS(parse_objective("nope"), ParameterError);
}

}
