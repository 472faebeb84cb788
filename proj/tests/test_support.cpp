#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <random>
#include <set>

#include "hpl/fuzz.hpp"
#include "hpl/gauge.hpp"
#include "hpl/parallel.hpp"
#include "hpl/random.hpp"
#include "hpl/report.hpp"
#include "hpl/summation.hpp"
#include "oracles.hpp"

using namespace hpl;

TEST_SUITE("support") {

TEST_CASE("counter rng is a pure function of its key") {
  const CounterRng a(7, 2), b(7, 2), c(7, 3), d(8, 2);
  int same_stream = 0, same_seed = 0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    CHECK(a.bits(i) == b.bits(i));
    same_stream += a.bits(i) == c.bits(i);
    same_seed += a.bits(i) == d.bits(i);
    const double u = a.uniform(i);
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
  CHECK(same_stream == 0);
  CHECK(same_seed == 0);
  CHECK(a.substream(1).bits(0) == b.substream(1).bits(0));
  CHECK(a.substream(1).bits(0) != a.substream(2).bits(0));
}

TEST_CASE("rng moments") {
  const CounterRng rng(1, 1);
  const int n = 200000;
  std::vector<double> u(n), g(n), s(n);
  for (int i = 0; i < n; ++i) {
    u[i] = rng.uniform(i);
    g[i] = rng.normal(i);
    s[i] = rng.biased_sign(i, 0.8);
  }
  const auto mu = sample_mean(u), mg = sample_mean(g), ms = sample_mean(s);
  CHECK(std::abs(mu.mean - 0.5) < 4.0 * mu.std_error);
  CHECK(std::abs(mg.mean) < 4.0 * mg.std_error);
  CHECK(std::abs(ms.mean - 0.6) < 4.0 * ms.std_error);
  std::vector<double> g2(n);
  for (int i = 0; i < n; ++i) g2[i] = g[i] * g[i];
  const auto m2 = sample_mean(g2);
  CHECK(std::abs(m2.mean - 1.0) < 4.0 * m2.std_error);

  RngCursor cursor(rng);
  std::uniform_int_distribution<int> dist(0, 9);
  std::set<int> seen;
  for (int i = 0; i < 200; ++i) seen.insert(dist(cursor));
  CHECK(seen.size() == 10);
}

TEST_CASE("normal quantile") {
  CHECK(std::abs(normal_quantile(0.5)) < 1e-15);
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-13));
  CHECK(normal_quantile(1e-10) == doctest::Approx(-6.361340902404056).epsilon(1e-12));
  for (double p : {1e-6, 0.01, 0.3, 0.77, 0.999}) {
    const double x = normal_quantile(p);
    CHECK(0.5 * std::erfc(-x / std::sqrt(2.0)) == doctest::Approx(p).epsilon(1e-12));
  }
}

TEST_CASE("pairwise summation") {
  std::vector<double> v(1000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 / double(i + 1);
  const double direct = pairwise_sum<double>(v.size(), [&](std::size_t i) { return v[i]; });
  long double reference = 0.0;
  for (double x : v) reference += x;
  CHECK(std::abs(direct - double(reference)) < 1e-13);

  for (std::size_t count : {1u, 15u, 16u, 17u, 64u, 100u, 1024u}) {
    PairwiseAccumulator<double> acc(2);
    Eigen::Vector2d expected = Eigen::Vector2d::Zero();
    for (std::size_t i = 0; i < count; ++i) {
      acc.add(Eigen::Vector2d(v[i], -v[i]));
      expected += Eigen::Vector2d(v[i], -v[i]);
    }
    CHECK((acc.result() - expected).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("parallel for covers every index once") {
  for (const char* threads : {"1", "3", "8"}) {
    setenv("HPL_THREADS", threads, 1);
    CHECK(thread_count() == std::size_t(std::atoi(threads)));
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) CHECK(h == 1);
    CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) {
                      if (i == 5) throw NumericalError("boom");
                    }),
                    NumericalError);
  }
  unsetenv("HPL_THREADS");
}

TEST_CASE("report tolerance policy") {
  ReportParams params;
  auto r = make_report("x", 1.0, 1.0, params);
  CHECK(r.satisfied);
  CHECK(r.ratio == 1.0);
  r = make_report("x", 1.0 + 5e-9, 1.0, params);
  CHECK(r.satisfied);
  r = make_report("x", 1.0 + 2e-8, 1.0, params);
  CHECK_FALSE(r.satisfied);
  r = make_report("x", 0.0, 0.0, params);
  CHECK(r.satisfied);
  CHECK(r.ratio == 0.0);
  CHECK_FALSE(r.ratio_infinite);
  r = make_report("x", 1.0, 0.0, params);
  CHECK_FALSE(r.satisfied);
  CHECK(r.ratio_infinite);
  const auto j = to_json(r);
  CHECK(j["ratio"].is_null());
  CHECK(j["ratio_infinite"] == true);
  for (const char* key : {"name", "lhs", "rhs", "ratio", "satisfied", "params", "error_bound"})
    CHECK(j.contains(key));

  params.method = Method::mc;
  r = make_report("x", 1.3, 1.0, params, 0.1);
  CHECK(r.satisfied);
  r = make_report("x", 1.5, 1.0, params, 0.1);
  CHECK_FALSE(r.satisfied);
}

TEST_CASE("gauges") {
  const auto np = ConvexGauge::norm_power(NormSpec::lp(2.0, 2), 3.0);
  CHECK(np(Eigen::Vector2d(3.0, 4.0)) == doctest::Approx(125.0));
  Eigen::MatrixXd a(2, 2);
  a << 1, -1, 0, 2;
  const auto ma = ConvexGauge::max_affine(a, Eigen::Vector2d(0.0, 1.0));
  CHECK(ma(Eigen::Vector2d(1.0, 1.0)) == 2.0);
  CHECK(ma.dim() == 2);
  const auto lin = ConvexGauge::linear(Eigen::Vector2d(1.0, 2.0));
  CHECK(lin(Eigen::Vector2d(1.0, 1.0)) == 3.0);
  CHECK_THROWS_AS(ConvexGauge::norm_power(NormSpec::lp(2.0, 2), 0.5), ParameterError);
  CHECK_THROWS_AS(ConvexGauge::max_affine(a, Eigen::Vector3d::Zero()), ParameterError);
}

TEST_CASE("random functions") {
  RngCursor rng(CounterRng(3, 3));
  RandomFunctionSpec spec;
  spec.n = 6;
  spec.d = 3;
  spec.degree_cap = 2;
  spec.include_mean = false;
  const auto f = random_cube_function(spec, rng);
  CHECK(f.max_point_norm() == doctest::Approx(1.0).epsilon(1e-14));
  const Eigen::MatrixXd c = oracle::walsh(f);
  for (std::uint32_t s = 0; s < f.size(); ++s)
    if (s == 0 || popcount(s) > 2) CHECK(c.col(s).cwiseAbs().maxCoeff() < 1e-15);

  FuzzCorpusConfig config;
  config.seed = 5;
  for (std::uint64_t i : {0u, 17u, 400u}) {
    const auto a = make_fuzz_instance(config, i);
    const auto b = make_fuzz_instance(config, i);
    CHECK(a.f.values() == b.f.values());
    CHECK(a.p == b.p);
    CHECK(a.norm.name() == b.norm.name());
    CHECK(a.gauge.name() == b.gauge.name());
    CHECK(a.f.dim() >= config.n_min);
    CHECK(a.f.dim() <= config.n_max);
    CHECK(a.p >= 1.0);
    CHECK(a.p <= 3.0);
  }
  CHECK(make_fuzz_instance(config, 1).f.values() != make_fuzz_instance(config, 2).f.values());
}

}
