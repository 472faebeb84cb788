#include <doctest.h>

#include <cmath>

#include "hpl/biased_measure.hpp"
#include "hpl/errors.hpp"
#include "hpl/quadrature.hpp"
#include "oracles.hpp"

using namespace hpl;

TEST_SUITE("biased_measure") {

TEST_CASE("law at ln 2") {
  const auto law = make_law(std::log(2.0));
  CHECK(law.p_plus == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(law.p_minus == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(std::abs(law.delta_plus - 1.0 / std::sqrt(3.0)) < 1e-15);
  CHECK(std::abs(law.delta_minus + std::sqrt(3.0)) < 1e-15);
}

TEST_CASE("uniform limit") {
  const auto law = make_law(40.0);
  CHECK(std::abs(law.p_plus - 0.5) < 1e-15);
  CHECK(std::abs(law.delta_plus - 1.0) < 1e-15);
  CHECK(std::abs(law.delta_minus + 1.0) < 1e-15);
}

TEST_CASE("standardization on a log grid") {
  for (int i = 0; i <= 40; ++i) {
    const double t = 1e-3 * std::pow(4e4, i / 40.0);
    const auto law = make_law(t);
    CHECK(std::abs(law.delta_mean()) < 1e-12);
    CHECK(std::abs(law.delta_variance() - 1.0) < 1e-12);
    CHECK(std::abs(law.xi_mean() - std::exp(-t)) < 1e-15);
    CHECK(std::abs(law.delta_abs_moment(1.0) - std::sqrt(-std::expm1(-2.0 * t))) < 1e-14);
  }
  CHECK_THROWS_AS(make_law(0.0), ParameterError);
  CHECK_THROWS_AS(make_law(-1.0), ParameterError);
}

TEST_CASE("mu density against oracle") {
  for (double t : {1e-6, 0.01, 0.5, 3.0, 20.0})
    CHECK(mu_density(t) == doctest::Approx(oracle::mu_density(t)).epsilon(1e-14));
  for (double theta : {1e-8, 0.3, 1.2, 1.5707963})
    CHECK(mu_time_from_angle(theta) == doctest::Approx(-std::log(std::cos(theta))).epsilon(1e-9));
  CHECK(oracle::mu_integral([](double) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mu quadrature") {
  for (std::size_t m : {32, 64, 128}) {
    const auto quad = make_mu_quadrature(m);
    CHECK(std::abs(quad.total_mass() - 1.0) < 1e-10);
    CHECK(quad.size() == m);
    for (std::size_t k = 0; k < m; ++k) {
      CHECK(quad.nodes[k] > 0.0);
      CHECK(quad.weights[k] > 0.0);
    }
  }
  const auto quad = make_mu_quadrature(64);
  CHECK(std::abs(quad.integrate([](double t) { return std::exp(-t); }) - 2.0 / M_PI) < 1e-8);
  CHECK(std::abs(quad.integrate([](double t) { return std::sqrt(-std::expm1(-2.0 * t)); }) - 2.0 / M_PI) <
        1e-8);
  CHECK(std::abs(oracle::mu_integral([](double t) { return std::exp(-t); }) - 2.0 / M_PI) < 1e-12);
  CHECK_THROWS_AS(make_mu_quadrature(0), ParameterError);
}

TEST_CASE("mu quadrature convergence") {
  const auto q64 = make_mu_quadrature(64);
  const auto q128 = make_mu_quadrature(128);
  std::vector<std::function<double(double)>> gs{[](double t) { return std::exp(-t); }};
  for (double a : {0.1, 0.5, 0.9}) gs.push_back([a](double t) { return std::pow(-std::expm1(-2.0 * t), a); });
  for (const auto& g : gs) {
    CHECK(std::abs(q64.integrate(g) - q128.integrate(g)) < 1e-9);
    CHECK(std::abs(q64.integrate(g) - oracle::mu_integral(g)) < 1e-9);
    CHECK(std::abs(integrate_mu_adaptive(g) - oracle::mu_integral(g)) < 1e-10);
    CHECK(std::abs(integrate_mu_raw(g) - oracle::mu_integral(g)) < 1e-10);
  }
}

TEST_CASE("biased sampling") {
  const CounterRng rng(42, 1);
  const double t = std::log(2.0);
  const int samples = 1000000;
  long plus = 0;
  for (int i = 0; i < samples; ++i) plus += sample_biased_vector(rng, i, t, 1).sign(0) > 0;
  CHECK(std::abs(double(plus) / samples - 0.75) < 3e-3);

  double mean = 0.0;
  for (int i = 0; i < samples; ++i) mean += std::exp(-sample_mu(rng, i));
  CHECK(std::abs(mean / samples - 2.0 / M_PI) < 3e-3);

  const CounterRng again(42, 1);
  for (int i = 0; i < 100; ++i) {
    CHECK(sample_biased_vector(rng, i, 0.3, 7) == sample_biased_vector(again, i, 0.3, 7));
    CHECK(sample_mu(rng, i) == sample_mu(again, i));
  }
}

TEST_CASE("tail integral") {
  CHECK(std::abs(tail_integral(std::log(2.0), 2.0) - std::sqrt(1.5)) < 1e-15);
  for (double t : {0.01, 0.4, 2.0})
    CHECK(std::abs(tail_integral(t, 1.0) + std::expm1(-2.0 * t)) < 1e-15);
  for (double r : {1.0, 1.5, 3.0}) CHECK(std::abs(tail_integral(40.0, r) - std::pow(2.0, 1.0 - 1.0 / r)) < 1e-14);

  for (double t : {0.02, 0.3, 1.1, 5.0})
    for (double r : {1.0, 2.0, 7.5}) {
      // P{|xi - xi'| > s} = 2 p+ p- on [0, 2): the step tail integrated by the oracle.
      const double p_plus = (1.0 + std::exp(-t)) / 2.0;
      const double off = 2.0 * p_plus * (1.0 - p_plus);
      const double direct = oracle::integrate([&](double) { return std::pow(off, 1.0 / r); }, 0.0, 2.0);
      CHECK(tail_integral(t, r) == doctest::Approx(direct).epsilon(1e-13));
      CHECK(std::abs(tail_integral(t, r) - tail_integral_direct(t, r)) <= 1e-14 * std::max(1.0, direct));
      CHECK(tail_integral_verified(t, r) == tail_integral(t, r));
    }
  CHECK_THROWS_AS(tail_integral(1.0, 0.5), ParameterError);
  CHECK_THROWS_AS(tail_integral(0.0, 2.0), ParameterError);
}

TEST_CASE("mu weighted integral") {
  for (double m : {1.0, 1.5, 2.0, 4.0, 4.5, 10.0}) {
    const auto r = mu_weighted_integral(m);
    CHECK(r.exponent == m);
    CHECK(std::abs(r.exponential_side - m) < 1e-8);
    CHECK(r.exponential_side_exact);
    CHECK(r.mu_side_bounded);
    CHECK(r.mu_side <= m + 1e-8);
    const double mu_oracle =
        (M_PI / 2.0) * oracle::mu_integral([m](double t) { return std::pow(-std::expm1(-2.0 * t), 1.0 / m - 0.5); });
    CHECK(std::abs(r.mu_side - mu_oracle) < 1e-8);
  }
  CHECK(std::abs(mu_weighted_integral(1.0).mu_side - 1.0) < 1e-8);
}

TEST_CASE("two-point moment bound") {
  for (int i = 0; i < 20; ++i) {
    const double t = std::pow(10.0, -2.0 + 3.0 * i / 19.0);
    for (int k = 0; k <= 10; ++k) {
      const double p = 1.0 + 0.1 * k;
      const double m = difference_abs_moment(t, p);
      CHECK(m <= std::pow(2.0, p / 2.0) + 1e-12);
      // eta = 0 w.p. 1 - 2 p+ p-, else +-2 / sqrt(4 p+ p-).
      const double pp = (1.0 + std::exp(-t)) / 2.0, pm = 1.0 - pp;
      const double expected = 2.0 * pp * pm * std::pow(2.0 / std::sqrt(4.0 * pp * pm), p);
      CHECK(m == doctest::Approx(expected).epsilon(1e-13));
    }
  }
  CHECK(std::abs(difference_abs_moment(0.7, 2.0) - 2.0) < 1e-13);
}

TEST_CASE("symmetrization law") {
  for (int n = 1; n <= 4; ++n)
    for (double t : {0.05, 1.0, 3.0}) CHECK(symmetrization_law_gap(t, n) < 1e-13);
}

TEST_CASE("quadrature rules") {
  const auto gl = gauss_legendre(10, 0.0, 2.0);
  double acc = 0.0;
  for (std::size_t k = 0; k < gl.size(); ++k) acc += gl.weights[k] * std::pow(gl.nodes[k], 19);
  CHECK(acc == doctest::Approx(std::pow(2.0, 20) / 20.0).epsilon(1e-13));
  for (std::size_t k = 1; k < gl.size(); ++k) CHECK(gl.nodes[k] > gl.nodes[k - 1]);

  const auto ts = integrate_tanh_sinh([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-12);
  CHECK(std::abs(ts.value - 2.0) < 1e-10);
  const auto smooth = integrate_tanh_sinh([](double x) { return std::cos(x); }, 0.0, 1.0);
  CHECK(std::abs(smooth.value - std::sin(1.0)) < 1e-12);
}

}
