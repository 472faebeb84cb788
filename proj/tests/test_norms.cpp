#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hpl/errors.hpp"
#include "hpl/norms.hpp"
#include "hpl/random.hpp"
#include "oracles.hpp"

using namespace hpl;

namespace {

Eigen::MatrixXd random_vectors(Eigen::Index d, int n, std::uint64_t seed) {
  RngCursor rng(CounterRng(seed, 3));
  Eigen::MatrixXd x(d, n);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
  return x;
}

}  // namespace

TEST_SUITE("norms") {

TEST_CASE("norm values") {
  const Eigen::Vector2d v(3.0, 4.0);
  CHECK(NormSpec::lp(2.0, 2)(v) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(NormSpec::linf(2)(v) == 4.0);
  CHECK(NormSpec::lp(1.0, 3)(Eigen::Vector3d(1.0, 1.0, 1.0)) == 3.0);
  CHECK(NormSpec::euclidean(2)(v) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(NormSpec::parse("lp:3", 2)(v) == doctest::Approx(std::cbrt(91.0)).epsilon(1e-15));
  CHECK(NormSpec::parse("l1", 2).exponent() == 1.0);
  CHECK(NormSpec::parse("linf", 2).is_infinity());
  CHECK(NormSpec::lp(3.0, 2).dual_exponent() == doctest::Approx(1.5));
  CHECK_THROWS_AS(NormSpec::lp(0.5, 2), ParameterError);
  CHECK_THROWS_AS(NormSpec::parse("banana", 2), ParameterError);
  CHECK(abs_pow(0.0, 1.5) == 0.0);
  CHECK(abs_pow(-2.0, 3.0) == doctest::Approx(8.0));
}

TEST_CASE("norm gradient against finite differences") {
  RngCursor rng(CounterRng(1, 9));
  for (const auto& name : {"l2", "lp:1.5", "lp:4", "l1", "linf"}) {
    const NormSpec norm = NormSpec::parse(name, 4);
    Eigen::VectorXd v(4);
    for (int i = 0; i < 4; ++i) v(i) = rng.normal() + (i + 1) * 0.1;
    const Eigen::VectorXd g = norm.gradient(v);
    for (int i = 0; i < 4; ++i) {
      Eigen::VectorXd a = v, b = v;
      const double h = 1e-6;
      a(i) += h;
      b(i) -= h;
      CHECK(g(i) == doctest::Approx((norm(a) - norm(b)) / (2 * h)).epsilon(1e-5));
    }
    CHECK(norm.gradient(Eigen::VectorXd::Zero(4)).isZero(0.0));
  }
}

TEST_CASE("rademacher moments") {
  MomentQuery q;
  q.p_moment = 2.0;
  q.vectors = Eigen::MatrixXd::Identity(2, 2);
  q.norm = NormSpec::lp(2.0, 2);
  CHECK(rademacher_moment(q).value == doctest::Approx(2.0).epsilon(1e-15));

  q.p_moment = 1.0;
  q.vectors = Eigen::MatrixXd::Ones(1, 2);
  q.norm = NormSpec::lp(2.0, 1);
  CHECK(rademacher_moment(q).value == doctest::Approx(1.0).epsilon(1e-15));

  for (const auto& name : {"l1", "l2", "linf", "lp:3"}) {
    q.norm = NormSpec::parse(name, 3);
    q.vectors = random_vectors(3, 10, 4);
    q.p_moment = 1.7;
    const auto exact = rademacher_moment(q);
    CHECK(exact.exact);
    CHECK(exact.value == doctest::Approx(oracle::rademacher(q.vectors, 1.7, q.norm)).epsilon(1e-13));
    const auto mc = rademacher_moment(q, MonteCarloOptions{200000, 3});
    CHECK_FALSE(mc.exact);
    CHECK(mc.std_error > 0.0);
    CHECK(std::abs(mc.value - exact.value) < 4.0 * mc.std_error);
  }
  q.vectors = Eigen::MatrixXd::Ones(1, 21);
  q.norm = NormSpec::lp(2.0, 1);
  CHECK_THROWS_AS(rademacher_moment(q), CapacityError);
}

TEST_CASE("type and cotype ratios") {
  const NormSpec l2 = NormSpec::lp(2.0, 3);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto x = random_vectors(3, 6, seed);
    CHECK(type_ratio(x, 2.0, l2) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(cotype_ratio(x, 2.0, l2) == doctest::Approx(1.0).epsilon(1e-13));
  }
  const auto single = random_vectors(3, 1, 7);
  for (const auto& name : {"l1", "linf"}) {
    CHECK(type_ratio(single, 1.5, NormSpec::parse(name, 3)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(cotype_ratio(single, 3.0, NormSpec::parse(name, 3)) == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK(type_ratio(Eigen::MatrixXd::Identity(2, 2), 2.0, NormSpec::lp(1.0, 2)) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("invariances") {
  const NormSpec norm = NormSpec::lp(3.0, 3);
  const auto x = random_vectors(3, 5, 11);
  const double base = type_ratio(x, 1.5, norm);
  for (double c : {-3.0, 1e-3, 250.0}) CHECK(std::abs(type_ratio(c * x, 1.5, norm) - base) < 1e-12);

  MomentQuery q{1.5, x, norm};
  const double moment = rademacher_moment(q).value;
  std::vector<int> perm(5);
  std::iota(perm.begin(), perm.end(), 0);
  std::reverse(perm.begin(), perm.end());
  Eigen::MatrixXd y(3, 5);
  for (int j = 0; j < 5; ++j) y.col(j) = (j % 2 ? -1.0 : 1.0) * x.col(perm[j]);
  q.vectors = y;
  CHECK(rademacher_moment(q).value == doctest::Approx(moment).epsilon(1e-13));

  double previous = 0.0;
  q.vectors = x;
  for (double p : {1.0, 1.5, 2.0, 3.0, 5.0}) {
    q.p_moment = p;
    const double power_mean = std::pow(rademacher_moment(q).value, 1.0 / p);
    CHECK(power_mean >= previous - 1e-13);
    previous = power_mean;
  }
}

}
