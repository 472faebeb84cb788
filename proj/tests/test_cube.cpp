#include <doctest.h>

#include <cmath>

#include "hpl/cube.hpp"
#include "hpl/fuzz.hpp"
#include "hpl/norms.hpp"
#include "oracles.hpp"

using namespace hpl;

namespace {

CubeFunctiond make_random(int n, Eigen::Index d, std::uint64_t seed) {
  RngCursor rng(CounterRng(seed, 5));
  RandomFunctionSpec spec;
  spec.n = n;
  spec.d = d;
  return random_cube_function(spec, rng);
}

}  // namespace

TEST_SUITE("cube") {

TEST_CASE("derivative of constants and dictators") {
  Eigen::VectorXd c(2);
  c << 1.5, -2.0;
  const auto k = CubeFunctiond::constant(4, c);
  for (int j = 0; j < 4; ++j) CHECK(discrete_derivative(k, j).values().isZero(0.0));

  const auto f = CubeFunctiond::coordinate(3, 0);
  CHECK(discrete_derivative(f, 0).values() == f.values());
}

TEST_CASE("derivative of characters") {
  for (int n = 1; n <= 6; ++n)
    for (std::uint32_t s = 0; s < (1u << n); ++s) {
      const auto w = CubeFunctiond::character(n, s);
      for (int j = 0; j < n; ++j) {
        const auto dw = discrete_derivative(w, j);
        if ((s >> j) & 1u)
          CHECK(dw.values() == w.values());
        else
          CHECK(dw.values().isZero(0.0));
        CHECK(dw.values() == oracle::derivative(w, j).values());
      }
    }
}

TEST_CASE("laplacian eigenrelation") {
  for (int n = 1; n <= 6; ++n)
    for (std::uint32_t s = 0; s < (1u << n); ++s) {
      const auto w = CubeFunctiond::character(n, s);
      const Eigen::MatrixXd expected = -double(popcount(s)) * w.values();
      CHECK(oracle::max_abs_diff(laplacian(w).values(), expected) == 0.0);
    }
  const auto f = CubeFunctiond::coordinate(3, 0) + CubeFunctiond::coordinate(3, 1);
  CHECK(laplacian(f).values() == -f.values());
  CHECK(laplacian(CubeFunctiond::constant(3, Eigen::VectorXd::Ones(1))).values().isZero(0.0));
}

TEST_CASE("walsh transform") {
  Eigen::VectorXd c(2);
  c << 0.25, -3.0;
  const auto k = walsh_transform(CubeFunctiond::constant(3, c));
  CHECK(k.coefficient(0) == c);
  CHECK(k.coefficients().rightCols(7).isZero(0.0));

  const auto e = walsh_transform(CubeFunctiond::coordinate(3, 0));
  CHECK(e.coefficient(1)(0) == 1.0);
  CHECK(e.coefficients().cwiseAbs().sum() == 1.0);

  const auto f = make_random(8, 3, 1);
  const auto spectrum = walsh_transform(f);
  CHECK(oracle::max_abs_diff(inverse_walsh_transform(spectrum).values(), f.values()) < 1e-12);
  CHECK(oracle::max_abs_diff(spectrum.coefficients(), oracle::walsh(f)) < 1e-13);
}

TEST_CASE("parseval") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto f = make_random(7, 3, seed);
    const double energy = f.values().squaredNorm() / double(f.size());
    CHECK(std::abs(walsh_transform(f).coefficients().squaredNorm() - energy) < 1e-10);
  }
}

TEST_CASE("heat semigroup") {
  const auto f = make_random(6, 2, 3);
  CHECK(heat_semigroup(f, 0.0).values() == f.values());
  for (double t : {0.05, 0.7, 2.5}) {
    for (std::uint32_t s : {0u, 1u, 6u, 63u}) {
      const auto w = CubeFunctiond::character(6, s);
      const Eigen::MatrixXd expected = std::exp(-t * popcount(s)) * w.values();
      CHECK(oracle::max_abs_diff(heat_semigroup(w, t).values(), expected) < 1e-14);
    }
    CHECK(oracle::max_abs_diff(heat_semigroup(f, t).values(), oracle::heat(f, t).values()) < 1e-13);
  }
  const auto far = heat_semigroup(f, 50.0);
  CHECK(oracle::max_abs_diff(far.values(), expectation(f).replicate(1, f.size())) < 1e-12);
  CHECK_THROWS_AS(heat_semigroup(f, -1.0), ParameterError);
}

TEST_CASE("kernel representation") {
  const auto k = CubeFunctiond::constant(3, Eigen::VectorXd::Constant(1, 2.0));
  CHECK(oracle::max_abs_diff(kernel_semigroup(k, 0.4).values(), k.values()) < 1e-15);
  CHECK(kernel_gradient(k, 1, 0.4).values().cwiseAbs().maxCoeff() < 1e-15);

  const auto e1 = CubeFunctiond::coordinate(3, 0);
  CHECK(oracle::max_abs_diff(kernel_semigroup(e1, std::log(2.0)).values(), 0.5 * e1.values()) < 1e-15);
  for (int j = 0; j < 3; ++j) {
    const auto ej = CubeFunctiond::coordinate(3, j);
    const double t = 0.8;
    CHECK(oracle::max_abs_diff(kernel_gradient(ej, j, t).values(), std::exp(-t) * ej.values()) < 1e-14);
  }

  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto f = make_random(8, 2, 100 + seed);
    for (double t : {0.1, 1.0, 3.0}) {
      const auto heat = heat_semigroup(f, t);
      CHECK(oracle::max_abs_diff(kernel_semigroup(f, t).values(), heat.values()) < 1e-12);
      for (int j = 0; j < 8; j += 3)
        CHECK(oracle::max_abs_diff(kernel_gradient(f, j, t).values(),
                                   discrete_derivative(heat, j).values()) < 1e-12);
    }
  }
  CHECK_THROWS_AS(kernel_semigroup(k, 0.0), ParameterError);
  CHECK_THROWS_AS(kernel_gradient(k, 3, 1.0), ParameterError);
}

TEST_CASE("expectations") {
  CHECK(expectation(CubeFunctiond::character(4, 5)).cwiseAbs().maxCoeff() == 0.0);
  const double t = 0.3;
  CHECK(std::abs(biased_expectation(CubeFunctiond::coordinate(4, 2), t)(0) - std::exp(-t)) < 1e-15);
  const auto k = CubeFunctiond::constant(4, Eigen::VectorXd::Constant(1, -0.5));
  CHECK(expectation(k)(0) == -0.5);
  CHECK(std::abs(biased_expectation(k, t)(0) + 0.5) < 1e-15);
  const auto f = make_random(5, 2, 9);
  CHECK(oracle::max_abs_diff(biased_expectation(f, t), heat_semigroup(f, t).values().col(0)) < 1e-14);
}

TEST_CASE("derivative algebra") {
  // Dyadic values keep every difference exact.
  RngCursor rng(CounterRng(11, 1));
  const auto f = CubeFunctiond::tabulate(5, 2, [&](CubePoint) {
    return Eigen::Vector2d(uniform_int(rng, -64, 64) / 8.0, uniform_int(rng, -64, 64) / 8.0);
  });
  for (int j = 0; j < 5; ++j) {
    const auto dj = discrete_derivative(f, j);
    CHECK(discrete_derivative(dj, j).values() == dj.values());
    for (int k = 0; k < 5; ++k)
      CHECK(oracle::max_abs_diff(discrete_derivative(dj, k).values(),
                                 discrete_derivative(discrete_derivative(f, k), j).values()) == 0.0);
    for (double t : {0.05, 0.5, 2.0})
      CHECK(oracle::max_abs_diff(discrete_derivative(heat_semigroup(f, t), j).values(),
                                 heat_semigroup(dj, t).values()) < 1e-12);
  }
}

TEST_CASE("semigroup law and contraction") {
  for (int n : {3, 7, 10}) {
    const auto f = make_random(n, 2, 20 + n);
    for (auto [s, t] : {std::pair{0.1, 0.4}, std::pair{1.0, 2.0}}) {
      CHECK(oracle::max_abs_diff(heat_semigroup(heat_semigroup(f, s), t).values(),
                                 heat_semigroup(f, s + t).values()) < 1e-12);
      const auto pt = heat_semigroup(f, t);
      for (const auto& name : {"l1", "l2", "linf", "lp:3"}) {
        const NormSpec norm = NormSpec::parse(name, 2);
        double before = 0.0, after = 0.0;
        for (std::uint32_t x = 0; x < f.size(); ++x) {
          before = std::max(before, norm(f.values().col(x)));
          after = std::max(after, norm(pt.values().col(x)));
        }
        CHECK(after <= before + 1e-12);
      }
    }
  }
}

TEST_CASE("tabulation and arithmetic") {
  const auto f = CubeFunctiond::tabulate(3, 1, [](CubePoint x) {
    return Eigen::VectorXd::Constant(1, x.sign(0) * x.sign(2));
  });
  CHECK(f.values() == CubeFunctiond::character(3, 5).values());
  CHECK(CubePoint{3} * CubePoint{5} == CubePoint{6});
  CHECK(CubePoint{1}.negated(3) == CubePoint{6});
  const auto g = 2.0 * f - f;
  CHECK(g.values() == f.values());
  CHECK_THROWS_AS(CubeFunctiond(0, 1), ParameterError);
  CHECK_THROWS_AS(CubeFunctiond(21, 1), CapacityError);
  CHECK_THROWS_AS(CubeFunctiond(2, 0), ParameterError);
  CHECK_THROWS_AS(f + CubeFunctiond(2, 1), ParameterError);
}

}
