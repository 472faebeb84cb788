#pragma once

// Exact calculus for vector-valued functions on the discrete cube {-1,1}^n.
//
// A point is encoded by an index in [0, 2^n): coordinate j is +1 when bit j
// is clear and -1 when it is set. Negating coordinate j flips bit j, and the
// coordinatewise product of two points is the XOR of their indices.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hpl/errors.hpp"
#include "hpl/summation.hpp"

namespace hpl {

/// Largest cube dimension for single-table exact operations.
inline constexpr int kMaxCubeDim = 20;
/// Largest cube dimension for exact expectations over two independent points.
inline constexpr int kMaxJointCubeDim = 12;

struct CubePoint {
  std::uint32_t index = 0;

  constexpr int sign(int j) const { return ((index >> j) & 1u) ? -1 : 1; }
  constexpr CubePoint flipped(int j) const { return {index ^ (1u << j)}; }
  constexpr CubePoint negated(int n) const { return {index ^ ((1u << n) - 1u)}; }
  /// Coordinatewise product of two points.
  constexpr CubePoint operator*(CubePoint other) const { return {index ^ other.index}; }
  constexpr bool operator==(const CubePoint&) const = default;
};

inline int popcount(std::uint32_t mask) { return __builtin_popcount(mask); }

/// Walsh character w_S(x) = prod_{j in S} x_j as +-1.
inline int walsh_character(std::uint32_t subset, std::uint32_t point) {
  return (popcount(subset & point) & 1) ? -1 : 1;
}

namespace detail {

inline void check_cube_dim(int n, int cap = kMaxCubeDim) {
  if (n < 1) throw ParameterError("cube dimension must be >= 1, got " + std::to_string(n));
  if (n > cap)
    throw CapacityError("cube dimension " + std::to_string(n) + " exceeds enumeration cap " +
                        std::to_string(cap));
}

// In-place Walsh-Hadamard butterfly over the columns of `values`.
// With normalize, each stage halves, producing mean(f * w_S).
template <typename Scalar>
void walsh_butterfly(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& values, int n,
                     bool normalize) {
  const std::size_t size = std::size_t{1} << n;
  const Scalar half(0.5);
  for (int j = 0; j < n; ++j) {
    const std::size_t bit = std::size_t{1} << j;
    for (std::size_t x = 0; x < size; ++x) {
      if (x & bit) continue;
      const auto a = static_cast<Eigen::Index>(x);
      const auto b = static_cast<Eigen::Index>(x | bit);
      for (Eigen::Index r = 0; r < values.rows(); ++r) {
        const Scalar u = values(r, a);
        const Scalar v = values(r, b);
        if (normalize) {
          values(r, a) = half * (u + v);
          values(r, b) = half * (u - v);
        } else {
          values(r, a) = u + v;
          values(r, b) = u - v;
        }
      }
    }
  }
}

}  // namespace detail

/// Dense table of the 2^n values of f: {-1,1}^n -> R^d, one column per point.
template <typename Scalar = double>
class CubeFunction {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  CubeFunction(int n, Eigen::Index d) : n_(n) {
    detail::check_cube_dim(n);
    detail::require(d >= 1, "target dimension must be >= 1");
    values_ = Matrix::Zero(d, Eigen::Index{1} << n);
  }

  CubeFunction(int n, Matrix values) : n_(n), values_(std::move(values)) {
    detail::check_cube_dim(n);
    detail::require(values_.rows() >= 1, "target dimension must be >= 1");
    detail::require(values_.cols() == (Eigen::Index{1} << n),
                    "value table must have 2^n columns");
  }

  /// Tabulates fn(CubePoint) -> Vector of length d.
  template <typename Fn>
  static CubeFunction tabulate(int n, Eigen::Index d, Fn&& fn) {
    CubeFunction f(n, d);
    for (std::uint32_t x = 0; x < f.size(); ++x) f.values_.col(x) = fn(CubePoint{x});
    return f;
  }

  static CubeFunction constant(int n, const Vector& c) {
    CubeFunction f(n, c.size());
    f.values_.colwise() = c;
    return f;
  }

  /// Scalar Walsh character w_S.
  static CubeFunction character(int n, std::uint32_t subset) {
    CubeFunction f(n, 1);
    for (std::uint32_t x = 0; x < f.size(); ++x) f.values_(0, x) = Scalar(walsh_character(subset, x));
    return f;
  }

  /// Dictator f(x) = x_j.
  static CubeFunction coordinate(int n, int j) { return character(n, 1u << j); }

  /// Linear function f(x) = sum_j x_j v_j, with v_j the columns of `vectors`.
  static CubeFunction linear(int n, const Matrix& vectors) {
    detail::require(vectors.cols() == n, "linear function needs n vectors");
    return tabulate(n, vectors.rows(), [&](CubePoint x) {
      Vector v = Vector::Zero(vectors.rows());
      for (int j = 0; j < n; ++j) v += Scalar(x.sign(j)) * vectors.col(j);
      return v;
    });
  }

  int dim() const { return n_; }
  Eigen::Index target_dim() const { return values_.rows(); }
  std::uint32_t size() const { return std::uint32_t{1} << n_; }

  const Matrix& values() const { return values_; }
  Matrix& values() { return values_; }

  auto operator()(CubePoint x) const { return values_.col(x.index); }
  auto operator()(CubePoint x) { return values_.col(x.index); }

  /// max_x of the Euclidean norm of f(x).
  Scalar max_point_norm() const { return values_.colwise().norm().maxCoeff(); }

  CubeFunction& operator+=(const CubeFunction& other) {
    check_same_shape(other);
    values_ += other.values_;
    return *this;
  }
  CubeFunction& operator-=(const CubeFunction& other) {
    check_same_shape(other);
    values_ -= other.values_;
    return *this;
  }
  CubeFunction& operator*=(Scalar c) {
    values_ *= c;
    return *this;
  }

  friend CubeFunction operator+(CubeFunction a, const CubeFunction& b) { return a += b; }
  friend CubeFunction operator-(CubeFunction a, const CubeFunction& b) { return a -= b; }
  friend CubeFunction operator*(Scalar c, CubeFunction a) { return a *= c; }

 private:
  void check_same_shape(const CubeFunction& other) const {
    detail::require(n_ == other.n_ && values_.rows() == other.values_.rows(),
                    "cube functions have different shapes");
  }

  int n_;
  Matrix values_;
};

/// Walsh coefficients of a cube function; column S holds mean(f * w_S).
template <typename Scalar = double>
class WalshSpectrum {
 public:
  using Matrix = typename CubeFunction<Scalar>::Matrix;

  WalshSpectrum(int n, Matrix coefficients) : n_(n), coefficients_(std::move(coefficients)) {
    detail::check_cube_dim(n);
    detail::require(coefficients_.cols() == (Eigen::Index{1} << n),
                    "spectrum must have 2^n columns");
  }

  int dim() const { return n_; }
  Eigen::Index target_dim() const { return coefficients_.rows(); }
  std::uint32_t size() const { return std::uint32_t{1} << n_; }

  auto coefficient(std::uint32_t subset) const { return coefficients_.col(subset); }
  auto coefficient(std::uint32_t subset) { return coefficients_.col(subset); }
  const Matrix& coefficients() const { return coefficients_; }
  Matrix& coefficients() { return coefficients_; }

 private:
  int n_;
  Matrix coefficients_;
};

template <typename Scalar>
WalshSpectrum<Scalar> walsh_transform(const CubeFunction<Scalar>& f) {
  auto coefficients = f.values();
  detail::walsh_butterfly(coefficients, f.dim(), true);
  return {f.dim(), std::move(coefficients)};
}

template <typename Scalar>
CubeFunction<Scalar> inverse_walsh_transform(const WalshSpectrum<Scalar>& spectrum) {
  auto values = spectrum.coefficients();
  detail::walsh_butterfly(values, spectrum.dim(), false);
  return {spectrum.dim(), std::move(values)};
}

/// D_j f(x) = (f(x) - f(x with x_j negated)) / 2.
template <typename Scalar>
CubeFunction<Scalar> discrete_derivative(const CubeFunction<Scalar>& f, int j) {
  if (j < 0 || j >= f.dim())
    throw ParameterError("coordinate " + std::to_string(j) + " out of range for n = " +
                         std::to_string(f.dim()));
  CubeFunction<Scalar> out(f.dim(), f.target_dim());
  const Scalar half(0.5);
  for (std::uint32_t x = 0; x < f.size(); ++x) {
    const CubePoint p{x};
    out(p) = half * (f(p) - f(p.flipped(j)));
  }
  return out;
}

/// Delta f = -sum_j D_j f.
template <typename Scalar>
CubeFunction<Scalar> laplacian(const CubeFunction<Scalar>& f) {
  CubeFunction<Scalar> out(f.dim(), f.target_dim());
  const Scalar half(0.5);
  for (std::uint32_t x = 0; x < f.size(); ++x) {
    const CubePoint p{x};
    auto col = out(p);
    for (int j = 0; j < f.dim(); ++j) col -= half * (f(p) - f(p.flipped(j)));
  }
  return out;
}

/// P_t f = exp(t Delta) f, applied as the Walsh multiplier exp(-t|S|).
template <typename Scalar>
CubeFunction<Scalar> heat_semigroup(const CubeFunction<Scalar>& f, std::type_identity_t<Scalar> t) {
  if (!(t >= Scalar(0))) throw ParameterError("heat semigroup time must be >= 0");
  if (t == Scalar(0)) return f;
  auto spectrum = walsh_transform(f);
  std::vector<Scalar> decay(static_cast<std::size_t>(f.dim()) + 1);
  for (int k = 0; k <= f.dim(); ++k) decay[k] = std::exp(-t * Scalar(k));
  for (std::uint32_t s = 0; s < spectrum.size(); ++s)
    spectrum.coefficient(s) *= decay[popcount(s)];
  return inverse_walsh_transform(spectrum);
}

/// Product weights prod_i (1 + e^{-t} xi_i) / 2, indexed by the point xi.
template <typename Scalar>
std::vector<Scalar> biased_weights(int n, std::type_identity_t<Scalar> t) {
  const Scalar decay = std::exp(-t);
  const Scalar p_plus = (Scalar(1) + decay) / Scalar(2);
  const Scalar p_minus = -std::expm1(-t) / Scalar(2);
  std::vector<Scalar> w(std::size_t{1} << n);
  w[0] = Scalar(1);
  for (int j = 0; j < n; ++j) {
    const std::size_t bit = std::size_t{1} << j;
    for (std::size_t y = 0; y < bit; ++y) {
      w[y | bit] = w[y] * p_minus;
      w[y] *= p_plus;
    }
  }
  return w;
}

/// P_t f(x) = E f(x xi(t)) by direct summation over all 2^n outcomes of xi(t).
/// Cost O(d 4^n); retained as an independent check of heat_semigroup.
template <typename Scalar>
CubeFunction<Scalar> kernel_semigroup(const CubeFunction<Scalar>& f, std::type_identity_t<Scalar> t) {
  if (!(t > Scalar(0))) throw ParameterError("kernel semigroup time must be > 0");
  const auto w = biased_weights<Scalar>(f.dim(), t);
  CubeFunction<Scalar> out(f.dim(), f.target_dim());
  PairwiseAccumulator<Scalar> acc(f.target_dim());
  for (std::uint32_t x = 0; x < f.size(); ++x) {
    acc.reset();
    for (std::uint32_t y = 0; y < f.size(); ++y) acc.add_scaled(w[y], f.values().col(x ^ y));
    out.values().col(x) = acc.result();
  }
  return out;
}

/// D_j P_t f(x) = (e^{2t} - 1)^{-1/2} E[delta_j(t) f(x xi(t))], by direct summation.
template <typename Scalar>
CubeFunction<Scalar> kernel_gradient(const CubeFunction<Scalar>& f, int j, std::type_identity_t<Scalar> t) {
  if (!(t > Scalar(0))) throw ParameterError("kernel gradient time must be > 0");
  if (j < 0 || j >= f.dim()) throw ParameterError("coordinate out of range");
  const auto w = biased_weights<Scalar>(f.dim(), t);
  const Scalar decay = std::exp(-t);
  const Scalar sd = std::sqrt(-std::expm1(Scalar(-2) * t));
  const Scalar delta_plus = -std::expm1(-t) / sd;
  const Scalar delta_minus = (Scalar(-1) - decay) / sd;
  const Scalar prefactor = Scalar(1) / std::sqrt(std::expm1(Scalar(2) * t));
  const std::uint32_t bit = 1u << j;
  CubeFunction<Scalar> out(f.dim(), f.target_dim());
  PairwiseAccumulator<Scalar> acc(f.target_dim());
  for (std::uint32_t x = 0; x < f.size(); ++x) {
    acc.reset();
    for (std::uint32_t y = 0; y < f.size(); ++y) {
      const Scalar delta = (y & bit) ? delta_minus : delta_plus;
      acc.add_scaled(w[y] * delta, f.values().col(x ^ y));
    }
    out.values().col(x) = prefactor * acc.result();
  }
  return out;
}

/// Uniform mean E f(eps).
template <typename Scalar>
typename CubeFunction<Scalar>::Vector expectation(const CubeFunction<Scalar>& f) {
  PairwiseAccumulator<Scalar> acc(f.target_dim());
  for (std::uint32_t x = 0; x < f.size(); ++x) acc.add(f.values().col(x));
  return acc.result() / Scalar(f.size());
}

/// E f(xi(t)) under the biased law, i.e. P_t f at the all-ones point.
template <typename Scalar>
typename CubeFunction<Scalar>::Vector biased_expectation(const CubeFunction<Scalar>& f, std::type_identity_t<Scalar> t) {
  if (!(t > Scalar(0))) throw ParameterError("biased expectation time must be > 0");
  const auto w = biased_weights<Scalar>(f.dim(), t);
  PairwiseAccumulator<Scalar> acc(f.target_dim());
  for (std::uint32_t x = 0; x < f.size(); ++x) acc.add_scaled(w[x], f.values().col(x));
  return acc.result();
}

/// All n partial derivatives, computed once and reused by the evaluators.
template <typename Scalar>
std::vector<CubeFunction<Scalar>> gradient_tables(const CubeFunction<Scalar>& f) {
  std::vector<CubeFunction<Scalar>> out;
  out.reserve(static_cast<std::size_t>(f.dim()));
  for (int j = 0; j < f.dim(); ++j) out.push_back(discrete_derivative(f, j));
  return out;
}

/// f - E f.
template <typename Scalar>
CubeFunction<Scalar> centered(const CubeFunction<Scalar>& f) {
  CubeFunction<Scalar> out = f;
  out.values().colwise() -= expectation(f);
  return out;
}

using CubeFunctiond = CubeFunction<double>;
using WalshSpectrumd = WalshSpectrum<double>;

}  // namespace hpl
