#pragma once

// The biased sign law xi(t), its standardization delta(t), and the mixing
// probability measure mu(dt) = (2/pi) (e^{2t} - 1)^{-1/2} dt on (0, inf).
//
// mu is the image of the uniform law on (0, pi/2) under t = -ln cos(theta),
// which turns every mu-integral into a plain average over theta. Quadrature
// and sampling both go through that substitution.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "hpl/cube.hpp"
#include "hpl/random.hpp"

namespace hpl {

/// Law of one coordinate xi_i(t) and of delta_i(t) = (xi_i - e^{-t}) / sqrt(1 - e^{-2t}).
struct BiasedCoordinateLaw {
  double t = 0.0;
  double p_plus = 0.0;   ///< P{xi = +1} = (1 + e^{-t}) / 2
  double p_minus = 0.0;  ///< P{xi = -1} = (1 - e^{-t}) / 2
  double delta_plus = 0.0;
  double delta_minus = 0.0;

  double xi_mean() const { return p_plus - p_minus; }
  double xi_variance() const { return 4.0 * p_plus * p_minus; }
  double delta(int sign) const { return sign > 0 ? delta_plus : delta_minus; }
  double delta_mean() const { return p_plus * delta_plus + p_minus * delta_minus; }
  double delta_variance() const;
  /// E|delta(t)|^p.
  double delta_abs_moment(double p) const;
};

/// Closed-form law at t > 0.
BiasedCoordinateLaw make_law(double t);

/// Density of mu at t > 0.
double mu_density(double t);
/// t(theta) = -ln cos(theta), evaluated without cancellation near pi/2.
double mu_time_from_angle(double theta);

/// Node/weight rule for integrals against mu.
struct MuQuadrature {
  std::vector<double> nodes;    ///< t_k > 0
  std::vector<double> weights;  ///< w_k > 0, summing to 1 for m >= 2
  std::vector<double> angles;   ///< theta_k with t_k = -ln cos(theta_k)

  std::size_t size() const { return nodes.size(); }
  double total_mass() const;

  /// sum_k w_k g(t_k).
  double integrate(const std::function<double(double)>& g) const;
};

/// Gauss-Legendre in u on (0, 1) with theta = (pi/2) u^3, pushed forward
/// through t(theta). The grading resolves algebraic behaviour at t = 0; m >= 1.
MuQuadrature make_mu_quadrature(std::size_t m = 64);

/// Integral of g against mu by adaptive tanh-sinh quadrature in theta.
/// Intended for integrands with an integrable singularity at t = 0.
double integrate_mu_adaptive(const std::function<double(double)>& g, double tol = 1e-12);
/// The same integral taken in t against the raw density, by tanh-sinh on
/// (0, 1] and [1, 60]; g must be bounded on the far tail.
double integrate_mu_raw(const std::function<double(double)>& g, double tol = 1e-12);

/// A point of {-1,1}^n with independent coordinates of law xi(t).
/// Coordinate i uses counter index * n + i of `rng`.
CubePoint sample_biased_vector(const CounterRng& rng, std::uint64_t index, double t, int n);
/// One draw from mu.
double sample_mu(const CounterRng& rng, std::uint64_t index);

/// int_0^inf P{|xi_j(t) - xi'_j(t)| > s}^{1/r} ds in closed form.
double tail_integral(double t, double r);
/// The same integral computed from the two-point law by integrating the step tail.
double tail_integral_direct(double t, double r);
/// Closed form, after asserting agreement with the direct route to 1e-14;
/// throws NumericalError on disagreement.
double tail_integral_verified(double t, double r);

struct MuWeightedIntegral {
  double exponent = 0.0;      ///< max(q, p)
  double mu_side = 0.0;       ///< (pi/2) int (1 - e^{-2t})^{1/m - 1/2} mu(dt)
  double exponential_side = 0.0;  ///< int_0^inf e^{-t} (1 - e^{-t})^{1/m - 1} dt
  bool mu_side_bounded = false;       ///< mu_side <= exponent + 1e-8
  bool exponential_side_exact = false;  ///< |exponential_side - exponent| <= 1e-8
};

/// Both sides of the mu-weighted integral bound for exponent m >= 1.
/// Throws NumericalError (with diagnostics) if a quadrature fails to converge.
MuWeightedIntegral mu_weighted_integral(double m_exp);

/// E|(xi_j - xi'_j) / sqrt(Var xi_j)|^p by enumerating the four outcomes.
double difference_abs_moment(double t, double p);

/// Max absolute difference between the exact joint laws of xi - xi' and
/// eps' (xi - xi') on {-2,0,2}^n, by full enumeration (n <= 6).
double symmetrization_law_gap(double t, int n);

}  // namespace hpl
