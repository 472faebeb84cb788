#include "hpl/biased_measure.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <utility>

#include "hpl/quadrature.hpp"
#include "hpl/summation.hpp"

namespace hpl {

double BiasedCoordinateLaw::delta_variance() const {
  const double m = delta_mean();
  return p_plus * delta_plus * delta_plus + p_minus * delta_minus * delta_minus - m * m;
}

double BiasedCoordinateLaw::delta_abs_moment(double p) const {
  return p_plus * std::pow(std::abs(delta_plus), p) + p_minus * std::pow(std::abs(delta_minus), p);
}

BiasedCoordinateLaw make_law(double t) {
  if (!(t > 0.0)) throw ParameterError("biased law needs t > 0 (delta(t) is undefined at t = 0)");
  BiasedCoordinateLaw law;
  law.t = t;
  const double decay = std::exp(-t);
  const double one_minus_decay = -std::expm1(-t);
  const double sd = std::sqrt(-std::expm1(-2.0 * t));
  law.p_plus = 0.5 * (1.0 + decay);
  law.p_minus = 0.5 * one_minus_decay;
  law.delta_plus = one_minus_decay / sd;
  law.delta_minus = -(1.0 + decay) / sd;
  return law;
}

double mu_density(double t) {
  if (!(t > 0.0)) throw ParameterError("mu density is defined for t > 0");
  return (2.0 / M_PI) / std::sqrt(std::expm1(2.0 * t));
}

double mu_time_from_angle(double theta) {
  if (theta < 0.25 * M_PI) {
    const double h = std::sin(0.5 * theta);
    return -std::log1p(-2.0 * h * h);
  }
  return -std::log(std::sin(0.5 * M_PI - theta));
}

double MuQuadrature::total_mass() const { return pairwise_sum_of(Eigen::Map<const Eigen::VectorXd>(weights.data(), static_cast<Eigen::Index>(weights.size()))); }

double MuQuadrature::integrate(const std::function<double(double)>& g) const {
  return pairwise_sum<double>(nodes.size(), [&](std::size_t k) { return weights[k] * g(nodes[k]); });
}

MuQuadrature make_mu_quadrature(std::size_t m) {
  detail::require(m >= 1, "mu quadrature needs at least one node");
  // Gauss-Legendre in u with theta = (pi/2) u^3, graded toward theta = 0.
  const QuadratureRule rule = gauss_legendre(m, 0.0, 1.0);
  MuQuadrature quad;
  quad.nodes.resize(m);
  quad.weights.resize(m);
  quad.angles.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double u = rule.nodes[k];
    quad.angles[k] = 0.5 * M_PI * u * u * u;
    quad.nodes[k] = mu_time_from_angle(quad.angles[k]);
    quad.weights[k] = 3.0 * u * u * rule.weights[k];
  }
  return quad;
}

double integrate_mu_adaptive(const std::function<double(double)>& g, double tol) {
  auto integrand = [&](double theta) { return g(mu_time_from_angle(theta)); };
  constexpr int kMaxLevels = 14;
  return integrate_tanh_sinh(integrand, 0.0, 0.5 * M_PI, tol, kMaxLevels).value / (0.5 * M_PI);
}

double integrate_mu_raw(const std::function<double(double)>& g, double tol) {
  auto integrand = [&](double t) { return g(t) * mu_density(t); };
  constexpr int kMaxLevels = 14;
  constexpr double kCutoff = 60.0;  // mu((60, inf)) < 1e-26
  return integrate_tanh_sinh(integrand, 0.0, 1.0, tol, kMaxLevels).value +
         integrate_tanh_sinh(integrand, 1.0, kCutoff, tol, kMaxLevels).value;
}

CubePoint sample_biased_vector(const CounterRng& rng, std::uint64_t index, double t, int n) {
  detail::require(n >= 1 && n <= 32, "biased vector dimension must be in [1, 32]");
  const double p_plus = make_law(t).p_plus;
  std::uint32_t bits = 0;
  const std::uint64_t base = index * static_cast<std::uint64_t>(n);
  for (int i = 0; i < n; ++i)
    if (rng.biased_sign(base + static_cast<std::uint64_t>(i), p_plus) < 0) bits |= 1u << i;
  return {bits};
}

double sample_mu(const CounterRng& rng, std::uint64_t index) {
  // theta uniform on (0, pi/2).
  const double u = rng.uniform(index);
  return mu_time_from_angle(0.5 * M_PI * u);
}

double tail_integral(double t, double r) {
  if (!(t > 0.0)) throw ParameterError("tail integral needs t > 0");
  if (!(r >= 1.0)) throw ParameterError("tail integral needs r >= 1");
  return std::pow(2.0, 1.0 - 1.0 / r) * std::pow(-std::expm1(-2.0 * t), 1.0 / r);
}

double tail_integral_direct(double t, double r) {
  if (!(r >= 1.0)) throw ParameterError("tail integral needs r >= 1");
  const BiasedCoordinateLaw law = make_law(t);
  // Law of |xi - xi'| from the four outcomes of (xi, xi').
  std::map<double, double> pmf;
  for (int a : {1, -1})
    for (int b : {1, -1}) {
      const double pa = a > 0 ? law.p_plus : law.p_minus;
      const double pb = b > 0 ? law.p_plus : law.p_minus;
      pmf[std::abs(static_cast<double>(a - b))] += pa * pb;
    }
  // The tail s -> P{|D| > s} is a step function; integrate it piece by piece.
  std::vector<std::pair<double, double>> support(pmf.begin(), pmf.end());
  double integral = 0.0;
  double left = 0.0;
  for (std::size_t k = 0; k < support.size(); ++k) {
    double tail = 0.0;
    for (std::size_t l = k; l < support.size(); ++l)
      if (support[l].first > left) tail += support[l].second;
    const double right = support[k].first;
    if (right > left && tail > 0.0) integral += (right - left) * std::pow(tail, 1.0 / r);
    left = std::max(left, right);
  }
  return integral;
}

double tail_integral_verified(double t, double r) {
  const double closed = tail_integral(t, r);
  const double direct = tail_integral_direct(t, r);
  if (std::abs(closed - direct) > 1e-14) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "tail integral mismatch at t = " << t << ", r = " << r << ": closed form " << closed
        << " vs direct " << direct;
    throw NumericalError(msg.str());
  }
  return closed;
}

MuWeightedIntegral mu_weighted_integral(double m_exp) {
  if (!(m_exp >= 1.0)) throw ParameterError("mu-weighted integral needs exponent >= 1");
  MuWeightedIntegral out;
  out.exponent = m_exp;
  const double a = 1.0 / m_exp;
  // Under t = -ln cos(theta): 1 - e^{-2t} = sin^2(theta), and mu is uniform in theta,
  // so (pi/2) * mean over theta of sin^{2a - 1} is the integral over (0, pi/2).
  out.mu_side = integrate_tanh_sinh([&](double theta) { return std::pow(std::sin(theta), 2.0 * a - 1.0); },
                                    0.0, 0.5 * M_PI, 1e-13, 14)
                    .value;
  auto exponential = [&](double t) { return std::exp(-t) * std::pow(-std::expm1(-t), a - 1.0); };
  constexpr double kCutoff = 60.0;  // remaining mass is below e^{-60}
  out.exponential_side = integrate_tanh_sinh(exponential, 0.0, 1.0, 1e-13, 14).value +
                         integrate_tanh_sinh(exponential, 1.0, kCutoff, 1e-13, 14).value;
  out.mu_side_bounded = out.mu_side <= m_exp + 1e-8;
  out.exponential_side_exact = std::abs(out.exponential_side - m_exp) <= 1e-8;
  return out;
}

double difference_abs_moment(double t, double p) {
  const BiasedCoordinateLaw law = make_law(t);
  const double sd = std::sqrt(law.xi_variance());
  double moment = 0.0;
  for (int a : {1, -1})
    for (int b : {1, -1}) {
      const double pa = a > 0 ? law.p_plus : law.p_minus;
      const double pb = b > 0 ? law.p_plus : law.p_minus;
      const double eta = std::abs(static_cast<double>(a - b)) / sd;
      if (eta > 0.0) moment += pa * pb * std::pow(eta, p);
    }
  return moment;
}

double symmetrization_law_gap(double t, int n) {
  detail::require(n >= 1 && n <= 6, "symmetrization law check supports 1 <= n <= 6");
  const auto weights = biased_weights<double>(n, t);
  const std::uint32_t size = 1u << n;
  int codes = 1;
  for (int i = 0; i < n; ++i) codes *= 3;
  std::vector<double> plain(codes, 0.0);
  std::vector<double> signed_law(codes, 0.0);
  // Base-3 digit per coordinate: 0 -> 0, 1 -> +2, 2 -> -2.
  auto encode = [n](std::uint32_t xi, std::uint32_t xi_prime, std::uint32_t sign_flip) {
    int code = 0;
    for (int i = n - 1; i >= 0; --i) {
      const int a = ((xi >> i) & 1u) ? -1 : 1;
      const int b = ((xi_prime >> i) & 1u) ? -1 : 1;
      const int s = ((sign_flip >> i) & 1u) ? -1 : 1;
      const int diff = s * (a - b);
      code = 3 * code + (diff == 0 ? 0 : (diff > 0 ? 1 : 2));
    }
    return code;
  };
  for (std::uint32_t xi = 0; xi < size; ++xi)
    for (std::uint32_t xp = 0; xp < size; ++xp) {
      const double w = weights[xi] * weights[xp];
      plain[encode(xi, xp, 0)] += w;
      for (std::uint32_t e = 0; e < size; ++e) signed_law[encode(xi, xp, e)] += w / size;
    }
  double gap = 0.0;
  for (int c = 0; c < codes; ++c) gap = std::max(gap, std::abs(plain[c] - signed_law[c]));
  return gap;
}

}  // namespace hpl
