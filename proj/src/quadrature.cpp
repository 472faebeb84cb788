#include "hpl/quadrature.hpp"

#include <cmath>
#include <sstream>

#include "hpl/errors.hpp"

namespace hpl {

QuadratureRule gauss_legendre(std::size_t m, double lo, double hi) {
  detail::require(m >= 1, "Gauss-Legendre rule needs at least one node");
  detail::require(hi > lo, "Gauss-Legendre interval must be non-empty");
  QuadratureRule rule;
  rule.nodes.resize(m);
  rule.weights.resize(m);
  const double half_width = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  const auto count = static_cast<double>(m);
  if (m == 1) {
    rule.nodes[0] = mid;
    rule.weights[0] = hi - lo;
    return rule;
  }
  for (std::size_t i = 0; i < (m + 1) / 2; ++i) {
    // Newton iteration on P_m from the classical cosine initial guess.
    double x = std::cos(M_PI * (static_cast<double>(i) + 0.75) / (count + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= m; ++k) {
        const auto kd = static_cast<double>(k);
        const double p2 = ((2.0 * kd - 1.0) * x * p1 - (kd - 1.0) * p0) / kd;
        p0 = p1;
        p1 = p2;
      }
      dp = count * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / dp;
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // x is the i-th largest root; store ascending.
    rule.nodes[m - 1 - i] = mid + half_width * x;
    rule.nodes[i] = mid - half_width * x;
    rule.weights[m - 1 - i] = half_width * w;
    rule.weights[i] = half_width * w;
  }
  return rule;
}

IntegrationResult integrate_tanh_sinh(const std::function<double(double)>& f, double lo, double hi,
                                      double tol, int max_levels) {
  detail::require(hi > lo, "integration interval must be non-empty");
  const double half = 0.5 * (hi - lo);
  constexpr double kHalfPi = 0.5 * M_PI;
  constexpr double kSMax = 6.5;  // nodes beyond this underflow to the endpoints

  IntegrationResult result;
  // Contribution of the abscissa s (and -s when mirrored).
  auto node = [&](double s) {
    const double u = kHalfPi * std::sinh(s);
    const double cu = std::cosh(u);
    const double weight = half * kHalfPi * std::cosh(s) / (cu * cu);
    // Distance of the node from the nearer endpoint, computed without cancellation.
    const double dist = 2.0 * half / (1.0 + std::exp(2.0 * std::abs(u)));
    double total = 0.0;
    const double x_right = hi - dist;
    const double x_left = lo + dist;
    if (s == 0.0) {
      const double x = lo + half;
      ++result.evaluations;
      return weight * f(x);
    }
    if (x_left > lo && x_left < hi) {
      total += weight * f(x_left);
      ++result.evaluations;
    }
    if (x_right > lo && x_right < hi) {
      total += weight * f(x_right);
      ++result.evaluations;
    }
    return total;
  };

  double step = 1.0;
  double sum = node(0.0);
  for (double s = step; s <= kSMax; s += step) sum += node(s);
  double estimate = step * sum;
  for (int level = 1; level <= max_levels; ++level) {
    step *= 0.5;
    for (double s = step; s <= kSMax; s += 2.0 * step) sum += node(s);
    const double next = step * sum;
    result.error_estimate = std::abs(next - estimate);
    result.levels = level;
    estimate = next;
    if (level >= 3 && result.error_estimate <= tol * std::max(1.0, std::abs(next))) {
      result.value = next;
      return result;
    }
  }
  std::ostringstream msg;
  msg << "tanh-sinh quadrature on [" << lo << ", " << hi << "] did not converge: last change "
      << result.error_estimate << " after " << result.evaluations << " evaluations";
  throw NumericalError(msg.str());
}

}  // namespace hpl
