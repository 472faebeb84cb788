#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace hpl {

/// Nodes and weights of a one-dimensional quadrature rule.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// m-point Gauss-Legendre rule on [lo, hi]. Nodes are returned in increasing order.
QuadratureRule gauss_legendre(std::size_t m, double lo = -1.0, double hi = 1.0);

struct IntegrationResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int levels = 0;
  std::size_t evaluations = 0;
};

/// Double-exponential (tanh-sinh) quadrature on a finite interval, refined by
/// halving the step until consecutive levels agree within `tol` (absolute,
/// relative to max(1, |value|)). Handles integrable algebraic endpoint
/// singularities; put a singular endpoint at `lo` = 0 where node spacing is
/// representable. Throws NumericalError when `max_levels` is exhausted.
IntegrationResult integrate_tanh_sinh(const std::function<double(double)>& f, double lo, double hi,
                                      double tol = 1e-12, int max_levels = 12);

}  // namespace hpl
