#pragma once

#include <string>
#include <variant>

#include <Eigen/Dense>

#include "hpl/norms.hpp"

namespace hpl {

/// Convex function Phi: R^d -> R used as the test function of the
/// dimension-free inequalities.
class ConvexGauge {
 public:
  struct NormPower {
    NormSpec norm;
    double p;
  };
  /// max_k (<a_k, x> + b_k); a_k are the columns of `functionals`.
  struct MaxAffine {
    Eigen::MatrixXd functionals;
    Eigen::VectorXd offsets;
  };
  struct Linear {
    Eigen::VectorXd functional;
  };

  static ConvexGauge norm_power(const NormSpec& norm, double p);
  static ConvexGauge max_affine(Eigen::MatrixXd functionals, Eigen::VectorXd offsets);
  static ConvexGauge linear(Eigen::VectorXd functional);

  double operator()(Eigen::Ref<const Eigen::VectorXd> v) const;

  Eigen::Index dim() const;
  std::string name() const;
  const NormPower* as_norm_power() const { return std::get_if<NormPower>(&kind_); }
  const MaxAffine* as_max_affine() const { return std::get_if<MaxAffine>(&kind_); }
  const Linear* as_linear() const { return std::get_if<Linear>(&kind_); }

 private:
  using Kind = std::variant<NormPower, MaxAffine, Linear>;
  explicit ConvexGauge(Kind kind) : kind_(std::move(kind)) {}

  Kind kind_;
};

}  // namespace hpl
