#include "hpl/gauge.hpp"

#include <sstream>

#include "hpl/errors.hpp"

namespace hpl {

ConvexGauge ConvexGauge::norm_power(const NormSpec& norm, double p) {
  if (!(p >= 1.0)) throw ParameterError("norm-power gauge needs p >= 1");
  return ConvexGauge(NormPower{norm, p});
}

ConvexGauge ConvexGauge::max_affine(Eigen::MatrixXd functionals, Eigen::VectorXd offsets) {
  detail::require(functionals.cols() >= 1, "max-affine gauge needs at least one piece");
  detail::require(functionals.cols() == offsets.size(), "one offset per affine piece");
  return ConvexGauge(MaxAffine{std::move(functionals), std::move(offsets)});
}

ConvexGauge ConvexGauge::linear(Eigen::VectorXd functional) {
  detail::require(functional.size() >= 1, "linear gauge needs a non-empty functional");
  return ConvexGauge(Linear{std::move(functional)});
}

double ConvexGauge::operator()(Eigen::Ref<const Eigen::VectorXd> v) const {
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, NormPower>) {
          return abs_pow(k.norm(v), k.p);
        } else if constexpr (std::is_same_v<K, MaxAffine>) {
          return (k.functionals.transpose() * v + k.offsets).maxCoeff();
        } else {
          return k.functional.dot(v);
        }
      },
      kind_);
}

Eigen::Index ConvexGauge::dim() const {
  return std::visit(
      [](const auto& k) -> Eigen::Index {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, NormPower>) return k.norm.dim();
        else if constexpr (std::is_same_v<K, MaxAffine>) return k.functionals.rows();
        else return k.functional.size();
      },
      kind_);
}

std::string ConvexGauge::name() const {
  std::ostringstream out;
  std::visit(
      [&](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, NormPower>) out << "norm_power(" << k.norm.name() << "," << k.p << ")";
        else if constexpr (std::is_same_v<K, MaxAffine>) out << "max_affine(" << k.functionals.cols() << ")";
        else out << "linear";
      },
      kind_);
  return out.str();
}

}  // namespace hpl
