#include "hpl/norms.hpp"

#include <cmath>
#include <sstream>

#include "hpl/errors.hpp"
#include "hpl/random.hpp"
#include "hpl/summation.hpp"

namespace hpl {

double abs_pow(double x, double p) {
  const double a = std::abs(x);
  if (a == 0.0) return 0.0;
  if (p == 1.0) return a;
  if (p == 2.0) return a * a;
  return std::exp(p * std::log(a));
}

NormSpec NormSpec::lp(double p, Eigen::Index d) {
  if (!(p >= 1.0)) throw ParameterError("norm exponent must be >= 1");
  detail::require(d >= 1, "norm dimension must be >= 1");
  return {NormKind::lp, p, d};
}

NormSpec NormSpec::euclidean(Eigen::Index d) {
  detail::require(d >= 1, "norm dimension must be >= 1");
  return {NormKind::euclidean, 2.0, d};
}

NormSpec NormSpec::parse(const std::string& text, Eigen::Index d) {
  if (text == "l2" || text == "euclidean") return euclidean(d);
  if (text == "l1") return lp(1.0, d);
  if (text == "linf" || text == "lp:inf") return linf(d);
  if (text.rfind("lp:", 0) == 0) {
    std::size_t used = 0;
    double p = 0.0;
    try {
      p = std::stod(text.substr(3), &used);
    } catch (const std::exception&) {
      throw ParameterError("cannot parse norm '" + text + "'");
    }
    if (used != text.size() - 3) throw ParameterError("cannot parse norm '" + text + "'");
    return lp(p, d);
  }
  throw ParameterError("unknown norm '" + text + "' (expected lp:<p>, l1, l2, linf)");
}

double NormSpec::dual_exponent() const {
  if (p_ == 1.0) return kInfinity;
  if (p_ == kInfinity) return 1.0;
  return p_ / (p_ - 1.0);
}

std::string NormSpec::name() const {
  if (kind_ == NormKind::euclidean) return "l2";
  if (p_ == kInfinity) return "linf";
  std::ostringstream out;
  out << "lp:" << p_;
  return out.str();
}

double NormSpec::evaluate(Eigen::Ref<const Eigen::VectorXd> v) const {
  if (v.size() != d_) throw ParameterError("vector dimension does not match norm dimension");
  if (kind_ == NormKind::euclidean || p_ == 2.0) return v.norm();
  if (p_ == 1.0) return v.lpNorm<1>();
  const double m = v.lpNorm<Eigen::Infinity>();
  if (p_ == kInfinity || m == 0.0) return m;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) acc += abs_pow(v(i) / m, p_);
  return m * std::pow(acc, 1.0 / p_);
}

Eigen::VectorXd NormSpec::gradient(Eigen::Ref<const Eigen::VectorXd> v) const {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(v.size());
  const double value = evaluate(v);
  if (value == 0.0) return g;
  if (p_ == 1.0) {
    for (Eigen::Index i = 0; i < v.size(); ++i) g(i) = v(i) > 0 ? 1.0 : (v(i) < 0 ? -1.0 : 0.0);
    return g;
  }
  if (p_ == kInfinity) {
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    g(arg) = v(arg) > 0 ? 1.0 : -1.0;
    return g;
  }
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double r = v(i) / value;
    g(i) = (r > 0 ? 1.0 : (r < 0 ? -1.0 : 0.0)) * abs_pow(r, p_ - 1.0);
  }
  return g;
}

NormSpec NormSpec::smoothed(double exponent) const {
  detail::require(std::isfinite(exponent) && exponent > 1.0, "smoothing exponent must be finite and > 1");
  if (p_ == kInfinity) return lp(exponent, d_);
  if (p_ == 1.0) return lp(1.0 + 1.0 / exponent, d_);
  return *this;
}

double norm(Eigen::Ref<const Eigen::VectorXd> v, const NormSpec& spec) { return spec.evaluate(v); }

namespace {

void check_query(const MomentQuery& q) {
  if (!(q.p_moment >= 1.0)) throw ParameterError("moment exponent must be >= 1");
  detail::require(q.vectors.cols() >= 1, "need at least one vector");
  detail::require(q.vectors.rows() == q.norm.dim(), "vector dimension does not match norm");
}

}  // namespace

MomentEstimate rademacher_moment(const MomentQuery& q) {
  check_query(q);
  const auto n = static_cast<int>(q.vectors.cols());
  if (n > kMaxRademacherTerms)
    throw CapacityError("exact Rademacher moment supports at most 20 vectors; use Monte Carlo");
  const std::uint64_t patterns = std::uint64_t{1} << n;
  Eigen::VectorXd sum(q.vectors.rows());
  PairwiseScalarAccumulator<double> acc;
  for (std::uint64_t s = 0; s < patterns; ++s) {
    sum.setZero();
    for (int j = 0; j < n; ++j) {
      if ((s >> j) & 1u)
        sum -= q.vectors.col(j);
      else
        sum += q.vectors.col(j);
    }
    acc.add(abs_pow(q.norm(sum), q.p_moment));
  }
  return {acc.result() / static_cast<double>(patterns), 0.0, patterns, true};
}

MomentEstimate rademacher_moment(const MomentQuery& q, const MonteCarloOptions& mc) {
  check_query(q);
  detail::require(mc.samples >= 2, "Monte Carlo needs at least two samples");
  const auto n = q.vectors.cols();
  const CounterRng rng(mc.seed, 0x7261646dULL);
  Eigen::VectorXd sum(q.vectors.rows());
  PairwiseScalarAccumulator<double> acc;
  PairwiseScalarAccumulator<double> acc_sq;
  for (std::uint64_t s = 0; s < mc.samples; ++s) {
    sum.setZero();
    for (Eigen::Index j = 0; j < n; ++j)
      sum += rng.uniform_sign(s * static_cast<std::uint64_t>(n) + static_cast<std::uint64_t>(j)) *
             q.vectors.col(j);
    const double v = abs_pow(q.norm(sum), q.p_moment);
    acc.add(v);
    acc_sq.add(v * v);
  }
  const auto count = static_cast<double>(mc.samples);
  const double mean = acc.result() / count;
  const double var = std::max(0.0, (acc_sq.result() / count - mean * mean) * count / (count - 1.0));
  return {mean, std::sqrt(var / count), mc.samples, false};
}

namespace {

double sum_of_norm_powers(const Eigen::MatrixXd& vectors, double p, const NormSpec& spec) {
  return pairwise_sum<double>(static_cast<std::size_t>(vectors.cols()), [&](std::size_t j) {
    return abs_pow(spec(vectors.col(static_cast<Eigen::Index>(j))), p);
  });
}

}  // namespace

double type_ratio(const Eigen::MatrixXd& vectors, double p, const NormSpec& spec) {
  const double denom = sum_of_norm_powers(vectors, p, spec);
  if (denom == 0.0) throw ParameterError("type ratio undefined for all-zero vectors");
  const double moment = rademacher_moment({p, vectors, spec}).value;
  return std::pow(moment / denom, 1.0 / p);
}

double cotype_ratio(const Eigen::MatrixXd& vectors, double q, const NormSpec& spec) {
  const double numer = sum_of_norm_powers(vectors, q, spec);
  if (numer == 0.0) throw ParameterError("cotype ratio undefined for all-zero vectors");
  const double moment = rademacher_moment({q, vectors, spec}).value;
  return std::pow(numer / moment, 1.0 / q);
}

}  // namespace hpl
