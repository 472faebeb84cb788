#pragma once

// Finite-dimensional l_p norms standing in for the Banach space, and exact
// moments of vector-valued Rademacher sums.

#include <cstdint>
#include <limits>
#include <string>

#include <Eigen/Dense>

namespace hpl {

/// |x|^p for finite p >= 1, with the convention 0^p = 0.
double abs_pow(double x, double p);

enum class NormKind { lp, euclidean };

class NormSpec {
 public:
  static constexpr double kInfinity = std::numeric_limits<double>::infinity();

  /// l_p^d with p in [1, inf].
  static NormSpec lp(double p, Eigen::Index d);
  static NormSpec linf(Eigen::Index d) { return lp(kInfinity, d); }
  static NormSpec euclidean(Eigen::Index d);
  /// Parses "lp:<p>", "l1", "l2", "linf", "euclidean".
  static NormSpec parse(const std::string& text, Eigen::Index d);

  NormKind kind() const { return kind_; }
  double exponent() const { return p_; }
  Eigen::Index dim() const { return d_; }
  bool is_infinity() const { return p_ == kInfinity; }
  bool is_smooth() const { return p_ > 1.0 && p_ < kInfinity; }
  /// Conjugate exponent p' with 1/p + 1/p' = 1.
  double dual_exponent() const;
  std::string name() const;

  template <typename Derived>
  double operator()(const Eigen::MatrixBase<Derived>& v) const {
    return evaluate(Eigen::Ref<const Eigen::VectorXd>(v));
  }
  double evaluate(Eigen::Ref<const Eigen::VectorXd> v) const;

  /// A (sub)gradient of the norm at v; zero at v = 0.
  Eigen::VectorXd gradient(Eigen::Ref<const Eigen::VectorXd> v) const;

  /// Smooth l_r surrogate for l_1 / l_inf (r = 1 + 1/exponent or r = exponent);
  /// other norms are returned unchanged.
  NormSpec smoothed(double exponent = 64.0) const;

 private:
  NormSpec(NormKind kind, double p, Eigen::Index d) : kind_(kind), p_(p), d_(d) {}

  NormKind kind_;
  double p_;
  Eigen::Index d_;
};

double norm(Eigen::Ref<const Eigen::VectorXd> v, const NormSpec& spec);

/// E || sum_j eps_j x_j ||^p with the x_j the columns of `vectors`.
struct MomentQuery {
  double p_moment = 2.0;
  Eigen::MatrixXd vectors;  ///< d x n
  NormSpec norm = NormSpec::euclidean(1);
};

struct MonteCarloOptions {
  std::uint64_t samples = 100000;
  std::uint64_t seed = 0;
};

struct MomentEstimate {
  double value = 0.0;
  double std_error = 0.0;  ///< zero in exact mode
  std::uint64_t terms = 0;
  bool exact = true;
};

/// Largest number of vectors for exact Rademacher enumeration.
inline constexpr int kMaxRademacherTerms = 20;

/// Exact average over all 2^n sign patterns. Throws CapacityError for n > 20.
MomentEstimate rademacher_moment(const MomentQuery& query);
/// Monte Carlo estimate with its standard error.
MomentEstimate rademacher_moment(const MomentQuery& query, const MonteCarloOptions& mc);

/// (E||sum eps_j x_j||^p / sum ||x_j||^p)^{1/p}.
double type_ratio(const Eigen::MatrixXd& vectors, double p, const NormSpec& spec);
/// (sum ||x_j||^q / E||sum eps_j x_j||^q)^{1/q}.
double cotype_ratio(const Eigen::MatrixXd& vectors, double q, const NormSpec& spec);

}  // namespace hpl
