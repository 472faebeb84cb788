#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace hpl {

// All exact expectations go through the routines below. The summation tree
// depends only on the number of terms, never on how or where the terms are
// produced, so results are bit-reproducible.
inline constexpr std::size_t kPairwiseBlock = 16;

/// Recursive pairwise sum of term(i) over [begin, end).
template <typename Scalar, typename Term>
Scalar pairwise_sum(std::size_t begin, std::size_t end, Term&& term) {
  if (end - begin <= kPairwiseBlock) {
    Scalar acc(0);
    for (std::size_t i = begin; i < end; ++i) acc += term(i);
    return acc;
  }
  const std::size_t mid = begin + (end - begin) / 2;
  return pairwise_sum<Scalar>(begin, mid, term) + pairwise_sum<Scalar>(mid, end, term);
}

template <typename Scalar, typename Term>
Scalar pairwise_sum(std::size_t count, Term&& term) {
  return pairwise_sum<Scalar>(std::size_t{0}, count, std::forward<Term>(term));
}

template <typename Derived>
typename Derived::Scalar pairwise_sum_of(const Eigen::DenseBase<Derived>& values) {
  using Scalar = typename Derived::Scalar;
  const auto& v = values.derived();
  return pairwise_sum<Scalar>(static_cast<std::size_t>(v.size()),
                              [&](std::size_t i) { return v(static_cast<Eigen::Index>(i)); });
}

/// Streaming pairwise accumulator for vector-valued terms.
///
/// Terms are gathered in blocks of kPairwiseBlock; completed blocks are merged
/// like a binary counter. For power-of-two term counts this is exactly the
/// recursive halving tree. No allocation happens after construction.
template <typename Scalar>
class PairwiseAccumulator {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  explicit PairwiseAccumulator(Eigen::Index dim)
      : block_(Vector::Zero(dim)), carry_(dim), levels_(kMaxLevels, Vector::Zero(dim)) {}

  template <typename Derived>
  void add(const Eigen::MatrixBase<Derived>& term) {
    block_ += term;
    if (++in_block_ == kPairwiseBlock) flush_block();
  }

  /// Adds weight * term without materializing the product.
  template <typename Derived>
  void add_scaled(Scalar weight, const Eigen::MatrixBase<Derived>& term) {
    block_.noalias() += weight * term;
    if (++in_block_ == kPairwiseBlock) flush_block();
  }

  Vector result() const {
    Vector total = block_;
    for (std::size_t l = 0; l < kMaxLevels; ++l)
      if (occupied_ & (std::size_t{1} << l)) total += levels_[l];
    return total;
  }

  void reset() {
    block_.setZero();
    in_block_ = 0;
    occupied_ = 0;
  }

 private:
  static constexpr std::size_t kMaxLevels = 48;

  void flush_block() {
    carry_ = block_;
    std::size_t l = 0;
    while (occupied_ & (std::size_t{1} << l)) {
      carry_ = levels_[l] + carry_;
      occupied_ &= ~(std::size_t{1} << l);
      ++l;
    }
    levels_[l] = carry_;
    occupied_ |= std::size_t{1} << l;
    block_.setZero();
    in_block_ = 0;
  }

  Vector block_;
  Vector carry_;
  std::vector<Vector> levels_;
  std::size_t in_block_ = 0;
  std::size_t occupied_ = 0;
};

/// Scalar counterpart of PairwiseAccumulator.
template <typename Scalar>
class PairwiseScalarAccumulator {
 public:
  void add(Scalar term) {
    block_ += term;
    if (++in_block_ == kPairwiseBlock) flush_block();
  }

  Scalar result() const {
    Scalar total = block_;
    for (std::size_t l = 0; l < kMaxLevels; ++l)
      if (occupied_ & (std::size_t{1} << l)) total += levels_[l];
    return total;
  }

 private:
  static constexpr std::size_t kMaxLevels = 48;

  void flush_block() {
    Scalar carry = block_;
    std::size_t l = 0;
    while (occupied_ & (std::size_t{1} << l)) {
      carry = levels_[l] + carry;
      occupied_ &= ~(std::size_t{1} << l);
      ++l;
    }
    levels_[l] = carry;
    occupied_ |= std::size_t{1} << l;
    block_ = Scalar(0);
    in_block_ = 0;
  }

  Scalar block_ = Scalar(0);
  Scalar levels_[kMaxLevels] = {};
  std::size_t in_block_ = 0;
  std::size_t occupied_ = 0;
};

struct SampleMean {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Pairwise-summed sample mean and the standard error of the mean.
inline SampleMean sample_mean(const std::vector<double>& samples) {
  const auto count = static_cast<double>(samples.size());
  if (samples.empty()) return {};
  const double mean = pairwise_sum<double>(samples.size(), [&](std::size_t i) { return samples[i]; }) / count;
  const double ss = pairwise_sum<double>(samples.size(), [&](std::size_t i) {
    const double e = samples[i] - mean;
    return e * e;
  });
  return {mean, count > 1 ? std::sqrt(ss / (count - 1.0) / count) : 0.0};
}

}  // namespace hpl
