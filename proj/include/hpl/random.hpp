#pragma once

// Counter-based random numbers: every draw is a pure function of
// (seed, stream, counter), so sample streams do not depend on scheduling.

#include <cstdint>
#include <limits>

namespace hpl {

/// Stateless generator keyed by (seed, stream).
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  /// 64 random bits for the given counter.
  std::uint64_t bits(std::uint64_t counter) const;
  /// Uniform on the open interval (0, 1).
  double uniform(std::uint64_t counter) const;
  /// Standard normal via the inverse distribution function.
  double normal(std::uint64_t counter) const;
  /// +1 with probability p_plus, else -1.
  int biased_sign(std::uint64_t counter, double p_plus) const;
  int uniform_sign(std::uint64_t counter) const { return (bits(counter) >> 63) ? -1 : 1; }

  /// Independent generator for a derived stream.
  CounterRng substream(std::uint64_t index) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t key_;
};

/// Sequential cursor over a CounterRng; usable as a UniformRandomBitGenerator.
class RngCursor {
 public:
  using result_type = std::uint64_t;

  explicit RngCursor(CounterRng rng, std::uint64_t start = 0) : rng_(rng), counter_(start) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return rng_.bits(counter_++); }

  double uniform() { return rng_.uniform(counter_++); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() { return rng_.normal(counter_++); }
  int uniform_sign() { return rng_.uniform_sign(counter_++); }
  int biased_sign(double p_plus) { return rng_.biased_sign(counter_++, p_plus); }

  std::uint64_t position() const { return counter_; }

 private:
  CounterRng rng_;
  std::uint64_t counter_;
};

/// Inverse of the standard normal distribution function, p in (0, 1).
double normal_quantile(double p);

}  // namespace hpl
